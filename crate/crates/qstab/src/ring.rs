//! Exact Laurent-polynomial arithmetic over the integers, together with the
//! complex specializations `q ↦ e^{iπs}`.
//!
//! This is the scalar ring `R = Z[q, q⁻¹]` underlying every exact computation
//! in the crate. Values are immutable and kept in canonical form (no zero
//! coefficients stored), so equality is structural.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex scalars of the specialized charge lattice; plain `f64` pairs.
pub type ComplexScalar = Complex64;

/// Integer-coefficient Laurent polynomial in the formal variable `q`.
///
/// Coefficients are checked `i64`; overflow fails loudly instead of wrapping.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct LaurentInt {
    coeffs: BTreeMap<i64, i64>,
}

impl LaurentInt {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    pub fn constant(c: i64) -> Self {
        Self::monomial(c, 0)
    }

    /// The variable `q` itself.
    pub fn q() -> Self {
        Self::monomial(1, 1)
    }

    /// `c·q^k`.
    pub fn monomial(c: i64, k: i64) -> Self {
        let mut coeffs = BTreeMap::new();
        if c != 0 {
            coeffs.insert(k, c);
        }
        Self { coeffs }
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, i64)>>(terms: I) -> Result<Self> {
        let mut out = Self::zero();
        for (exp, c) in terms {
            out.add_term(exp, c)?;
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `q^k` (zero when absent).
    pub fn coeff(&self, k: i64) -> i64 {
        self.coeffs.get(&k).copied().unwrap_or(0)
    }

    /// Terms `(exponent, coefficient)` in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.coeffs.iter().map(|(&k, &c)| (k, c))
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    fn add_term(&mut self, exp: i64, c: i64) -> Result<()> {
        if c == 0 {
            return Ok(());
        }
        let entry = self.coeffs.entry(exp).or_insert(0);
        *entry = entry.checked_add(c).ok_or(Error::ArithmeticOverflow)?;
        if *entry == 0 {
            self.coeffs.remove(&exp);
        }
        Ok(())
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        let mut out = self.clone();
        for (k, c) in rhs.terms() {
            out.add_term(k, c)?;
        }
        Ok(out)
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self> {
        self.checked_add(&rhs.checked_neg()?)
    }

    pub fn checked_neg(&self) -> Result<Self> {
        let mut out = Self::zero();
        for (k, c) in self.terms() {
            out.add_term(k, c.checked_neg().ok_or(Error::ArithmeticOverflow)?)?;
        }
        Ok(out)
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        let mut out = Self::zero();
        for (ka, ca) in self.terms() {
            for (kb, cb) in rhs.terms() {
                let k = ka.checked_add(kb).ok_or(Error::ArithmeticOverflow)?;
                let c = ca.checked_mul(cb).ok_or(Error::ArithmeticOverflow)?;
                out.add_term(k, c)?;
            }
        }
        Ok(out)
    }

    pub fn checked_scalar_mul(&self, c: i64) -> Result<Self> {
        self.checked_mul(&Self::constant(c))
    }

    /// The bar involution `q ↦ q⁻¹` (exponent negation).
    pub fn bar(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|(&k, &c)| (-k, c)).collect();
        Self { coeffs }
    }

    /// Specialization `q ↦ e^{iπs}`, i.e. `Σ c_k e^{iπsk}` in double precision.
    ///
    /// Integer `s` is special-cased so that `q ↦ (−1)^s` is sign-exact.
    pub fn specialize(&self, s: ComplexScalar) -> ComplexScalar {
        if s.im == 0.0 && s.re.fract() == 0.0 && s.re.abs() < 2f64.powi(62) {
            let odd_s = (s.re as i64).rem_euclid(2) == 1;
            let mut acc = 0.0f64;
            for (k, c) in self.terms() {
                let sign = if odd_s && k.rem_euclid(2) == 1 { -1.0 } else { 1.0 };
                acc += sign * c as f64;
            }
            return ComplexScalar::new(acc, 0.0);
        }
        let mut acc = ComplexScalar::new(0.0, 0.0);
        let i_pi_s = ComplexScalar::new(0.0, std::f64::consts::PI) * s;
        for (k, c) in self.terms() {
            acc += (i_pi_s * k as f64).exp() * c as f64;
        }
        acc
    }

    /// Evaluation at a complex value of `q` itself (not the exponent
    /// parameter); `q = 0` with negative exponents is a domain error.
    pub fn eval_at(&self, q: ComplexScalar) -> Result<ComplexScalar> {
        if q.norm() == 0.0 && self.min_exp().is_some_and(|m| m < 0) {
            return Err(Error::Domain("negative exponent at q = 0".into()));
        }
        let mut acc = ComplexScalar::new(0.0, 0.0);
        for (k, c) in self.terms() {
            acc += q.powi(k as i32) * c as f64;
        }
        Ok(acc)
    }

    /// Exact integer evaluation at `q = (−1)^parity_source`.
    ///
    /// This is the scalar part of the reduction collapsing the extra shift to
    /// the integer `N = parity_source`.
    pub fn eval_at_sign(&self, n: i64) -> Result<i64> {
        let odd_n = n.rem_euclid(2) == 1;
        let mut acc: i64 = 0;
        for (k, c) in self.terms() {
            let term = if odd_n && k.rem_euclid(2) == 1 {
                c.checked_neg().ok_or(Error::ArithmeticOverflow)?
            } else {
                c
            };
            acc = acc.checked_add(term).ok_or(Error::ArithmeticOverflow)?;
        }
        Ok(acc)
    }
}

impl From<i64> for LaurentInt {
    fn from(c: i64) -> Self {
        Self::constant(c)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait for &LaurentInt {
            type Output = LaurentInt;
            fn $method(self, rhs: &LaurentInt) -> LaurentInt {
                self.$checked(rhs).expect("Laurent coefficient overflow")
            }
        }
        impl $trait for LaurentInt {
            type Output = LaurentInt;
            fn $method(self, rhs: LaurentInt) -> LaurentInt {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl Neg for &LaurentInt {
    type Output = LaurentInt;
    fn neg(self) -> LaurentInt {
        self.checked_neg().expect("Laurent coefficient overflow")
    }
}

impl Neg for LaurentInt {
    type Output = LaurentInt;
    fn neg(self) -> LaurentInt {
        -&self
    }
}

impl fmt::Display for LaurentInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.terms() {
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
                first = false;
            } else if c < 0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = c.unsigned_abs();
            match k {
                0 => write!(f, "{a}")?,
                1 => {
                    if a == 1 {
                        write!(f, "q")?;
                    } else {
                        write!(f, "{a}*q")?;
                    }
                }
                _ => {
                    if a == 1 {
                        write!(f, "q^{k}")?;
                    } else {
                        write!(f, "{a}*q^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl FromStr for LaurentInt {
    type Err = Error;

    /// Parses the rendering grammar, e.g. `"1 + 2*q - q^-1"`.
    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty Laurent polynomial".into()));
        }
        let mut out = LaurentInt::zero();
        let bytes = compact.as_bytes();
        let mut pos = 0usize;
        while pos < bytes.len() {
            let mut sign: i64 = 1;
            while pos < bytes.len() && (bytes[pos] == b'+' || bytes[pos] == b'-') {
                if bytes[pos] == b'-' {
                    sign = -sign;
                }
                pos += 1;
            }
            let start = pos;
            while pos < bytes.len() && bytes[pos] != b'+' && bytes[pos] != b'-' {
                pos += 1;
            }
            // a '-' directly after '^' belongs to the exponent
            while pos < bytes.len() && bytes[pos] == b'-' && pos > 0 && bytes[pos - 1] == b'^' {
                pos += 1;
                while pos < bytes.len() && bytes[pos] != b'+' && bytes[pos] != b'-' {
                    pos += 1;
                }
            }
            let term = &compact[start..pos];
            if term.is_empty() {
                return Err(Error::Parse(format!("dangling sign in {s:?}")));
            }
            let (coeff_str, exp) = match term.find('q') {
                None => (term, 0i64),
                Some(qpos) => {
                    let coeff_part = term[..qpos].trim_end_matches('*');
                    let rest = &term[qpos + 1..];
                    let exp = if rest.is_empty() {
                        1
                    } else {
                        let digits = rest
                            .strip_prefix('^')
                            .ok_or_else(|| Error::Parse(format!("bad term {term:?}")))?;
                        digits
                            .parse::<i64>()
                            .map_err(|_| Error::Parse(format!("bad exponent in {term:?}")))?
                    };
                    (coeff_part, exp)
                }
            };
            let coeff: i64 = if coeff_str.is_empty() {
                1
            } else {
                coeff_str
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad coefficient in {term:?}")))?
            };
            let signed = coeff.checked_mul(sign).ok_or(Error::ArithmeticOverflow)?;
            out.add_term(exp, signed)?;
        }
        Ok(out)
    }
}

/// Parses complex scalars in the grammar `a`, `bi`, `a+bi`, `a-bi`.
/// Non-finite values are rejected.
pub fn parse_complex(s: &str) -> Result<ComplexScalar> {
    let value = parse_complex_inner(s)?;
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::Parse(format!("non-finite complex scalar {s:?}")));
    }
    Ok(value)
}

fn parse_complex_inner(s: &str) -> Result<ComplexScalar> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Parse(format!("bad complex scalar {s:?}"));
    if compact.is_empty() {
        return Err(bad());
    }
    if let Some(im_part) = compact.strip_suffix(['i', 'j']) {
        // find the split between real and imaginary parts: the last +/- that
        // is not a leading sign or part of an exponent
        let b = im_part.as_bytes();
        let mut split = None;
        for idx in (1..b.len()).rev() {
            if (b[idx] == b'+' || b[idx] == b'-') && b[idx - 1] != b'e' && b[idx - 1] != b'E' {
                split = Some(idx);
                break;
            }
        }
        match split {
            Some(idx) => {
                let re: f64 = im_part[..idx].parse().map_err(|_| bad())?;
                let im_str = &im_part[idx..];
                let im: f64 = if im_str == "+" {
                    1.0
                } else if im_str == "-" {
                    -1.0
                } else {
                    im_str.parse().map_err(|_| bad())?
                };
                Ok(ComplexScalar::new(re, im))
            }
            None => {
                let im: f64 = if im_part.is_empty() || im_part == "+" {
                    1.0
                } else if im_part == "-" {
                    -1.0
                } else {
                    im_part.parse().map_err(|_| bad())?
                };
                Ok(ComplexScalar::new(0.0, im))
            }
        }
    } else {
        let re: f64 = compact.parse().map_err(|_| bad())?;
        Ok(ComplexScalar::new(re, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lp(s: &str) -> LaurentInt {
        s.parse().unwrap()
    }

    #[test]
    fn ring_ops_examples() {
        assert_eq!(&lp("1+q") * &lp("1-q"), lp("1 - q^2"));
        assert_eq!(&lp("q^-1 + 1") + &lp("-1"), lp("q^-1"));
        assert_eq!(&lp("1+q") * &lp("1+q"), lp("1 + 2*q + q^2"));
    }

    #[test]
    fn bar_examples() {
        assert_eq!(lp("1+q").bar(), lp("1 + q^-1"));
        assert_eq!(lp("5").bar(), lp("5"));
        assert_eq!(lp("q^2 - q^-1").bar(), lp("q^-2 - q"));
    }

    #[test]
    fn specialize_examples() {
        let q = LaurentInt::q();
        assert_eq!(q.specialize(ComplexScalar::new(1.0, 0.0)), ComplexScalar::new(-1.0, 0.0));
        assert_eq!(q.specialize(ComplexScalar::new(2.0, 0.0)), ComplexScalar::new(1.0, 0.0));
        let v = lp("1+q").specialize(ComplexScalar::new(0.5, 0.0));
        assert!((v - ComplexScalar::new(1.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn specialize_integer_is_sign_exact() {
        for n in -6i64..=6 {
            let v = LaurentInt::q().specialize(ComplexScalar::new(n as f64, 0.0));
            let expect = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            assert_eq!(v, ComplexScalar::new(expect, 0.0));
        }
    }

    #[test]
    fn overflow_is_an_error() {
        let big = LaurentInt::constant(i64::MAX);
        assert!(matches!(big.checked_add(&LaurentInt::one()), Err(Error::ArithmeticOverflow)));
        assert!(matches!(big.checked_mul(&LaurentInt::constant(2)), Err(Error::ArithmeticOverflow)));
    }

    #[test]
    fn display_roundtrip_spot_checks() {
        for s in ["0", "1", "-1", "q", "-q", "q^-1", "1 + 2*q - q^-1", "3*q^-2 - q + 7"] {
            let p = lp(s);
            assert_eq!(p, lp(&p.to_string()), "roundtrip of {s}");
        }
    }

    #[test]
    fn parse_complex_grammar() {
        assert_eq!(parse_complex("3").unwrap(), ComplexScalar::new(3.0, 0.0));
        assert_eq!(parse_complex("0.6+0.0i").unwrap(), ComplexScalar::new(0.6, 0.0));
        assert_eq!(parse_complex("2-1.5i").unwrap(), ComplexScalar::new(2.0, -1.5));
        assert_eq!(parse_complex("-i").unwrap(), ComplexScalar::new(0.0, -1.0));
        assert_eq!(parse_complex("1e-3i").unwrap(), ComplexScalar::new(0.0, 1e-3));
        assert!(parse_complex("quux").is_err());
        assert!(parse_complex("1e999").is_err(), "overflowing literals are rejected");
    }

    fn arb_laurent() -> impl Strategy<Value = LaurentInt> {
        proptest::collection::vec((-6i64..=6, -20i64..=20), 0..6)
            .prop_map(|terms| LaurentInt::from_terms(terms).unwrap())
    }

    proptest! {
        #[test]
        fn algebra_laws(a in arb_laurent(), b in arb_laurent(), c in arb_laurent()) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }

        #[test]
        fn bar_is_an_involution(a in arb_laurent()) {
            prop_assert_eq!(a.bar().bar(), a);
        }

        #[test]
        fn specialization_is_a_ring_map(
            a in arb_laurent(),
            b in arb_laurent(),
            re in -2.0f64..2.0,
            im in -0.5f64..0.5,
        ) {
            let s = ComplexScalar::new(re, im);
            let lhs = a.checked_mul(&b).unwrap().specialize(s);
            let rhs = a.specialize(s) * b.specialize(s);
            let scale = 1.0 + a.specialize(s).norm() * b.specialize(s).norm();
            prop_assert!((lhs - rhs).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn roundtrip_parser_on_random_values() {
        let samples = [
            LaurentInt::from_terms([(-3, 4), (0, -1), (5, 2)]).unwrap(),
            LaurentInt::from_terms([(-1, -1), (1, 1)]).unwrap(),
            LaurentInt::zero(),
        ];
        for p in samples {
            let rendered = p.to_string();
            assert_eq!(rendered.parse::<LaurentInt>().unwrap(), p);
        }
    }
}
