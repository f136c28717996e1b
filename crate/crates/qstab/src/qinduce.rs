//! Induced q-stability conditions: extending a heart charge to an R-linear
//! central charge on the X-graded category, the open/closed/additive
//! classification of the induced pre-stability data, q-support data, and
//! Harder–Narasimhan filtrations upstairs.

use num_complex::Complex64;
use num_rational::Rational64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qlattice::{KClass, QLattice};
use crate::repalg::IntervalModule;
use crate::ring::LaurentInt;
use crate::stability::{parse_summands, HeartCharge, PhaseValue, StabilityContext};

/// R-linear central charge on the X-graded K-lattice: determined by the heart
/// charge values `Ẑ(α_i)` and the specialization parameter `s`.
#[derive(Clone, Debug)]
pub struct QCentralCharge {
    s: Complex64,
    zhat: Vec<Complex64>,
}

impl QCentralCharge {
    pub fn induce(charge: &HeartCharge, s: Complex64) -> Self {
        let zhat = (0..charge.rank()).map(|i| charge.z_simple(i)).collect();
        Self { s, zhat }
    }

    pub fn s(&self) -> Complex64 {
        self.s
    }

    pub fn zhat(&self) -> &[Complex64] {
        &self.zhat
    }

    /// `Z(x) = Σ_i x_i(e^{iπs})·Ẑ(α_i)`.
    pub fn eval(&self, x: &KClass) -> Result<Complex64> {
        if x.len() != self.zhat.len() {
            return Err(Error::DimensionMismatch(format!(
                "class of rank {} against charge of rank {}",
                x.len(),
                self.zhat.len()
            )));
        }
        Ok(x.coords()
            .iter()
            .zip(&self.zhat)
            .map(|(c, z)| c.specialize(self.s) * z)
            .sum())
    }

    /// Charge of the shifted heart class `dim·(−1)^m·q^l`.
    pub fn eval_shifted(&self, dim: &[i64], m: i64, l: i64) -> Result<Complex64> {
        let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let factor = (Complex64::new(0.0, std::f64::consts::PI) * self.s * l as f64).exp();
        let base: Complex64 = dim
            .iter()
            .zip(&self.zhat)
            .map(|(&d, z)| z * d as f64)
            .sum();
        Ok(base * factor * sign)
    }
}

/// A formal direct sum of triples `M[m + lX]`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DXObject {
    pub summands: Vec<(IntervalModule, i64, i64)>,
}

impl DXObject {
    /// Parses summand grammar like `"1..2 + S1[1+2X]"`.
    pub fn parse(ctx: &StabilityContext, text: &str) -> Result<Self> {
        Ok(Self { summands: parse_summands(ctx.algebra(), text)? })
    }
}

/// A nonvanishing Hom pair violating (or witnessing) a phase-gap condition.
#[derive(Clone, Debug, Serialize)]
pub struct HomWitness {
    pub from: String,
    pub to: String,
    pub degree: u8,
    pub gap: f64,
}

/// Classification of the induced pre-stability data at parameter `s`.
///
/// Serializes with the documented key names
/// `{gldim, open, additive, closed, L, N0, witnesses}`.
#[derive(Clone, Debug, Serialize)]
pub struct InducingVerdict {
    pub s_re: f64,
    pub s_im: f64,
    pub gldim: f64,
    /// `Some((num, den))` when the global dimension is exactly rational.
    pub gldim_exact: Option<(i64, i64)>,
    pub open: bool,
    #[serde(rename = "additive")]
    pub additive_ok: bool,
    #[serde(rename = "closed")]
    pub closed_ok: bool,
    /// Effective support constant `L = min |Z(α)|/‖α‖` over the heart table.
    #[serde(rename = "L")]
    pub support_l: f64,
    /// X-Hom bound `N₀`.
    #[serde(rename = "N0")]
    pub x_hom_bound: u32,
    pub witnesses: Vec<HomWitness>,
}

/// Exact rational value of an `f64` when it fits in `i64/i64`.
fn f64_as_rational(x: f64) -> Option<Rational64> {
    if !x.is_finite() {
        return None;
    }
    if x == 0.0 {
        return Some(Rational64::from_integer(0));
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mut mantissa, mut exp) = if exp_bits == 0 {
        (frac, -1074i64)
    } else {
        (frac | (1u64 << 52), exp_bits - 1075)
    };
    while mantissa % 2 == 0 && exp < 0 {
        mantissa /= 2;
        exp += 1;
    }
    if exp >= 0 {
        let factor = 1i64.checked_shl(u32::try_from(exp).ok()?)?;
        let num = i64::try_from(mantissa).ok()?.checked_mul(factor)?;
        Some(Rational64::from_integer(sign * num))
    } else {
        if exp < -62 {
            return None;
        }
        let den = 1i64 << (-exp);
        let num = i64::try_from(mantissa).ok()?;
        Some(Rational64::new(sign * num, den))
    }
}

/// Three-way comparison of a (possibly exact) phase gap against a real bound,
/// exact whenever both sides admit exact representations.
fn cmp_vs_real(value: &PhaseValue, bound: f64) -> std::cmp::Ordering {
    if let (Some(v), Some(b)) = (value.as_exact(), f64_as_rational(bound)) {
        return v.cmp(&b);
    }
    value.as_f64().partial_cmp(&bound).expect("finite comparison")
}

/// Scans semistable pairs for Hom gaps `≥ Re(s) − 1`; the flag is true when
/// no such pair exists. A pair achieving equality is a violation.
pub fn check_additive(
    ctx: &StabilityContext,
    charge: &HeartCharge,
    s: Complex64,
) -> Result<(bool, Vec<HomWitness>)> {
    let table = ctx.semistable_table(charge)?;
    Ok(additive_scan(ctx, &table, s))
}

fn additive_scan(
    ctx: &StabilityContext,
    table: &crate::stability::SlicingTable,
    s: Complex64,
) -> (bool, Vec<HomWitness>) {
    let mut witnesses = Vec::new();
    for a in &table.rows {
        for b in &table.rows {
            for degree in [0u8, 1u8] {
                let dim = if degree == 0 {
                    ctx.hom_between(&a.module, &b.module)
                } else {
                    ctx.ext_between(&a.module, &b.module)
                };
                if dim == 0 {
                    continue;
                }
                let gap = b.phase.add_int(degree as i64).sub(&a.phase);
                // violation iff gap + 1 ≥ Re(s)
                if cmp_vs_real(&gap.add_int(1), s.re) != std::cmp::Ordering::Less {
                    witnesses.push(HomWitness {
                        from: a.name.clone(),
                        to: b.name.clone(),
                        degree,
                        gap: gap.as_f64(),
                    });
                }
            }
        }
    }
    (witnesses.is_empty(), witnesses)
}

/// Minimum of `|Z(α)|/‖α‖₂` over the heart's semistable classes.
pub fn support_constant(ctx: &StabilityContext, charge: &HeartCharge) -> Result<f64> {
    let table = ctx.semistable_table(charge)?;
    Ok(support_constant_of(&table))
}

fn support_constant_of(table: &crate::stability::SlicingTable) -> f64 {
    table
        .rows
        .iter()
        .map(|r| {
            let norm = r.dim.iter().map(|&d| (d * d) as f64).sum::<f64>().sqrt();
            Complex64::new(r.z_re, r.z_im).norm() / norm
        })
        .fold(f64::INFINITY, f64::min)
}

/// The X-Hom bound `N₀ = 1`, verified by scanning Euler pairings of all
/// indecomposable pairs for coefficients outside `{q⁰, q¹}`.
#[derive(Clone, Debug, Serialize)]
pub struct XHomBound {
    pub n0: u32,
    pub verified: bool,
}

pub fn x_hom_bound(ctx: &StabilityContext) -> XHomBound {
    let lattice = QLattice::new(ctx.algebra().quiver().clone());
    let modules = ctx.modules();
    let verified = modules.iter().all(|a| {
        modules.iter().all(|b| {
            let chi = lattice
                .euler_form(
                    &KClass::from_dim_vec(&ctx.algebra().dim_vec(a)),
                    &KClass::from_dim_vec(&ctx.algebra().dim_vec(b)),
                )
                .expect("same lattice");
            chi.min_exp().is_none_or(|m| m >= 0) && chi.max_exp().is_none_or(|m| m <= 1)
        })
    });
    XHomBound { n0: 1, verified }
}

/// Full verdict: global dimension, open/additive/closed flags, support data.
pub fn classify(
    ctx: &StabilityContext,
    charge: &HeartCharge,
    s: Complex64,
) -> Result<InducingVerdict> {
    let gldim = ctx.gldim(charge)?;
    let (additive_ok, witnesses) = additive_scan(ctx, &gldim.table, s);
    let gldim_plus_one = gldim.value.add_int(1);
    let open = cmp_vs_real(&gldim_plus_one, s.re) == std::cmp::Ordering::Less;
    let closed_ok = cmp_vs_real(&gldim_plus_one, s.re) != std::cmp::Ordering::Greater;
    debug_assert!(!open || (additive_ok && closed_ok));
    Ok(InducingVerdict {
        s_re: s.re,
        s_im: s.im,
        gldim: gldim.value.as_f64(),
        gldim_exact: gldim.value.as_exact().map(|r| (*r.numer(), *r.denom())),
        open,
        additive_ok,
        closed_ok,
        support_l: support_constant_of(&gldim.table),
        x_hom_bound: x_hom_bound(ctx).n0,
        witnesses,
    })
}

/// Phase upstairs: heart phase plus `m + l·Re(s)`.
#[derive(Clone, Copy, Debug)]
pub struct DxPhase {
    pub base: PhaseValue,
    pub z: i64,
    pub x: i64,
}

impl DxPhase {
    pub fn value(&self, s_re: f64) -> f64 {
        self.base.as_f64() + self.z as f64 + self.x as f64 * s_re
    }

    /// Structured difference, exact in the shift parts.
    pub fn gap(&self, other: &Self, s_re: f64) -> f64 {
        self.base.sub(&other.base).as_f64()
            + (self.z - other.z) as f64
            + (self.x - other.x) as f64 * s_re
    }
}

/// One Harder–Narasimhan factor upstairs.
#[derive(Clone, Debug)]
pub struct DxFactor {
    pub class: KClass,
    pub phase: DxPhase,
    pub parts: Vec<(IntervalModule, i64, i64)>,
}

/// Harder–Narasimhan factors of a formal sum of `M[m + lX]` under the induced
/// slicing: each summand contributes its heart factors at phase
/// `φ̂ + m + l·Re(s)`; refuses when the verdict is not open.
pub fn hn_dx(
    ctx: &StabilityContext,
    charge: &HeartCharge,
    s: Complex64,
    obj: &DXObject,
) -> Result<Vec<DxFactor>> {
    let verdict = classify(ctx, charge, s)?;
    if !verdict.open {
        return Err(Error::NotOpen { gldim: verdict.gldim, s_re: s.re });
    }
    let mut factors: Vec<DxFactor> = Vec::new();
    for &(module, m, l) in &obj.summands {
        let sign = if m.rem_euclid(2) == 0 { 1 } else { -1 };
        let scalar = LaurentInt::monomial(sign, l);
        for (dim, base, parts) in ctx.hn_module(charge, &module)? {
            factors.push(DxFactor {
                class: KClass::from_dim_vec(&dim).scalar_mul(&scalar)?,
                phase: DxPhase { base, z: m, x: l },
                parts: parts.into_iter().map(|p| (p, m, l)).collect(),
            });
        }
    }
    factors.sort_by(|a, b| {
        b.phase
            .value(s.re)
            .partial_cmp(&a.phase.value(s.re))
            .expect("finite phases")
    });
    let mut merged: Vec<DxFactor> = Vec::new();
    for f in factors {
        match merged.last_mut() {
            Some(last) if last.phase.value(s.re) == f.phase.value(s.re) => {
                last.class = last.class.checked_add(&f.class)?;
                last.parts.extend(f.parts);
            }
            _ => merged.push(f),
        }
    }
    Ok(merged)
}
