//! The q-deformed root lattice: K-classes over the Laurent ring, the
//! q-bilinear and Euler forms, q-reflections, the K-theory action of spherical
//! twists, braid words, and the relation checks (commuting/braid/Hecke) as
//! exact matrix identities.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::quiver::{QCartan, QuiverData};
use crate::ring::{ComplexScalar, LaurentInt};

/// Element of the rank-`n` free module over `Z[q,q⁻¹]`, written in the basis
/// of simple classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KClass {
    coords: Vec<LaurentInt>,
}

impl KClass {
    pub fn zero(n: usize) -> Self {
        Self { coords: vec![LaurentInt::zero(); n] }
    }

    /// The class of the `i`-th simple object (1-indexed).
    pub fn simple(n: usize, i: usize) -> Result<Self> {
        if i == 0 || i > n {
            return Err(Error::VertexOutOfRange { index: i, n });
        }
        let mut out = Self::zero(n);
        out.coords[i - 1] = LaurentInt::one();
        Ok(out)
    }

    pub fn from_coords(coords: Vec<LaurentInt>) -> Self {
        Self { coords }
    }

    pub fn from_dim_vec(dim: &[i64]) -> Self {
        Self { coords: dim.iter().map(|&d| LaurentInt::constant(d)).collect() }
    }

    pub fn from_strings(coords: &[String]) -> Result<Self> {
        let coords = coords.iter().map(|s| s.parse()).collect::<Result<Vec<_>>>()?;
        Ok(Self { coords })
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(LaurentInt::is_zero)
    }

    pub fn coords(&self) -> &[LaurentInt] {
        &self.coords
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        same_len(self.len(), rhs.len())?;
        let coords = self
            .coords
            .iter()
            .zip(&rhs.coords)
            .map(|(a, b)| a.checked_add(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { coords })
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self> {
        same_len(self.len(), rhs.len())?;
        let coords = self
            .coords
            .iter()
            .zip(&rhs.coords)
            .map(|(a, b)| a.checked_sub(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { coords })
    }

    pub fn scalar_mul(&self, c: &LaurentInt) -> Result<Self> {
        let coords =
            self.coords.iter().map(|a| a.checked_mul(c)).collect::<Result<Vec<_>>>()?;
        Ok(Self { coords })
    }

    pub fn specialize(&self, s: ComplexScalar) -> Vec<ComplexScalar> {
        self.coords.iter().map(|c| c.specialize(s)).collect()
    }
}

impl Serialize for KClass {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let strings: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        strings.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for KClass {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let strings = Vec::<String>::deserialize(deserializer)?;
        KClass::from_strings(&strings).map_err(D::Error::custom)
    }
}

/// An `R`-linear endomorphism of the lattice, stored as an exact `n×n`
/// Laurent matrix acting on coordinate columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RLinearMap {
    n: usize,
    rows: Vec<Vec<LaurentInt>>,
}

impl RLinearMap {
    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { LaurentInt::one() } else { LaurentInt::zero() })
                    .collect()
            })
            .collect();
        Self { n, rows }
    }

    pub fn from_rows(rows: Vec<Vec<LaurentInt>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("matrix must be square".into()));
        }
        Ok(Self { n, rows })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Entry in row `i`, column `j` (0-indexed; this is coordinate bookkeeping,
    /// not vertex labelling).
    pub fn entry(&self, i: usize, j: usize) -> &LaurentInt {
        &self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<LaurentInt>] {
        &self.rows
    }

    pub fn is_identity(&self) -> bool {
        self == &Self::identity(self.n)
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.iter().all(LaurentInt::is_zero))
    }

    /// Matrix product `self · rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        same_len(self.n, rhs.n)?;
        let mut rows = vec![vec![LaurentInt::zero(); self.n]; self.n];
        for i in 0..self.n {
            for (j, out) in rows[i].iter_mut().enumerate() {
                let mut acc = LaurentInt::zero();
                for k in 0..self.n {
                    acc = acc.checked_add(&self.rows[i][k].checked_mul(&rhs.rows[k][j])?)?;
                }
                *out = acc;
            }
        }
        Ok(Self { n: self.n, rows })
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        same_len(self.n, rhs.n)?;
        let rows = self
            .rows
            .iter()
            .zip(&rhs.rows)
            .map(|(a, b)| {
                a.iter().zip(b).map(|(x, y)| x.checked_add(y)).collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n: self.n, rows })
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self> {
        same_len(self.n, rhs.n)?;
        let rows = self
            .rows
            .iter()
            .zip(&rhs.rows)
            .map(|(a, b)| {
                a.iter().zip(b).map(|(x, y)| x.checked_sub(y)).collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n: self.n, rows })
    }

    pub fn scalar_mul(&self, c: &LaurentInt) -> Result<Self> {
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|x| x.checked_mul(c)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n: self.n, rows })
    }

    pub fn apply(&self, x: &KClass) -> Result<KClass> {
        same_len(self.n, x.len())?;
        let coords = self
            .rows
            .iter()
            .map(|row| {
                let mut acc = LaurentInt::zero();
                for (a, b) in row.iter().zip(x.coords()) {
                    acc = acc.checked_add(&a.checked_mul(b)?)?;
                }
                Ok(acc)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(KClass::from_coords(coords))
    }

    /// Complex specialization `q ↦ e^{iπs}` of every entry.
    pub fn specialize(&self, s: ComplexScalar) -> Vec<Vec<ComplexScalar>> {
        self.rows.iter().map(|r| r.iter().map(|c| c.specialize(s)).collect()).collect()
    }

    /// Exact integer matrix at `q = (−1)^N`.
    pub fn eval_at_sign(&self, n_parity: i64) -> Result<Vec<Vec<i64>>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|c| c.eval_at_sign(n_parity)).collect())
            .collect()
    }
}

fn same_len(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!("{a} vs {b}")))
    }
}

/// Status of one generator pair in the relation report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelationKind {
    Commuting,
    Braid,
    /// Pairs joined by multiple arrows carry no asserted relation.
    NoneAsserted,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairRelation {
    pub pair: (usize, usize),
    pub relation: RelationKind,
    pub status: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RelationReport {
    pub pairs: Vec<PairRelation>,
}

impl RelationReport {
    pub fn all_asserted_pass(&self) -> bool {
        self.pairs
            .iter()
            .filter(|p| p.relation != RelationKind::NoneAsserted)
            .all(|p| p.status == "pass")
    }
}

/// The q-deformed root lattice of a quiver with its precomputed twist action.
///
/// Twist matrices are computed once from the Euler form, so every relation
/// check below is a structural identity of Laurent matrices.
#[derive(Clone, Debug)]
pub struct QLattice {
    quiver: QuiverData,
    cartan: QCartan,
    twist: Vec<RLinearMap>,
    twist_inv: Vec<RLinearMap>,
}

impl QLattice {
    pub fn new(quiver: QuiverData) -> Self {
        let cartan = quiver.q_cartan();
        let n = quiver.vertex_count();
        let mut twist = Vec::with_capacity(n);
        let mut twist_inv = Vec::with_capacity(n);
        for i in 1..=n {
            // [Φ_i](α_j) = α_j − χ(S_i, S_j)(q⁻¹)·α_i
            let mut fwd = RLinearMap::identity(n);
            // [Φ_i]⁻¹(α_j) = α_j − χ(S_j, S_i)(q)·α_i
            let mut inv = RLinearMap::identity(n);
            for j in 0..n {
                let chi_ij = euler_simple(&quiver, i, j + 1);
                let chi_ji = euler_simple(&quiver, j + 1, i);
                fwd.rows[i - 1][j] =
                    fwd.rows[i - 1][j].checked_sub(&chi_ij.bar()).expect("tiny coefficients");
                inv.rows[i - 1][j] =
                    inv.rows[i - 1][j].checked_sub(&chi_ji).expect("tiny coefficients");
            }
            debug_assert!(fwd.compose(&inv).unwrap().is_identity());
            twist.push(fwd);
            twist_inv.push(inv);
        }
        Self { quiver, cartan, twist, twist_inv }
    }

    pub fn quiver(&self) -> &QuiverData {
        &self.quiver
    }

    pub fn rank(&self) -> usize {
        self.quiver.vertex_count()
    }

    fn check_vertex(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.rank() {
            return Err(Error::VertexOutOfRange { index: i, n: self.rank() });
        }
        Ok(())
    }

    /// The q-deformed bilinear form `(x, y)_q`, the R-bilinear extension of
    /// `(α_i, α_j)_q = a(q)_{ij}`.
    pub fn bilinear_form(&self, x: &KClass, y: &KClass) -> Result<LaurentInt> {
        let n = self.rank();
        same_len(x.len(), n)?;
        same_len(y.len(), n)?;
        let mut acc = LaurentInt::zero();
        for i in 0..n {
            if x.coords()[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y.coords()[j].is_zero() {
                    continue;
                }
                let term = x.coords()[i]
                    .checked_mul(&y.coords()[j])?
                    .checked_mul(self.cartan.entry(i + 1, j + 1))?;
                acc = acc.checked_add(&term)?;
            }
        }
        Ok(acc)
    }

    /// Euler form `χ(x, y)(q)`, extended R-bilinearly from
    /// `χ(S_i, S_j) = χ₀(S_i, S_j) + q·χ₀(S_j, S_i)` with
    /// `χ₀(S_i, S_j) = δ_ij − b_ij`.
    ///
    /// Computed from the arrow counts, independently of the Cartan matrix;
    /// agreement with [`Self::bilinear_form`] on simples is a theorem, not a
    /// definition.
    pub fn euler_form(&self, x: &KClass, y: &KClass) -> Result<LaurentInt> {
        let n = self.rank();
        same_len(x.len(), n)?;
        same_len(y.len(), n)?;
        let mut acc = LaurentInt::zero();
        for i in 0..n {
            if x.coords()[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y.coords()[j].is_zero() {
                    continue;
                }
                let chi = euler_simple(&self.quiver, i + 1, j + 1);
                let term = x.coords()[i].checked_mul(&y.coords()[j])?.checked_mul(&chi)?;
                acc = acc.checked_add(&term)?;
            }
        }
        Ok(acc)
    }

    /// `r_i^q(x) = x − (x, α_i)_q·α_i`.
    pub fn reflect(&self, i: usize, x: &KClass) -> Result<KClass> {
        self.check_vertex(i)?;
        let alpha_i = KClass::simple(self.rank(), i)?;
        let pairing = self.bilinear_form(x, &alpha_i)?;
        x.checked_sub(&alpha_i.scalar_mul(&pairing)?)
    }

    /// `(r_i^q)⁻¹(x) = x − (α_i, x)_{q⁻¹}·α_i`.
    pub fn reflect_inv(&self, i: usize, x: &KClass) -> Result<KClass> {
        self.check_vertex(i)?;
        let n = self.rank();
        let alpha_i = KClass::simple(n, i)?;
        // (α_i, x)_{q⁻¹}: pair with the bar-twisted Cartan entries
        let mut pairing = LaurentInt::zero();
        for j in 0..n {
            let a_ij_bar = self.cartan.entry(i, j + 1).bar();
            pairing = pairing.checked_add(&a_ij_bar.checked_mul(&x.coords()[j])?)?;
        }
        x.checked_sub(&alpha_i.scalar_mul(&pairing)?)
    }

    pub fn reflect_matrix(&self, i: usize) -> Result<RLinearMap> {
        self.matrix_of(|x| self.reflect(i, x))
    }

    pub fn reflect_inv_matrix(&self, i: usize) -> Result<RLinearMap> {
        self.matrix_of(|x| self.reflect_inv(i, x))
    }

    fn matrix_of(&self, f: impl Fn(&KClass) -> Result<KClass>) -> Result<RLinearMap> {
        let n = self.rank();
        let mut rows = vec![vec![LaurentInt::zero(); n]; n];
        for j in 1..=n {
            let image = f(&KClass::simple(n, j)?)?;
            for (idx, value) in image.coords().iter().enumerate() {
                rows[idx][j - 1] = value.clone();
            }
        }
        RLinearMap::from_rows(rows)
    }

    /// K-theory action of the spherical twist at vertex `i`.
    pub fn twist_class(&self, i: usize, x: &KClass) -> Result<KClass> {
        self.check_vertex(i)?;
        self.twist[i - 1].apply(x)
    }

    pub fn twist_class_inv(&self, i: usize, x: &KClass) -> Result<KClass> {
        self.check_vertex(i)?;
        self.twist_inv[i - 1].apply(x)
    }

    pub fn twist_matrix(&self, i: usize) -> Result<&RLinearMap> {
        self.check_vertex(i)?;
        Ok(&self.twist[i - 1])
    }

    pub fn twist_inv_matrix(&self, i: usize) -> Result<&RLinearMap> {
        self.check_vertex(i)?;
        Ok(&self.twist_inv[i - 1])
    }

    /// Applies a braid word left to right; generator `+i` acts by the twist at
    /// vertex `i`, `−i` by its inverse.
    pub fn braid_word_apply(&self, word: &[i64], x: &KClass) -> Result<KClass> {
        let mut out = x.clone();
        for &g in word {
            let i = g.unsigned_abs() as usize;
            if g == 0 {
                return Err(Error::VertexOutOfRange { index: 0, n: self.rank() });
            }
            out = if g > 0 { self.twist_class(i, &out)? } else { self.twist_class_inv(i, &out)? };
        }
        Ok(out)
    }

    /// The exact matrix of a braid word (letters applied left to right).
    pub fn braid_word_matrix(&self, word: &[i64]) -> Result<RLinearMap> {
        let mut out = RLinearMap::identity(self.rank());
        for &g in word {
            let i = g.unsigned_abs() as usize;
            self.check_vertex(i)?;
            let m = if g > 0 { &self.twist[i - 1] } else { &self.twist_inv[i - 1] };
            out = m.compose(&out)?;
        }
        Ok(out)
    }

    /// Checks `(−r_i^q − q)(−r_i^q + 1) = 0` as an exact matrix identity.
    pub fn verify_hecke_quadratic(&self, i: usize) -> Result<bool> {
        let r = self.reflect_matrix(i)?;
        let n = self.rank();
        let q_id = RLinearMap::identity(n).scalar_mul(&LaurentInt::q())?;
        let lhs = r.checked_add(&q_id)?; // −(−r − q)
        let rhs = r.checked_sub(&RLinearMap::identity(n))?; // −(−r + 1)
        Ok(lhs.compose(&rhs)?.is_zero())
    }

    /// Checks the commuting/braid relations of the twist matrices for every
    /// vertex pair, following the classical-Cartan dichotomy: `a(1)_ij = 0`
    /// requires commuting, `a(1)_ij = −1` requires the braid relation, and
    /// pairs with `a(1)_ij ≤ −2` carry no asserted relation.
    pub fn verify_braid_relations(&self) -> RelationReport {
        let n = self.rank();
        let cartan1 = self.quiver.cartan_at_one();
        let mut pairs = Vec::new();
        for i in 1..=n {
            for j in (i + 1)..=n {
                let a_ij = cartan1[i - 1][j - 1];
                let (relation, ok) = match a_ij {
                    0 => {
                        let lhs = self.twist[i - 1].compose(&self.twist[j - 1]).unwrap();
                        let rhs = self.twist[j - 1].compose(&self.twist[i - 1]).unwrap();
                        (RelationKind::Commuting, Some(lhs == rhs))
                    }
                    -1 => {
                        let lhs = self.twist[i - 1]
                            .compose(&self.twist[j - 1])
                            .unwrap()
                            .compose(&self.twist[i - 1])
                            .unwrap();
                        let rhs = self.twist[j - 1]
                            .compose(&self.twist[i - 1])
                            .unwrap()
                            .compose(&self.twist[j - 1])
                            .unwrap();
                        (RelationKind::Braid, Some(lhs == rhs))
                    }
                    _ => (RelationKind::NoneAsserted, None),
                };
                let status = match ok {
                    Some(true) => "pass".to_string(),
                    Some(false) => "fail".to_string(),
                    None => "not-asserted".to_string(),
                };
                pairs.push(PairRelation { pair: (i, j), relation, status });
            }
        }
        RelationReport { pairs }
    }

    /// Class of `x[m + lX]`, i.e. scalar multiplication by `(−1)^m·q^l`.
    pub fn k_shift(&self, x: &KClass, m: i64, l: i64) -> Result<KClass> {
        let sign = if m.rem_euclid(2) == 0 { 1 } else { -1 };
        x.scalar_mul(&LaurentInt::monomial(sign, l))
    }

    /// Collapse to the integer lattice by `q ↦ (−1)^N`.
    pub fn n_reduce(&self, x: &KClass, n_param: i64) -> Result<Vec<i64>> {
        x.coords().iter().map(|c| c.eval_at_sign(n_param)).collect()
    }
}

/// `χ(S_i, S_j) = δ_ij − b_ij + q(δ_ji − b_ji)` (1-indexed).
fn euler_simple(quiver: &QuiverData, i: usize, j: usize) -> LaurentInt {
    let delta = if i == j { 1 } else { 0 };
    LaurentInt::from_terms([
        (0, delta - quiver.arrow_count(i, j)),
        (1, delta - quiver.arrow_count(j, i)),
    ])
    .expect("tiny coefficients")
}

/// Applies an integer matrix to an integer vector with checked arithmetic.
pub fn apply_int_matrix(m: &[Vec<i64>], x: &[i64]) -> Result<Vec<i64>> {
    m.iter()
        .map(|row| {
            let mut acc: i64 = 0;
            for (a, b) in row.iter().zip(x) {
                acc = acc
                    .checked_add(a.checked_mul(*b).ok_or(Error::ArithmeticOverflow)?)
                    .ok_or(Error::ArithmeticOverflow)?;
            }
            Ok(acc)
        })
        .collect()
}
