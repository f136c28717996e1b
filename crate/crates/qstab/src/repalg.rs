//! Explicit representations of type-A path algebras: interval modules,
//! Hom/Ext dimensions by intertwiner linear algebra, and submodule
//! enumeration. This is the finite combinatorial substrate that the
//! Harder–Narasimhan machinery runs on.

use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::quiver::{DynkinType, QuiverData};

/// An indecomposable module of a type-A path algebra, supported on a
/// contiguous interval of the underlying path.
///
/// `lo..=hi` are positions in path order, 0-indexed; the Gabriel bijection
/// with positive roots makes these an exhaustive list of indecomposables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntervalModule {
    pub lo: usize,
    pub hi: usize,
}

impl IntervalModule {
    pub fn len(&self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Dimension vectors of all submodules of one interval module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubmoduleSet {
    pub dims: Vec<Vec<i64>>,
}

impl SubmoduleSet {
    pub fn contains(&self, dim: &[i64]) -> bool {
        self.dims.iter().any(|d| d == dim)
    }
}

/// A type-A quiver together with its path order.
#[derive(Clone, Debug)]
pub struct PathAlgebraA {
    quiver: QuiverData,
    /// Vertex labels (1-indexed) in path order.
    order: Vec<usize>,
    /// `forward[k]` iff the arrow between positions `k` and `k+1` points
    /// from `k` to `k+1`.
    forward: Vec<bool>,
}

impl PathAlgebraA {
    pub fn new(quiver: QuiverData) -> Result<Self> {
        let n = quiver.vertex_count();
        match quiver.dynkin_type() {
            Some(DynkinType::A(_)) => {}
            other => {
                return Err(Error::NotTypeA(format!(
                    "underlying graph is {}",
                    other.map_or("not Dynkin".to_string(), |t| t.to_string())
                )))
            }
        }
        let degree = |v: usize| -> usize {
            (1..=n)
                .filter(|&w| w != v && (quiver.arrow_count(v, w) + quiver.arrow_count(w, v)) > 0)
                .count()
        };
        let mut order = Vec::with_capacity(n);
        if n == 1 {
            order.push(1);
        } else {
            let start = (1..=n).find(|&v| degree(v) == 1).expect("path has endpoints");
            let mut prev = 0usize;
            let mut cur = start;
            loop {
                order.push(cur);
                let next = (1..=n).find(|&w| {
                    w != cur
                        && w != prev
                        && (quiver.arrow_count(cur, w) + quiver.arrow_count(w, cur)) > 0
                });
                match next {
                    Some(w) => {
                        prev = cur;
                        cur = w;
                    }
                    None => break,
                }
            }
        }
        let forward = (0..n.saturating_sub(1))
            .map(|k| quiver.arrow_count(order[k], order[k + 1]) > 0)
            .collect();
        Ok(Self { quiver, order, forward })
    }

    pub fn quiver(&self) -> &QuiverData {
        &self.quiver
    }

    pub fn rank(&self) -> usize {
        self.order.len()
    }

    /// Vertex labels in path order.
    pub fn path_order(&self) -> &[usize] {
        &self.order
    }

    /// All `n(n+1)/2` interval modules.
    pub fn indecomposables(&self) -> Vec<IntervalModule> {
        let n = self.rank();
        let mut out = Vec::with_capacity(n * (n + 1) / 2);
        for lo in 0..n {
            for hi in lo..n {
                out.push(IntervalModule { lo, hi });
            }
        }
        out
    }

    /// The simple module at vertex `v` (1-indexed label).
    pub fn simple(&self, v: usize) -> Result<IntervalModule> {
        let pos = self
            .order
            .iter()
            .position(|&w| w == v)
            .ok_or(Error::VertexOutOfRange { index: v, n: self.rank() })?;
        Ok(IntervalModule { lo: pos, hi: pos })
    }

    /// Interval module spanning the vertices labelled `a` and `b`.
    pub fn module_between(&self, a: usize, b: usize) -> Result<IntervalModule> {
        let pa = self.simple(a)?.lo;
        let pb = self.simple(b)?.lo;
        Ok(IntervalModule { lo: pa.min(pb), hi: pa.max(pb) })
    }

    /// Dimension vector over the vertex labels `1..=n`.
    pub fn dim_vec(&self, m: &IntervalModule) -> Vec<i64> {
        let mut dim = vec![0i64; self.rank()];
        for pos in m.lo..=m.hi {
            dim[self.order[pos] - 1] = 1;
        }
        dim
    }

    pub fn display_module(&self, m: &IntervalModule) -> String {
        if m.lo == m.hi {
            format!("S{}", self.order[m.lo])
        } else {
            format!("M[{}..{}]", self.order[m.lo], self.order[m.hi])
        }
    }

    /// Explicit matrix form: one-dimensional spaces on the support, identity
    /// maps along arrows inside the support.
    pub fn explicit(&self, m: &IntervalModule) -> ExplicitRep {
        let n = self.rank();
        let mut dims = vec![0usize; n];
        for pos in m.lo..=m.hi {
            dims[self.order[pos] - 1] = 1;
        }
        let maps = self
            .quiver
            .arrows()
            .iter()
            .map(|&(u, v)| {
                if dims[u - 1] == 1 && dims[v - 1] == 1 {
                    vec![vec![1i64]]
                } else {
                    Vec::new()
                }
            })
            .collect();
        ExplicitRep { dims, maps }
    }

    /// `dim Hom(M, N)` computed by solving the intertwiner system on explicit
    /// matrices, exactly over the rationals.
    pub fn hom_dim(&self, m: &IntervalModule, n: &IntervalModule) -> usize {
        intertwiner_dim(self.quiver.arrows(), &self.explicit(m), &self.explicit(n))
    }

    /// `dim Hom(M, N)` by the combinatorial overlap rule: the intersection
    /// carries a nonzero map iff no arrow enters it from `M∖N` and no arrow
    /// leaves it into `N∖M`. Kept independent of [`Self::hom_dim`] as a
    /// cross-check.
    pub fn hom_dim_overlap(&self, m: &IntervalModule, n: &IntervalModule) -> usize {
        let lo = m.lo.max(n.lo);
        let hi = m.hi.min(n.hi);
        if lo > hi {
            return 0;
        }
        // left edge of the overlap
        if m.lo < lo && self.forward[lo - 1] {
            return 0; // arrow enters the overlap from M∖N
        }
        if n.lo < lo && !self.forward[lo - 1] {
            return 0; // arrow leaves the overlap into N∖M
        }
        // right edge of the overlap
        if m.hi > hi && !self.forward[hi] {
            return 0; // arrow enters the overlap from M∖N
        }
        if n.hi > hi && self.forward[hi] {
            return 0; // arrow leaves the overlap into N∖M
        }
        1
    }

    /// `dim Ext¹(M, N) = dim Hom(M, N) − χ₀(dim M, dim N)`; nonnegative for
    /// hereditary algebras.
    pub fn ext_dim(&self, m: &IntervalModule, n: &IntervalModule) -> usize {
        let hom = self.hom_dim(m, n) as i64;
        let chi = self.chi0(&self.dim_vec(m), &self.dim_vec(n));
        let ext = hom - chi;
        debug_assert!(ext >= 0, "negative Ext dimension");
        ext as usize
    }

    /// `χ₀(x, y) = Σ_i x_i y_i − Σ_{arrows i→j} x_i y_j`.
    pub fn chi0(&self, x: &[i64], y: &[i64]) -> i64 {
        let diag: i64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
        let arrows: i64 =
            self.quiver.arrows().iter().map(|&(u, v)| x[u - 1] * y[v - 1]).sum();
        diag - arrows
    }

    /// Supports (position sets, as sorted vectors) of all submodules of `m`:
    /// the subsets of the support closed under following arrows.
    pub fn submodule_supports(&self, m: &IntervalModule) -> Vec<Vec<usize>> {
        let len = m.len();
        let mut out = Vec::new();
        'subset: for bits in 0u32..(1u32 << len) {
            for k in 0..len.saturating_sub(1) {
                let here = bits >> k & 1 == 1;
                let next = bits >> (k + 1) & 1 == 1;
                let pos = m.lo + k;
                if self.forward[pos] {
                    if here && !next {
                        continue 'subset;
                    }
                } else if next && !here {
                    continue 'subset;
                }
            }
            let support: Vec<usize> =
                (0..len).filter(|&k| bits >> k & 1 == 1).map(|k| m.lo + k).collect();
            out.push(support);
        }
        out.sort_by_key(|s| (s.len(), s.clone()));
        out
    }

    /// All submodule dimension vectors of `m`, including zero and `m` itself.
    pub fn submodules(&self, m: &IntervalModule) -> SubmoduleSet {
        let dims = self
            .submodule_supports(m)
            .into_iter()
            .map(|support| {
                let mut dim = vec![0i64; self.rank()];
                for pos in support {
                    dim[self.order[pos] - 1] = 1;
                }
                dim
            })
            .collect();
        SubmoduleSet { dims }
    }

    /// Splits a set of positions into its contiguous runs (interval modules).
    pub fn components(&self, positions: &[usize]) -> Vec<IntervalModule> {
        let mut sorted = positions.to_vec();
        sorted.sort_unstable();
        let mut out = Vec::new();
        let mut iter = sorted.into_iter();
        if let Some(first) = iter.next() {
            let mut lo = first;
            let mut hi = first;
            for p in iter {
                if p == hi + 1 {
                    hi = p;
                } else {
                    out.push(IntervalModule { lo, hi });
                    lo = p;
                    hi = p;
                }
            }
            out.push(IntervalModule { lo, hi });
        }
        out
    }
}

/// A quiver representation as explicit integer matrices; `maps[k]` is the
/// matrix of the `k`-th arrow (rows = target, columns = source), empty when
/// either endpoint is zero.
#[derive(Clone, Debug)]
pub struct ExplicitRep {
    pub dims: Vec<usize>,
    pub maps: Vec<Vec<Vec<i64>>>,
}

/// Dimension of the space of intertwiners `f: M → N` between two explicit
/// representations over the same quiver, by exact rational elimination.
pub fn intertwiner_dim(arrows: &[(usize, usize)], m: &ExplicitRep, n: &ExplicitRep) -> usize {
    let nv = m.dims.len();
    // unknowns: entries of f_v, a (n.dims[v] × m.dims[v]) matrix per vertex
    let mut offsets = vec![0usize; nv + 1];
    for v in 0..nv {
        offsets[v + 1] = offsets[v] + n.dims[v] * m.dims[v];
    }
    let unknowns = offsets[nv];
    if unknowns == 0 {
        return 0;
    }
    let mut rows: Vec<Vec<Rational64>> = Vec::new();
    for (k, &(u, v)) in arrows.iter().enumerate() {
        let (u, v) = (u - 1, v - 1);
        // equation f_v · M_a − N_a · f_u = 0, one scalar equation per
        // (target row of N_v, source column of M_u)
        for r in 0..n.dims[v] {
            for c in 0..m.dims[u] {
                let mut row = vec![Rational64::from_integer(0); unknowns];
                // (f_v · M_a)[r][c] = Σ_t f_v[r][t] · M_a[t][c]
                for t in 0..m.dims[v] {
                    let coeff = m.maps[k][t][c];
                    if coeff != 0 {
                        row[offsets[v] + r * m.dims[v] + t] += Rational64::from_integer(coeff);
                    }
                }
                // (N_a · f_u)[r][c] = Σ_t N_a[r][t] · f_u[t][c]
                for t in 0..n.dims[u] {
                    let coeff = n.maps[k][r][t];
                    if coeff != 0 {
                        row[offsets[u] + t * m.dims[u] + c] -= Rational64::from_integer(coeff);
                    }
                }
                if row.iter().any(|x| *x != Rational64::from_integer(0)) {
                    rows.push(row);
                }
            }
        }
    }
    unknowns - rational_rank(rows)
}

/// Rank of a rational matrix by Gaussian elimination with exact pivoting.
pub fn rational_rank(mut rows: Vec<Vec<Rational64>>) -> usize {
    let zero = Rational64::from_integer(0);
    let mut rank = 0;
    let cols = rows.first().map_or(0, Vec::len);
    let mut pivot_row = 0;
    for col in 0..cols {
        let Some(found) = (pivot_row..rows.len()).find(|&r| rows[r][col] != zero) else {
            continue;
        };
        rows.swap(pivot_row, found);
        let pivot = rows[pivot_row][col];
        for r in (pivot_row + 1)..rows.len() {
            if rows[r][col] != zero {
                let factor = rows[r][col] / pivot;
                for c in col..cols {
                    let sub = rows[pivot_row][c] * factor;
                    rows[r][c] -= sub;
                }
            }
        }
        pivot_row += 1;
        rank += 1;
        if pivot_row == rows.len() {
            break;
        }
    }
    rank
}
