//! Acyclic quivers, ADE presets, q-deformed Cartan matrices, and classical
//! root systems with Weyl reflections.
//!
//! Vertices are 1-indexed throughout the public API.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::LaurentInt;

/// A finite acyclic quiver with arrow multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuiverData {
    n: usize,
    arrows: Vec<(usize, usize)>,
    /// `b[i][j]` = number of arrows `i+1 → j+1`.
    b: Vec<Vec<i64>>,
}

/// JSON schema: `{"vertices": n, "arrows": [[i, j], ...]}`.
#[derive(Serialize, Deserialize)]
struct QuiverJson {
    vertices: usize,
    arrows: Vec<(usize, usize)>,
}

impl QuiverData {
    pub fn new(n: usize, arrows: Vec<(usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("quiver needs at least one vertex".into()));
        }
        let mut b = vec![vec![0i64; n]; n];
        for &(i, j) in &arrows {
            for &v in &[i, j] {
                if v == 0 || v > n {
                    return Err(Error::VertexOutOfRange { index: v, n });
                }
            }
            b[i - 1][j - 1] += 1;
        }
        let q = Self { n, arrows, b };
        if let Some(witness) = q.find_cycle() {
            return Err(Error::CyclicQuiver { witness });
        }
        Ok(q)
    }

    /// Named presets: `"A2"`, `"D4"`, `"E8"`, ..., plus `"Kronecker"`.
    ///
    /// Chains are oriented `1 → 2 → ⋯`; the branch vertex of D/E types points
    /// to the extra vertex.
    pub fn preset(name: &str) -> Result<Self> {
        let name = name.trim();
        if name.eq_ignore_ascii_case("kronecker") {
            return Self::new(2, vec![(1, 2), (1, 2)]);
        }
        let (letter, rank_str) = name.split_at(1);
        let rank: usize = rank_str
            .parse()
            .map_err(|_| Error::Parse(format!("unknown quiver preset {name:?}")))?;
        let chain = |len: usize| (1..len).map(|i| (i, i + 1)).collect::<Vec<_>>();
        match letter {
            "A" | "a" if rank >= 1 => Self::new(rank, chain(rank)),
            "D" | "d" if rank >= 4 => {
                let mut arrows = chain(rank - 1);
                arrows.push((rank - 2, rank));
                Self::new(rank, arrows)
            }
            "E" | "e" if (6..=8).contains(&rank) => {
                let mut arrows = chain(rank - 1);
                arrows.push((3, rank));
                Self::new(rank, arrows)
            }
            _ => Err(Error::Parse(format!("unknown quiver preset {name:?}"))),
        }
    }

    /// Loads a preset name or a JSON file path / JSON literal.
    pub fn from_spec(spec: &str) -> Result<Self> {
        let trimmed = spec.trim();
        if trimmed.starts_with('{') {
            return Self::from_json_str(trimmed);
        }
        if std::path::Path::new(trimmed).is_file() {
            let text = std::fs::read_to_string(trimmed)
                .map_err(|e| Error::Parse(format!("cannot read {trimmed:?}: {e}")))?;
            return Self::from_json_str(&text);
        }
        Self::preset(trimmed)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let parsed: QuiverJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("quiver JSON: {e}")))?;
        Self::new(parsed.vertices, parsed.arrows)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&QuiverJson {
            vertices: self.n,
            arrows: self.arrows.clone(),
        })
        .expect("quiver JSON serialization")
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn arrows(&self) -> &[(usize, usize)] {
        &self.arrows
    }

    /// Arrow multiplicity `b_{ij}` (1-indexed).
    pub fn arrow_count(&self, i: usize, j: usize) -> i64 {
        self.b[i - 1][j - 1]
    }

    pub fn multiplicity_matrix(&self) -> &[Vec<i64>] {
        &self.b
    }

    fn find_cycle(&self) -> Option<Vec<usize>> {
        // DFS with tricolor marking; returns the vertices of a directed cycle.
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            White,
            Grey,
            Black,
        }
        let mut mark = vec![Mark::White; self.n];
        let mut parent = vec![usize::MAX; self.n];
        for start in 0..self.n {
            if mark[start] != Mark::White {
                continue;
            }
            let mut stack = vec![start];
            mark[start] = Mark::Grey;
            while let Some(&v) = stack.last() {
                let next = (0..self.n).find(|&w| {
                    self.b[v][w] > 0 && (mark[w] == Mark::White || mark[w] == Mark::Grey)
                });
                match next {
                    Some(w) if mark[w] == Mark::Grey => {
                        // unwind the stack to recover the cycle
                        let mut cycle = vec![w + 1];
                        let mut cur = v;
                        while cur != w {
                            cycle.push(cur + 1);
                            cur = parent[cur];
                        }
                        cycle.reverse();
                        return Some(cycle);
                    }
                    Some(w) => {
                        parent[w] = v;
                        mark[w] = Mark::Grey;
                        stack.push(w);
                    }
                    None => {
                        mark[v] = Mark::Black;
                        stack.pop();
                    }
                }
            }
        }
        None
    }

    /// The q-deformed Cartan matrix `a(q)_{ij} = δ_ij + qδ_ji − (b_ij + q·b_ji)`.
    pub fn q_cartan(&self) -> QCartan {
        let n = self.n;
        let mut entries = vec![vec![LaurentInt::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let delta = if i == j { 1 } else { 0 };
                let constant = delta - self.b[i][j];
                let linear = delta - self.b[j][i];
                entries[i][j] =
                    LaurentInt::from_terms([(0, constant), (1, linear)]).expect("tiny coefficients");
            }
        }
        QCartan { n, entries }
    }

    /// Classical (generalized) Cartan matrix, the `q = 1` specialization.
    pub fn cartan_at_one(&self) -> Vec<Vec<i64>> {
        let qc = self.q_cartan();
        (0..self.n)
            .map(|i| (0..self.n).map(|j| qc.entry(i + 1, j + 1).eval_at_sign(0).unwrap()).collect())
            .collect()
    }

    /// Underlying undirected adjacency (sum of multiplicities both ways).
    fn undirected_adj(&self) -> Vec<Vec<i64>> {
        let mut adj = vec![vec![0i64; self.n]; self.n];
        for i in 0..self.n {
            for j in 0..self.n {
                adj[i][j] = self.b[i][j] + self.b[j][i];
            }
        }
        adj
    }

    /// Detects the ADE type of the underlying graph, if any.
    pub fn dynkin_type(&self) -> Option<DynkinType> {
        let adj = self.undirected_adj();
        let n = self.n;
        // must be a simple graph (single edges) forming a tree
        let mut edge_count = 0i64;
        for i in 0..n {
            for j in (i + 1)..n {
                if adj[i][j] > 1 {
                    return None;
                }
                edge_count += adj[i][j];
            }
        }
        if edge_count != (n as i64) - 1 || !self.is_connected(&adj) {
            return None;
        }
        let degrees: Vec<usize> =
            (0..n).map(|i| (0..n).filter(|&j| adj[i][j] > 0).count()).collect();
        if degrees.iter().any(|&d| d > 3) {
            return None;
        }
        let branch_nodes: Vec<usize> = (0..n).filter(|&i| degrees[i] == 3).collect();
        match branch_nodes.len() {
            0 => Some(DynkinType::A(n)),
            1 => {
                let center = branch_nodes[0];
                let mut arms: Vec<usize> = (0..n)
                    .filter(|&j| adj[center][j] > 0)
                    .map(|first| {
                        let mut len = 1;
                        let mut prev = center;
                        let mut cur = first;
                        loop {
                            let next = (0..n).find(|&k| adj[cur][k] > 0 && k != prev);
                            match next {
                                Some(k) => {
                                    prev = cur;
                                    cur = k;
                                    len += 1;
                                }
                                None => break len,
                            }
                        }
                    })
                    .collect();
                arms.sort_unstable();
                match arms.as_slice() {
                    [1, 1, m] => Some(DynkinType::D(m + 3)),
                    [1, 2, 2] => Some(DynkinType::E(6)),
                    [1, 2, 3] => Some(DynkinType::E(7)),
                    [1, 2, 4] => Some(DynkinType::E(8)),
                    _ => None,
                }
            }
            _ => None,
        }
    }

    fn is_connected(&self, adj: &[Vec<i64>]) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for w in 0..self.n {
                if adj[v][w] > 0 && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// The quiver with vertices relabeled by `perm` (vertex `i ↦ perm[i-1]`).
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "permutation of length {} on {} vertices",
                perm.len(),
                self.n
            )));
        }
        let arrows = self.arrows.iter().map(|&(i, j)| (perm[i - 1], perm[j - 1])).collect();
        Self::new(self.n, arrows)
    }

    /// Enumerates the positive roots and packages the classical root system.
    pub fn root_system(&self) -> Result<RootSystem> {
        let dynkin = self
            .dynkin_type()
            .ok_or_else(|| Error::NotDynkin("positive roots are finite only for ADE types".into()))?;
        let cartan1 = self.cartan_at_one();
        let n = self.n;

        // reflection closure from the simple roots; keep nonnegative vectors
        let reflect = |alpha: &[i64], i: usize| -> Vec<i64> {
            let pairing: i64 = (0..n).map(|j| alpha[j] * cartan1[j][i]).sum();
            let mut out = alpha.to_vec();
            out[i] -= pairing;
            out
        };
        let mut roots: Vec<Vec<i64>> = (0..n)
            .map(|i| {
                let mut e = vec![0i64; n];
                e[i] = 1;
                e
            })
            .collect();
        let mut seen: std::collections::BTreeSet<Vec<i64>> = roots.iter().cloned().collect();
        let mut queue: std::collections::VecDeque<Vec<i64>> = roots.iter().cloned().collect();
        while let Some(alpha) = queue.pop_front() {
            for i in 0..n {
                let beta = reflect(&alpha, i);
                if beta.iter().all(|&c| c >= 0) && seen.insert(beta.clone()) {
                    roots.push(beta.clone());
                    queue.push_back(beta);
                }
            }
        }
        roots.sort_by_key(|r| (r.iter().sum::<i64>(), r.clone()));

        let coxeter_h = dynkin.coxeter_number();
        if roots.len() * 2 != n * coxeter_h {
            return Err(Error::Domain(format!(
                "positive root count {} disagrees with n·h/2 = {}",
                roots.len(),
                n * coxeter_h / 2
            )));
        }
        Ok(RootSystem {
            dynkin,
            positive_roots: roots,
            cartan1,
            coxeter_h,
        })
    }
}

/// One of the simply-laced Dynkin types.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DynkinType {
    A(usize),
    D(usize),
    E(usize),
}

impl DynkinType {
    pub fn rank(&self) -> usize {
        match *self {
            DynkinType::A(n) | DynkinType::D(n) | DynkinType::E(n) => n,
        }
    }

    /// Standard Coxeter numbers: `A_n → n+1`, `D_n → 2n−2`, `E6/E7/E8 → 12/18/30`.
    pub fn coxeter_number(&self) -> usize {
        match *self {
            DynkinType::A(n) => n + 1,
            DynkinType::D(n) => 2 * n - 2,
            DynkinType::E(6) => 12,
            DynkinType::E(7) => 18,
            DynkinType::E(8) => 30,
            DynkinType::E(n) => unreachable!("E{n} is not a Dynkin type"),
        }
    }
}

impl std::fmt::Display for DynkinType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            DynkinType::A(n) => write!(f, "A{n}"),
            DynkinType::D(n) => write!(f, "D{n}"),
            DynkinType::E(n) => write!(f, "E{n}"),
        }
    }
}

/// The q-deformed Cartan matrix of a quiver.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QCartan {
    n: usize,
    entries: Vec<Vec<LaurentInt>>,
}

impl QCartan {
    pub fn size(&self) -> usize {
        self.n
    }

    /// Entry `a(q)_{ij}` with 1-indexed vertices.
    pub fn entry(&self, i: usize, j: usize) -> &LaurentInt {
        &self.entries[i - 1][j - 1]
    }

    pub fn rows(&self) -> &[Vec<LaurentInt>] {
        &self.entries
    }

    /// Exact check of `A(q)ᵀ = q·A(q⁻¹)`.
    pub fn is_skew_symmetric(&self) -> bool {
        let q = LaurentInt::q();
        (0..self.n).all(|i| {
            (0..self.n).all(|j| self.entries[j][i] == &q * &self.entries[i][j].bar())
        })
    }
}

/// Positive roots, classical Cartan data and the Coxeter number of an ADE quiver.
#[derive(Clone, Debug)]
pub struct RootSystem {
    dynkin: DynkinType,
    positive_roots: Vec<Vec<i64>>,
    cartan1: Vec<Vec<i64>>,
    coxeter_h: usize,
}

impl RootSystem {
    pub fn dynkin(&self) -> DynkinType {
        self.dynkin
    }

    pub fn rank(&self) -> usize {
        self.cartan1.len()
    }

    pub fn positive_roots(&self) -> &[Vec<i64>] {
        &self.positive_roots
    }

    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan1
    }

    pub fn coxeter_number(&self) -> usize {
        self.coxeter_h
    }

    /// Matrix of the simple reflection `r_i` on the root lattice (1-indexed),
    /// columns = images of the simple roots.
    pub fn simple_reflection(&self, i: usize) -> Vec<Vec<i64>> {
        let n = self.rank();
        let mut m = vec![vec![0i64; n]; n];
        for j in 0..n {
            m[j][j] = 1;
            m[i - 1][j] -= self.cartan1[j][i - 1];
        }
        m
    }
}
