#![allow(dead_code)] // each integration suite uses a subset of these helpers

//! Brute-force oracles shared by the integration suites. Everything here
//! recomputes structure from explicit matrices, independently of the library
//! code paths it certifies.

use qstab::repalg::{IntervalModule, PathAlgebraA};
use qstab::stability::HeartCharge;

/// All submodule dimension vectors of `m` by explicit subspace search over
/// the two-element field: a family of vertex subspaces (0 or the full line)
/// is a subrepresentation iff every arrow matrix maps it into itself.
pub fn brute_force_submodules(alg: &PathAlgebraA, m: &IntervalModule) -> Vec<Vec<i64>> {
    let rep = alg.explicit(m);
    let nv = rep.dims.len();
    let support: Vec<usize> = (0..nv).filter(|&v| rep.dims[v] == 1).collect();
    let arrows = alg.quiver().arrows().to_vec();
    let mut out = Vec::new();
    'subset: for bits in 0u32..(1u32 << support.len()) {
        let mut selected = vec![false; nv];
        for (pos, &v) in support.iter().enumerate() {
            selected[v] = bits >> pos & 1 == 1;
        }
        for (k, &(u, v)) in arrows.iter().enumerate() {
            let map_nonzero = !rep.maps[k].is_empty() && rep.maps[k][0][0] != 0;
            if map_nonzero && selected[u - 1] && !selected[v - 1] {
                continue 'subset;
            }
        }
        out.push((0..nv).map(|v| i64::from(selected[v])).collect());
    }
    out.sort();
    out
}

/// Certificate that `dim` (a sum of interval parts, all of the same phase) is
/// semistable: no brute-force submodule of any part has a phase beyond the
/// part's own by more than the tolerance.
pub fn certify_semistable_parts(
    alg: &PathAlgebraA,
    charge: &HeartCharge,
    parts: &[IntervalModule],
    tol: f64,
) -> bool {
    parts.iter().all(|part| {
        let phi = charge.phase_class(&alg.dim_vec(part)).unwrap().as_f64();
        brute_force_submodules(alg, part).into_iter().all(|sub| {
            if sub.iter().all(|&d| d == 0) {
                return true;
            }
            let phi_u = charge.phase_class(&sub).unwrap().as_f64();
            phi_u <= phi + tol
        })
    })
}
