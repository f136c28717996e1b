//! Oracle-equivalence checks: the fast combinatorial routes must agree with
//! brute-force recomputation from explicit matrices.

mod common;

use qstab::quiver::QuiverData;
use qstab::repalg::PathAlgebraA;

#[test]
fn submodule_closure_matches_subspace_search() {
    // forward chains and a zig-zag orientation, ranks up to 4
    let quivers = vec![
        QuiverData::preset("A1").unwrap(),
        QuiverData::preset("A2").unwrap(),
        QuiverData::preset("A3").unwrap(),
        QuiverData::preset("A4").unwrap(),
        QuiverData::new(2, vec![(2, 1)]).unwrap(),
        QuiverData::new(4, vec![(1, 2), (3, 2), (3, 4)]).unwrap(),
        QuiverData::new(4, vec![(2, 1), (2, 3), (4, 3)]).unwrap(),
    ];
    for quiver in quivers {
        let alg = PathAlgebraA::new(quiver).unwrap();
        for m in alg.indecomposables() {
            let mut fast = alg.submodules(&m).dims;
            fast.sort();
            let brute = common::brute_force_submodules(&alg, &m);
            assert_eq!(
                fast,
                brute,
                "submodule sets of {} disagree with the subspace search",
                alg.display_module(&m)
            );
        }
    }
}
