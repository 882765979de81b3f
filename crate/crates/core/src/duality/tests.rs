use super::*;
use crate::fatness::DEFAULT_TOL;
use crate::liealg::{build_algebra, so_block, Family};
use crate::scalar::qi;

fn so41() -> LieAlgebra {
    build_algebra(Family::SoPq(4, 1)).unwrap()
}

fn tv(v: &[i64]) -> TorusVector {
    TorusVector::from_ints(v)
}

#[test]
fn dual_of_so41_is_so5() {
    let g = so41();
    let pair = dualize(&g, &CartanInvolution::ipq(4, 1)).unwrap();
    let dual = pair.compact_dual();
    assert_eq!(dual.dim(), 10);
    let inertia = dual.killing_inertia();
    assert_eq!((inertia.negative, inertia.positive, inertia.zero), (10, 0, 0));
    assert_eq!(pair.k_indices().len(), 6);
    assert_eq!(pair.p_indices().len(), 4);
    // same basis ordering as the built-in compact algebra
    let so5 = build_algebra(Family::So(5)).unwrap();
    assert_eq!(dual.structure_constants(), so5.structure_constants());
    assert_eq!(dual.killing_gram(), so5.killing_gram());
}

#[test]
fn k_brackets_are_untouched() {
    let g = so41();
    let pair = dualize(&g, &CartanInvolution::ipq(4, 1)).unwrap();
    let d = pair.compact_dual();
    for &i in pair.k_indices() {
        for j in 0..g.dim() {
            for k in 0..g.dim() {
                assert_eq!(g.structure_constant(i, j, k), d.structure_constant(i, j, k));
            }
        }
    }
}

#[test]
fn compact_input_with_identity() {
    let g = build_algebra(Family::So(5)).unwrap();
    let pair = dualize(&g, &CartanInvolution::identity(10)).unwrap();
    assert!(pair.p_indices().is_empty());
    assert_eq!(pair.compact_dual().structure_constants(), g.structure_constants());
}

#[test]
fn double_dual_restores_constants() {
    for (p, q) in [(4, 1), (6, 1), (2, 1)] {
        let g = build_algebra(Family::SoPq(p, q)).unwrap();
        let pair = dualize(&g, &CartanInvolution::ipq(p, q)).unwrap();
        assert_eq!(pair.double_dual().unwrap().structure_constants(), g.structure_constants());
    }
}

#[test]
fn invalid_involutions() {
    let g = build_algebra(Family::So(3)).unwrap();
    let twice = CartanInvolution::Linear(Mat::identity(3).scaled(&qi(2)));
    assert!(matches!(dualize(&g, &twice), Err(Error::InvolutionInvalid(_))));
    let swap = CartanInvolution::Linear(Mat::from_rows(&[
        vec![qi(0), qi(1), qi(0)],
        vec![qi(1), qi(0), qi(0)],
        vec![qi(0), qi(0), qi(1)],
    ]));
    assert!(matches!(dualize(&g, &swap), Err(Error::InvolutionInvalid(_))));
    // a non-Cartan involution of so(5) produces the noncompact so(3,2)
    let g5 = build_algebra(Family::So(5)).unwrap();
    assert!(matches!(dualize(&g5, &CartanInvolution::ipq(3, 2)), Err(Error::NotCompact)));
}

#[test]
fn non_adapted_basis_is_changed() {
    let g = so41();
    // mix a k-vector with a p-vector
    let p0 = (0..g.dim()).find(|&i| {
        let m = g.basis()[i].clone();
        !m[(0, 4)].is_zero()
    })
    .unwrap();
    let basis: Vec<Vec<Rational>> = (0..g.dim())
        .map(|i| {
            let mut v = g.unit(i);
            if i == 0 {
                v[p0] = qi(1);
            }
            v
        })
        .collect();
    let mixed = g.change_basis("so(4,1) mixed", &basis).unwrap();
    let pair = dualize(&mixed, &CartanInvolution::ipq(4, 1)).unwrap();
    assert_eq!(pair.compact_dual().killing_inertia().negative, 10);
    // so(4) in the mixed coordinates
    let h: Vec<Vec<Rational>> = so_block(&g, 4)
        .unwrap()
        .iter()
        .map(|x| Mat::from_cols(&basis, 10).solve(x).unwrap())
        .collect();
    let rep = compare_fat_sets(&pair, &h, None, 50, 9, DEFAULT_TOL).unwrap();
    assert_eq!(rep.agreed, 50);
}

#[test]
fn fat_sets_agree_for_so41() {
    let g = so41();
    let pair = dualize(&g, &CartanInvolution::ipq(4, 1)).unwrap();
    let h = so_block(&g, 4).unwrap();
    let rs = RootSystem::for_family(Family::So(5)).unwrap();
    let rep = compare_fat_sets_at(&pair, &h, Some(&rs), &[tv(&[1, 1]), tv(&[1, 0])], DEFAULT_TOL).unwrap();
    assert_eq!(rep.entries[0].noncompact, Verdict::Fat);
    assert_eq!(rep.entries[0].compact, Verdict::Fat);
    assert_eq!(rep.entries[1].noncompact, Verdict::NotFat);
    assert_eq!(rep.entries[1].compact, Verdict::NotFat);
    assert_eq!(rep.entries[1].roots, Verdict::NotFat);
    assert!(rep.same_subsystem);

    let rep = compare_fat_sets(&pair, &h, Some(&rs), 200, 3, DEFAULT_TOL).unwrap();
    assert_eq!(rep.samples, 200);
    assert_eq!(rep.agreed, 200);
    assert!(rep.counterexample.is_none());
}

#[test]
fn h_outside_k_is_rejected() {
    let g = so41();
    let pair = dualize(&g, &CartanInvolution::ipq(4, 1)).unwrap();
    let p = g.unit(pair.p_indices()[0]);
    assert!(pair.shared_embeddings(&[p]).is_err());
}
