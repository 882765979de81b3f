use std::sync::Arc;

use proptest::prelude::*;

use super::*;
use crate::liealg::{build_algebra, so_block, u_block, SubalgebraEmbedding};

fn b2_so4() -> SubSystem {
    let rs = build_root_system(RootType::B, 2).unwrap();
    SubSystem::new(rs, vec![vec![1, -1], vec![1, 1], vec![-1, 1], vec![-1, -1]]).unwrap()
}

fn tv(v: &[i64]) -> TorusVector {
    TorusVector::from_ints(v)
}

#[test]
fn classical_root_counts() {
    for n in 1..=5 {
        assert_eq!(build_root_system(RootType::B, n).unwrap().roots().len(), 2 * n * n);
        assert_eq!(build_root_system(RootType::C, n).unwrap().roots().len(), 2 * n * n);
        assert_eq!(build_root_system(RootType::A, n).unwrap().roots().len(), n * (n + 1));
        if n >= 2 {
            assert_eq!(build_root_system(RootType::D, n).unwrap().roots().len(), 2 * n * (n - 1));
        }
    }
    assert!(build_root_system(RootType::D, 1).is_err());
    assert!(build_root_system(RootType::A, 0).is_err());
}

#[test]
fn b2_and_d2_root_lists() {
    let b2 = build_root_system(RootType::B, 2).unwrap();
    let mut expected: Vec<Root> = vec![
        vec![1, -1], vec![-1, 1], vec![1, 1], vec![-1, -1],
        vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1],
    ];
    let mut got = b2.roots().to_vec();
    expected.sort();
    got.sort();
    assert_eq!(got, expected);

    let d2 = build_root_system(RootType::D, 2).unwrap();
    let mut got = d2.roots().to_vec();
    got.sort();
    assert_eq!(got, vec![vec![-1, -1], vec![-1, 1], vec![1, -1], vec![1, 1]]);
    assert_eq!(build_root_system(RootType::A, 1).unwrap().roots().len(), 2);
}

#[test]
fn roots_are_signed_simple_combinations() {
    for (t, n) in [(RootType::A, 3), (RootType::B, 3), (RootType::C, 3), (RootType::D, 4)] {
        let rs = build_root_system(t, n).unwrap();
        for r in rs.roots() {
            let c = rs.simple_coefficients(r).unwrap();
            assert!(c.iter().all(|x| x.is_integer()));
            let nonneg = c.iter().all(|x| !x.is_negative());
            let nonpos = c.iter().all(|x| !x.is_positive());
            assert!(nonneg ^ nonpos, "{t:?}{n} {r:?}");
            assert_eq!(nonneg, rs.positive_roots().contains(r));
        }
    }
}

#[test]
fn serialization_format() {
    let rs = build_root_system(RootType::B, 2).unwrap();
    let v: serde_json::Value = serde_json::to_value(&rs).unwrap();
    assert_eq!(v["type"], "B");
    assert_eq!(v["rank"], 2);
    assert_eq!(v["roots"].as_array().unwrap().len(), 8);
    let verdict = fat_by_roots(&tv(&[1, 0]), &b2_so4()).unwrap();
    assert_eq!(
        serde_json::to_string(&verdict).unwrap(),
        r#"{"fat":false,"witness_root":[0,1]}"#
    );
}

#[test]
fn detect_so5_so4() {
    let g = Arc::new(build_algebra(Family::So(5)).unwrap());
    let h = so_block(&g, 4).unwrap();
    let emb = SubalgebraEmbedding::new(g, h).unwrap();
    let rs = build_root_system(RootType::B, 2).unwrap();
    let sub = detect_subsystem(&emb, &rs).unwrap();
    assert_eq!(sub, b2_so4());
    assert_eq!(sub.forbidden().len(), emb.dim_m());
}

#[test]
fn detect_so5_u2() {
    let g = Arc::new(build_algebra(Family::So(5)).unwrap());
    let h = u_block(&g, 2).unwrap();
    let emb = SubalgebraEmbedding::new(g, h).unwrap();
    let rs = build_root_system(RootType::B, 2).unwrap();
    let sub = detect_subsystem(&emb, &rs).unwrap();
    let mut members = sub.members().to_vec();
    members.sort();
    assert_eq!(members, vec![vec![-1, 1], vec![1, -1]]);
    assert_eq!(sub.forbidden().len(), 6);
    assert_eq!(sub.forbidden().len(), emb.dim_m());
}

#[test]
fn detect_whole_algebra_and_noncompact() {
    let g = Arc::new(build_algebra(Family::So(5)).unwrap());
    let all: Vec<_> = (0..g.dim()).map(|i| g.unit(i)).collect();
    let emb = SubalgebraEmbedding::new(g, all).unwrap();
    let rs = build_root_system(RootType::B, 2).unwrap();
    assert!(detect_subsystem(&emb, &rs).unwrap().forbidden().is_empty());

    let g = Arc::new(build_algebra(Family::SoPq(4, 1)).unwrap());
    let h = so_block(&g, 4).unwrap();
    let emb = SubalgebraEmbedding::new(g, h).unwrap();
    assert_eq!(detect_subsystem(&emb, &rs).unwrap(), b2_so4());
}

#[test]
fn detect_rejects_wrong_root_system() {
    let g = Arc::new(build_algebra(Family::So(5)).unwrap());
    let h = so_block(&g, 4).unwrap();
    let emb = SubalgebraEmbedding::new(g, h).unwrap();
    let c2 = build_root_system(RootType::C, 2).unwrap();
    assert!(matches!(detect_subsystem(&emb, &c2), Err(Error::TorusMismatch(_))));
    let b3 = build_root_system(RootType::B, 3).unwrap();
    assert!(matches!(detect_subsystem(&emb, &b3), Err(Error::TorusMismatch(_))));
}

#[test]
fn root_verdicts_for_so5_so4() {
    let sub = b2_so4();
    assert!(fat_by_roots(&tv(&[1, 1]), &sub).unwrap().fat);
    let v = fat_by_roots(&tv(&[1, 0]), &sub).unwrap();
    assert_eq!(v.witness_root, Some(vec![0, 1]));
    // forbidden roots of so(4) in so(5) are only +-t_i
    assert!(fat_by_roots(&tv(&[1, -1]), &sub).unwrap().fat);
    assert!(fat_by_roots(&tv(&[2, 1]), &sub).unwrap().fat);
    assert!(fat_by_roots(&tv(&[1]), &sub).is_err());
}

#[test]
fn t1_plus_t2_witness_needs_u2() {
    let rs = build_root_system(RootType::B, 2).unwrap();
    let sub = SubSystem::new(rs, vec![vec![1, -1], vec![-1, 1]]).unwrap();
    let v = fat_by_roots(&tv(&[1, -1]), &sub).unwrap();
    assert_eq!(v.witness_root, Some(vec![1, 1]));
}

#[test]
fn centralizing_vectors() {
    let a2 = build_root_system(RootType::A, 2).unwrap();
    let x = find_centralizing_vector(&a2, &[vec![1, -1, 0]]).unwrap();
    assert_eq!(evaluate(&[1, -1, 0], x.coords()), qi(0));
    assert_eq!(evaluate(&[0, 1, -1], x.coords()), qi(1));
    assert_eq!(evaluate(&[1, 0, -1], x.coords()), qi(1));

    let b2 = build_root_system(RootType::B, 2).unwrap();
    let x = find_centralizing_vector(&b2, &[vec![1, -1]]).unwrap();
    assert_eq!(x.coords()[0], x.coords()[1]);
    assert_ne!(x.coords()[0], qi(0));

    for (t, n) in [(RootType::A, 3), (RootType::B, 3), (RootType::C, 3), (RootType::D, 4)] {
        let rs = build_root_system(t, n).unwrap();
        let x = find_centralizing_vector(&rs, &[]).unwrap();
        assert!(rs.roots().iter().all(|r| !evaluate(r, x.coords()).is_zero()));
        // every subset of simple roots
        let simple = rs.simple_roots().to_vec();
        for mask in 0..1u32 << simple.len() {
            let s: Vec<Root> = (0..simple.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| simple[i].clone())
                .collect();
            let x = find_centralizing_vector(&rs, &s).unwrap();
            let sub = SubSystem::generated_by(rs.clone(), &s).unwrap();
            assert!(verify_centralizing_vector(&x, &sub));
        }
    }
    assert!(matches!(
        find_centralizing_vector(&b2, &[vec![1, 1]]),
        Err(Error::NotSimpleRoot(_))
    ));
}

#[test]
fn shifts() {
    let b2 = build_root_system(RootType::B, 2).unwrap();
    let all = SubSystem::new(b2.clone(), vec![]).unwrap();
    let square = vec![tv(&[0, 0]), tv(&[1, 0]), tv(&[0, 1]), tv(&[1, 1])];
    assert!(verify_shift(&square, &all, &tv(&[3, 1])));
    assert!(!verify_shift(&square, &all, &tv(&[0, 0])));
    let a = find_fat_shift(&square, &all).unwrap();
    assert!(verify_shift(&square, &all, &a));

    let t1 = SubSystem::new(b2.clone(), b2.roots().iter().filter(|r| r[1] != 0).cloned().collect()).unwrap();
    assert_eq!(t1.forbidden(), &[vec![1, 0], vec![-1, 0]]);
    let a = find_fat_shift(&[tv(&[0, 0])], &t1).unwrap();
    assert!(verify_shift(&[tv(&[0, 0])], &t1, &a));
    assert!(verify_shift(&[tv(&[0, 0])], &t1, &tv(&[1, 0])));

    let diag = SubSystem::new(
        b2.clone(),
        b2.roots().iter().filter(|r| r[0] + r[1] != 0).cloned().collect(),
    )
    .unwrap();
    assert_eq!(diag.forbidden(), &[vec![1, -1], vec![-1, 1]]);
    let seg = vec![tv(&[-1, -1]), tv(&[1, 1])];
    assert!(!verify_shift(&seg, &diag, &tv(&[0, 0])));
    assert!(verify_shift(&seg, &diag, &tv(&[1, 0])));
    let a = find_fat_shift(&seg, &diag).unwrap();
    assert!(verify_shift(&seg, &diag, &a));
}

#[test]
fn central_shift_can_be_infeasible() {
    let b2 = build_root_system(RootType::B, 2).unwrap();
    let all = SubSystem::new(b2, vec![]).unwrap();
    let origin = vec![tv(&[0, 0])];
    assert!(find_fat_shift_in(&origin, &all, &[tv(&[1, 1])]).is_none());
    // unrestricted, the same point is easily moved off all walls
    assert!(find_fat_shift(&origin, &all).is_some());
}

#[test]
fn fourier_motzkin_picks_interior_points() {
    // x > 0, y > 0, x + y < 1
    let sys = vec![
        Strict { coef: vec![qi(1), qi(0)], bound: qi(0) },
        Strict { coef: vec![qi(0), qi(1)], bound: qi(0) },
        Strict { coef: vec![qi(-1), qi(-1)], bound: qi(-1) },
    ];
    let x = solve_strict(sys.clone(), 2).unwrap();
    for c in &sys {
        let lhs: Rational = c.coef.iter().zip(&x).map(|(a, b)| a * b).sum();
        assert!(lhs > c.bound);
    }
    // x > 1 and x < 1
    let sys = vec![
        Strict { coef: vec![qi(1)], bound: qi(1) },
        Strict { coef: vec![qi(-1)], bound: qi(-1) },
    ];
    assert!(solve_strict(sys, 1).is_none());
}

fn d2_signed_permutations() -> Vec<[[i64; 2]; 2]> {
    vec![
        [[1, 0], [0, 1]],
        [[-1, 0], [0, -1]],
        [[0, 1], [1, 0]],
        [[0, -1], [-1, 0]],
    ]
}

proptest! {
    #[test]
    fn root_verdict_is_scale_invariant(a in -9i64..=9, b in -9i64..=9, r in 1i64..=7, s in 1i64..=3) {
        let sub = b2_so4();
        let x = TorusVector(vec![q(a, 1), q(b, 2)]);
        let y = x.scaled(&q(-r, s));
        prop_assert_eq!(fat_by_roots(&x, &sub).unwrap().fat, fat_by_roots(&y, &sub).unwrap().fat);
    }

    #[test]
    fn root_verdict_is_weyl_invariant(a in -9i64..=9, b in -9i64..=9) {
        let sub = b2_so4();
        let x = tv(&[a, b]);
        let fat = fat_by_roots(&x, &sub).unwrap().fat;
        for w in d2_signed_permutations() {
            let y = tv(&[w[0][0] * a + w[0][1] * b, w[1][0] * a + w[1][1] * b]);
            prop_assert_eq!(fat_by_roots(&y, &sub).unwrap().fat, fat);
        }
    }

    #[test]
    fn returned_shifts_verify(pts in proptest::collection::vec((-5i64..=5, -5i64..=5), 1..5), keep in 0u8..16) {
        let b2 = build_root_system(RootType::B, 2).unwrap();
        let pos = b2.positive_roots().to_vec();
        let mut members = Vec::new();
        for (i, r) in pos.iter().enumerate() {
            if keep >> i & 1 == 1 {
                members.push(r.clone());
                members.push(r.iter().map(|x| -x).collect());
            }
        }
        let sub = SubSystem::new(b2, members).unwrap();
        let verts: Vec<TorusVector> = pts.iter().map(|&(x, y)| tv(&[x, y])).collect();
        let a = find_fat_shift(&verts, &sub);
        prop_assert!(a.is_some());
        prop_assert!(verify_shift(&verts, &sub, &a.unwrap()));
    }
}
