use std::sync::Arc;

use num_traits::Zero;

use super::*;
use crate::fatness::{certify, sample_torus};
use crate::liealg::{build_algebra, so_block, u_block, Family};
use crate::rootdata::{detect_subsystem, RootSystem};
use crate::scalar::{q, qi, Rational};

fn so_pair(n: usize) -> SubalgebraEmbedding {
    let g = Arc::new(build_algebra(Family::So(n)).unwrap());
    let h = so_block(&g, n - 1).unwrap();
    SubalgebraEmbedding::new(g, h).unwrap()
}

fn t(emb: &SubalgebraEmbedding, v: &[i64]) -> Vec<Rational> {
    emb.torus_element(&v.iter().map(|&x| qi(x)).collect::<Vec<_>>()).unwrap()
}

fn j_instance() -> HomogeneousBundleInstance<Rational> {
    let emb = so_pair(5);
    let j = t(&emb, &[1, 1]);
    HomogeneousBundleInstance::new(emb, j).unwrap()
}

#[test]
fn isotropy_of_j_is_u2() {
    let inst = j_instance();
    assert_eq!(inst.v_basis().len(), 4);
    assert_eq!(inst.vertical_dim(), 2);
    assert_eq!(inst.horizontal_dim(), 4);
    // v is the u(2) commutant
    let g = inst.embedding().ambient_arc().clone();
    let u2 = u_block(&g, 2).unwrap();
    let stacked: Vec<Vec<Rational>> = [inst.v_basis().to_vec(), u2].concat();
    assert_eq!(Mat::from_rows(&stacked).rank(), 4);
}

#[test]
fn cp3_form_has_full_rank() {
    let inst = j_instance();
    let form = coupling_form(&inst);
    assert_eq!(form.dim(), 6);
    assert!(form.gram.is_antisymmetric());
    assert_eq!(form.gram.rank(), 6);
    for i in 0..6 {
        assert!(form.gram[(i, i)].is_zero());
    }
}

#[test]
fn extension_by_zero_is_the_ambient_kks_form() {
    let inst = j_instance();
    let form = coupling_form(&inst);
    let ext = form.on_ambient(&inst).unwrap();
    let g = inst.ambient();
    let w = g.killing_gram().mul_vec(inst.x_u());
    let direct = Mat::from_fn(g.dim(), g.dim(), |i, j| dot(&w, &g.bracket(&g.unit(i), &g.unit(j)).unwrap()));
    assert_eq!(ext, direct);
    // and it vanishes on (v, n) pairs
    for a in inst.v_basis() {
        for b in inst.n_basis() {
            assert!(ext.bilinear(a, b).is_zero());
        }
    }
}

#[test]
fn block_structure_of_twistor_example() {
    let inst = j_instance();
    let form = coupling_form(&inst);
    let rep = verify_block_structure(&inst, &form).unwrap();
    assert!(rep.cross_block_zero);
    assert_eq!(rep.cross_block_max, 0.0);
    assert_eq!(rep.vertical_dim, 2);
    assert!(rep.vertical_nondegenerate);
    assert!(rep.horizontal_matches_fatness_gram);
    assert_eq!(rep.curvature_to_horizontal_ratio.as_deref(), Some("-1/2"));

    let scaled = form.scaled(&qi(10));
    let rep2 = verify_block_structure(&inst, &scaled).unwrap();
    assert!(rep2.cross_block_zero && rep2.horizontal_matches_fatness_gram);
    for i in 0..6 {
        for j in 0..6 {
            assert_eq!(form.gram[(i, j)].is_zero(), scaled.gram[(i, j)].is_zero());
        }
    }
}

#[test]
fn zero_dimensional_fiber() {
    let g = Arc::new(build_algebra(Family::So(3)).unwrap());
    let h = so_block(&g, 2).unwrap();
    let emb = SubalgebraEmbedding::new(g, h).unwrap();
    let x = emb.h_basis()[0].clone();
    let inst = HomogeneousBundleInstance::new(emb, x).unwrap();
    assert_eq!(inst.vertical_dim(), 0);
    let form = coupling_form(&inst);
    assert_eq!(form.dim(), 2);
    let rep = verify_block_structure(&inst, &form).unwrap();
    assert_eq!(rep.horizontal_dim, 2);
    assert!(rep.horizontal_matches_fatness_gram);
}

#[test]
fn closedness() {
    let inst = j_instance();
    let g = inst.ambient();
    let form = coupling_form(&inst);
    let ext = form.on_ambient(&inst).unwrap();
    assert!(ce_closedness(g, &ext).unwrap().is_zero());
    assert!(ce_closedness(g, &Mat::zeros(10, 10)).unwrap().is_zero());
    let bad = form.with_horizontal_factor(&q(-1, 2)).on_ambient(&inst).unwrap();
    assert!(!ce_closedness(g, &bad).unwrap().is_zero());
    assert!(ce_closedness(g, &Mat::zeros(3, 3)).is_err());

    let fl = HomogeneousBundleInstance::new(inst.embedding().to_float(), inst.x_u().iter().map(Scalar::to_f64).collect()).unwrap();
    let fext = coupling_form(&fl).on_ambient(&fl).unwrap();
    assert!(ce_closedness(fl.ambient(), &fext).unwrap() < 1e-10);
}

#[test]
fn pfaffian_and_scaling() {
    let inst = j_instance();
    let form = coupling_form(&inst);
    let rep = nondegenerate_and_top_power(&form, 3).unwrap();
    assert!(rep.nonzero);
    let pf = crate::scalar::parse_rational(&rep.pfaffian).unwrap();
    assert_eq!(&pf * &pf, form.gram.determinant());
    for r in [q(1, 10), qi(1), qi(10)] {
        let s = form.scaled(&r);
        let rs = nondegenerate_and_top_power(&s, 3).unwrap();
        assert!(rs.nonzero);
        let pfs = crate::scalar::parse_rational(&rs.pfaffian).unwrap();
        assert_eq!(pfs, &pf * &r * &r * &r);
    }
    let zero = InvariantTwoForm { gram: Mat::<Rational>::zeros(4, 4), scale: qi(1), vertical_dim: 0 };
    let rz = nondegenerate_and_top_power(&zero, 2).unwrap();
    assert!(!rz.nonzero);
    assert_eq!(rz.pfaffian, "0");
    let odd = InvariantTwoForm { gram: Mat::<Rational>::zeros(3, 3), scale: qi(1), vertical_dim: 0 };
    assert!(matches!(nondegenerate_and_top_power(&odd, 1), Err(Error::OddDimension(3))));
}

#[test]
fn isotropy_is_checked() {
    let emb = so_pair(5);
    let j = t(&emb, &[1, 1]);
    let wrong = emb.torus().to_vec();
    assert!(matches!(
        HomogeneousBundleInstance::with_isotropy(emb.clone(), j.clone(), wrong),
        Err(Error::IsotropyMismatch)
    ));
    let right = isotropy_in_h(&emb, &j);
    assert!(HomogeneousBundleInstance::with_isotropy(emb, j, right).is_ok());
}

#[test]
fn shifted_forms() {
    let emb = so_pair(5);
    let x = t(&emb, &[1, 0]);
    let (_, f0) = shifted_coupling(&emb, &x, &[qi(0), qi(0)]).unwrap();
    let inst = HomogeneousBundleInstance::new(emb.clone(), x.clone()).unwrap();
    assert_eq!(f0, coupling_form(&inst));
    assert_eq!(f0.gram.determinant(), qi(0));

    let (_, f1) = shifted_coupling(&emb, &x, &[qi(0), qi(1)]).unwrap();
    assert!(!f1.gram.determinant().is_zero());
    let (_, f2) = shifted_coupling(&emb, &x, &[qi(-1), qi(3)]).unwrap();
    assert!(f2.gram.determinant().is_zero());
}

#[test]
fn nondegenerate_iff_fat_on_samples() {
    let g = Arc::new(build_algebra(Family::So(5)).unwrap());
    for h in [so_block(&g, 4).unwrap(), u_block(&g, 2).unwrap()] {
        let emb = SubalgebraEmbedding::new(g.clone(), h).unwrap();
        let sub = detect_subsystem(&emb, &RootSystem::for_family(Family::So(5)).unwrap()).unwrap();
        for (_, x) in sample_torus(&emb, 100, 5).unwrap() {
            let cert = certify("s", &emb, Some(&sub), &x, DEFAULT_TOL).unwrap();
            let inst = HomogeneousBundleInstance::new(emb.clone(), x).unwrap();
            let form = coupling_form(&inst);
            let nondeg = !form.gram.determinant().is_zero();
            assert_eq!(nondeg, cert.is_fat());
            assert!(ce_closedness(inst.ambient(), &form.on_ambient(&inst).unwrap()).unwrap().is_zero());
        }
    }
}
