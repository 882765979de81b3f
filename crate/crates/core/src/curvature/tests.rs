use nalgebra::DMatrix;
use proptest::prelude::*;

use super::*;

fn unit(d: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; d];
    v[i] = 1.0;
    v
}

#[test]
fn constant_curvature_planes() {
    for kappa in [1.0, -1.0, 0.25] {
        let r = constant_curvature(2, kappa);
        assert_eq!(r.symmetry_residual(), 0.0);
        for i in 0..4 {
            for j in i + 1..4 {
                assert_eq!(r.sectional(&unit(4, i), &unit(4, j)), Some(kappa));
            }
        }
        let est = pinching_estimate(&r, 50, 1);
        assert!((est.k_min_abs - kappa.abs()).abs() < 1e-12);
        assert!((est.k_max_abs - kappa.abs()).abs() < 1e-12);
        assert!(est.epsilon_est.abs() < 1e-12);
    }
    assert_eq!(constant_curvature(2, 1.0).sectional(&unit(4, 0), &unit(4, 0)), None);
}

#[test]
fn from_flat_validates() {
    let r = constant_curvature(2, 1.0);
    let ok = CurvatureTensor::from_flat(2, r.as_slice().to_vec()).unwrap();
    assert_eq!(ok, r);
    let mut bad = r.as_slice().to_vec();
    bad[1] = 0.5;
    assert!(matches!(CurvatureTensor::from_flat(2, bad), Err(Error::NotCurvatureTensor(_))));
    assert!(matches!(CurvatureTensor::from_flat(2, vec![0.0; 10]), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn tensor_file_roundtrip() {
    let p = random_pinched(2, 0.3, Sign::Negative, 5).unwrap();
    let file = p.tensor.to_file(0.3, Sign::Negative, 5);
    let text = serde_json::to_string(&file).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["sign"], "-");
    assert_eq!(v["R"].as_array().unwrap().len(), 16 * 16);
    let back: TensorFile = serde_json::from_str(&text).unwrap();
    assert_eq!(back.tensor().unwrap(), p.tensor);
}

#[test]
fn generator_zero_epsilon_is_constant() {
    let p = random_pinched(2, 0.0, Sign::Positive, 9).unwrap();
    assert_eq!(p.tensor, constant_curvature(2, 1.0));
}

#[test]
fn generator_meets_declared_pinching() {
    for (n, eps, sign, seed) in [(2, 0.5, Sign::Positive, 42), (3, 0.4, Sign::Negative, 7), (2, 0.54, Sign::Positive, 1)] {
        let p = random_pinched(n, eps, sign, seed).unwrap();
        assert!(p.tensor.symmetry_residual() < 1e-12);
        let est = pinching_estimate(&p.tensor, 500, seed + 1);
        assert!(est.epsilon_est <= eps + 1e-9, "{est:?}");
        assert!(est.k_min_abs >= 1.0 - eps - 1e-12 && est.k_max_abs <= 1.0 + 1e-12);
        match sign {
            Sign::Positive => assert!(est.k_min > 0.0),
            Sign::Negative => assert!(est.k_max < 0.0),
        }
        assert!(berger_check(&p.tensor, eps).pass);
        assert!((p.perturbation_norm - eps / 2.0).abs() < 1e-12);
        assert_eq!(p.halvings, 0);
    }
    // deterministic in the seed
    assert_eq!(
        random_pinched(2, 0.5, Sign::Positive, 42).unwrap().tensor,
        random_pinched(2, 0.5, Sign::Positive, 42).unwrap().tensor
    );
    assert!(random_pinched(2, 1.0, Sign::Positive, 0).is_err());
}

#[test]
fn berger_examples() {
    assert!(berger_check(&constant_curvature(2, 1.0), 0.0).pass);
    assert_eq!(berger_check(&constant_curvature(3, -1.0), 0.3).max_mixed, 0.0);
    // R_1234 = 1 with the symmetries it forces (no Bianchi repair needed for the check)
    let mut data = vec![0.0; 256];
    let idx = |i: usize, j: usize, k: usize, l: usize| ((i * 4 + j) * 4 + k) * 4 + l;
    data[idx(0, 1, 2, 3)] = 1.0;
    let t = CurvatureTensor { n: 2, data };
    let rep = berger_check(&t, 0.1);
    assert!(!rep.pass);
    assert_eq!(rep.max_mixed, 1.0);
    assert!((rep.bound - 0.2 / 3.0).abs() < 1e-15);
}

#[test]
fn twistor_form_of_constant_curvature() {
    for n in [2, 3] {
        for kappa in [1.0, -1.0, 0.5] {
            let r = constant_curvature(n, kappa);
            let t = twistor_form(&r, &Frame::identity(n)).unwrap();
            let expected = omega_j(n) * (2.0 * kappa);
            assert!((&t - &expected).amax() < 1e-12);
            for a in 0..2 * n {
                assert_eq!(t[(a, a)], 0.0);
            }
            // closed form holds in every frame
            for f in sample_frames(n, 5, 3) {
                let t = twistor_form(&r, &f).unwrap();
                assert!((&t - &expected).amax() < 1e-12);
            }
        }
    }
}

#[test]
fn frames_are_orthonormal_and_adapted() {
    for f in sample_frames(3, 10, 77) {
        let u = f.matrix();
        assert!((u.transpose() * u - DMatrix::identity(6, 6)).amax() < 1e-12);
        assert!(u.determinant() > 0.0);
        let j = f.complex_structure();
        assert!((&j * &j + DMatrix::identity(6, 6)).amax() < 1e-12);
        // columns come in pairs X, J X
        for i in 0..3 {
            let x = u.column(2 * i);
            assert!((&j * x - u.column(2 * i + 1)).amax() < 1e-12);
        }
    }
    assert!(matches!(Frame::new(DMatrix::identity(4, 4) * 2.0), Err(Error::InvalidFrame(_))));
}

#[test]
fn twistor_fatness_of_constant_curvature() {
    let rep = twistor_fatness(&constant_curvature(2, 1.0), 0.0, 10, 4, 1e-9).unwrap();
    assert!(rep.fat);
    for f in &rep.frames {
        for d in &f.diagonal {
            assert!((d - 1.0).abs() < 1e-12);
        }
        for (s, m) in f.sectional.iter().zip(&f.mixed) {
            assert!((s - 1.0).abs() < 1e-12 && m.abs() < 1e-12);
        }
    }
}

#[test]
fn twistor_fatness_under_pinching() {
    let p = random_pinched(2, 0.5, Sign::Positive, 42).unwrap();
    let rep = twistor_fatness(&p.tensor, 0.5, 20, 8, 1e-9).unwrap();
    assert!(rep.fat);
    assert!(rep.min_sv >= 2.0 * (1.0 - 5.0 / 3.0 * 0.5) - 1e-9);

    let p = random_pinched(2, 0.54, Sign::Positive, 1).unwrap();
    assert!(twistor_fatness(&p.tensor, 0.54, 50, 2, 1e-9).unwrap().fat);
    let p = random_pinched(3, 0.42, Sign::Negative, 2).unwrap();
    assert!(twistor_fatness(&p.tensor, 0.42, 50, 2, 1e-9).unwrap().fat);
}

#[test]
fn diagonal_splits_into_sectional_and_mixed_terms() {
    let p = random_pinched(3, 0.3, Sign::Positive, 3).unwrap();
    let rep = twistor_fatness(&p.tensor, 0.3, 10, 1, 1e-9).unwrap();
    for f in &rep.frames {
        for i in 0..3 {
            assert!((f.diagonal[i] - f.sectional[i] - f.mixed[i]).abs() < 1e-12);
        }
    }
}

#[test]
fn twistor_form_is_frame_equivariant() {
    let p = random_pinched(2, 0.4, Sign::Positive, 11).unwrap();
    let j = standard_j(2);
    for f in sample_frames(2, 5, 12) {
        // k = exp(A) with A skew and commuting with J (a unitary rotation)
        let b = DMatrix::from_row_slice(4, 4, &[
            0.0, -0.3, 0.7, 0.2,
            0.3, 0.0, -0.2, 0.7,
            -0.7, 0.2, 0.0, -1.1,
            -0.2, -0.7, 1.1, 0.0,
        ]);
        let a = (&b - &j * &b * &j) * 0.5;
        assert!((&a * &j - &j * &a).amax() < 1e-12);
        let k = a.exp();
        let g = rotate_frame(&f, &k).unwrap();
        let t = twistor_form(&p.tensor, &f).unwrap();
        let t2 = twistor_form(&p.tensor, &g).unwrap();
        assert!((t2 - k.transpose() * t * &k).amax() < 1e-10);
    }
}

proptest! {
    #[test]
    fn generated_tensors_have_curvature_symmetries(n in 2usize..=3, eps in 0.0f64..0.9, seed in 0u64..1000, neg in any::<bool>()) {
        let sign = if neg { Sign::Negative } else { Sign::Positive };
        let p = random_pinched(n, eps, sign, seed).unwrap();
        prop_assert!(p.tensor.symmetry_residual() < 1e-12);
        prop_assert!(p.berger.pass);
    }
}
