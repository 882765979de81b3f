//! Algebraic curvature tensors on `R^{2n}`, pinching, Berger's bound on
//! mixed entries, and the twistor two-form `(X, Y) -> Tr(R(X, Y) J_u)`.
//!
//! Convention: `R[i][j][k][l] = g(R(e_i, e_j) e_k, e_l)` in an orthonormal
//! basis, so sectional curvature is `K(X, Y) = R(X, Y, Y, X) / |X ^ Y|^2`.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::singular_values;

/// Symmetry and Bianchi residual allowed for a valid tensor (relative).
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Positive,
    #[serde(rename = "-")]
    Negative,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Positive => 1.0,
            Sign::Negative => -1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureTensor {
    n: usize,
    data: Vec<f64>,
}

impl CurvatureTensor {
    /// Row-major `(2n)^4` entries; validated against the curvature symmetries.
    pub fn from_flat(n: usize, data: Vec<f64>) -> Result<Self> {
        let d = 2 * n;
        if data.len() != d.pow(4) {
            return Err(Error::DimensionMismatch {
                expected: d.pow(4),
                got: data.len(),
            });
        }
        let t = Self { n, data };
        let res = t.symmetry_residual();
        if res > SYMMETRY_TOL * t.max_abs().max(1.0) {
            return Err(Error::NotCurvatureTensor(res));
        }
        Ok(t)
    }

    fn from_fn(n: usize, f: impl Fn(usize, usize, usize, usize) -> f64) -> Self {
        let d = 2 * n;
        let mut data = Vec::with_capacity(d.pow(4));
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        data.push(f(i, j, k, l));
                    }
                }
            }
        }
        Self { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let d = self.dim();
        self.data[((i * d + j) * d + k) * d + l]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    /// Largest violation of pair antisymmetry, pair symmetry and first Bianchi.
    pub fn symmetry_residual(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let r = self.get(i, j, k, l);
                        worst = worst
                            .max((r + self.get(j, i, k, l)).abs())
                            .max((r + self.get(i, j, l, k)).abs())
                            .max((r - self.get(k, l, i, j)).abs())
                            .max((r + self.get(j, k, i, l) + self.get(k, i, j, l)).abs());
                    }
                }
            }
        }
        worst
    }

    /// `R(x, y, z, w)`.
    pub fn eval(&self, x: &[f64], y: &[f64], z: &[f64], w: &[f64]) -> f64 {
        let d = self.dim();
        let mut s = 0.0;
        for i in 0..d {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                if y[j] == 0.0 {
                    continue;
                }
                let xy = x[i] * y[j];
                for k in 0..d {
                    if z[k] == 0.0 {
                        continue;
                    }
                    let base = ((i * d + j) * d + k) * d;
                    let row = &self.data[base..base + d];
                    s += xy * z[k] * row.iter().zip(w).map(|(r, v)| r * v).sum::<f64>();
                }
            }
        }
        s
    }

    /// Sectional curvature of the plane spanned by `x, y`; `None` when degenerate.
    pub fn sectional(&self, x: &[f64], y: &[f64]) -> Option<f64> {
        let xx: f64 = x.iter().map(|v| v * v).sum();
        let yy: f64 = y.iter().map(|v| v * v).sum();
        let xy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
        let area = xx * yy - xy * xy;
        if area <= 1e-12 * xx * yy {
            return None;
        }
        Some(self.eval(x, y, y, x) / area)
    }

    /// Matrix of the induced symmetric form on `Lambda^2` in the basis
    /// `e_i ^ e_j` (i < j): `Q[(ij),(kl)] = R_ijlk`.
    pub fn bivector_operator(&self) -> DMatrix<f64> {
        let pairs = bivector_pairs(self.dim());
        DMatrix::from_fn(pairs.len(), pairs.len(), |a, b| {
            let (i, j) = pairs[a];
            let (k, l) = pairs[b];
            self.get(i, j, l, k)
        })
    }

    pub fn to_file(&self, epsilon: f64, sign: Sign, seed: u64) -> TensorFile {
        TensorFile {
            n: self.n,
            r: self.data.clone(),
            epsilon,
            sign,
            seed,
        }
    }
}

fn bivector_pairs(d: usize) -> Vec<(usize, usize)> {
    (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).collect()
}

/// Serialized tensor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorFile {
    pub n: usize,
    #[serde(rename = "R")]
    pub r: Vec<f64>,
    pub epsilon: f64,
    pub sign: Sign,
    pub seed: u64,
}

impl TensorFile {
    pub fn tensor(&self) -> Result<CurvatureTensor> {
        CurvatureTensor::from_flat(self.n, self.r.clone())
    }
}

/// `R(X,Y)Z = kappa (g(Y,Z) X - g(X,Z) Y)`.
pub fn constant_curvature(n: usize, kappa: f64) -> CurvatureTensor {
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    CurvatureTensor::from_fn(n, |i, j, k, l| kappa * (delta(j, k) * delta(i, l) - delta(i, k) * delta(j, l)))
}

/// Project an arbitrary 4-array onto algebraic curvature tensors:
/// antisymmetrize each pair, symmetrize the pairs, then remove the totally
/// antisymmetric part (which is what first Bianchi forbids).
fn project_to_curvature(n: usize, raw: &[f64]) -> CurvatureTensor {
    let d = 2 * n;
    let at = |i: usize, j: usize, k: usize, l: usize| raw[((i * d + j) * d + k) * d + l];
    let a = CurvatureTensor::from_fn(n, |i, j, k, l| {
        (at(i, j, k, l) - at(j, i, k, l) - at(i, j, l, k) + at(j, i, l, k)) / 4.0
    });
    let s = CurvatureTensor::from_fn(n, |i, j, k, l| (a.get(i, j, k, l) + a.get(k, l, i, j)) / 2.0);
    // for tensors with the pair symmetries the alternation is the cyclic sum / 3
    CurvatureTensor::from_fn(n, |i, j, k, l| {
        let cyc = s.get(i, j, k, l) + s.get(j, k, i, l) + s.get(k, i, j, l);
        s.get(i, j, k, l) - cyc / 3.0
    })
}

fn operator_norm(t: &CurvatureTensor) -> f64 {
    let q = t.bivector_operator();
    let q = (&q + q.transpose()) * 0.5;
    SymmetricEigen::new(q)
        .eigenvalues
        .iter()
        .fold(0.0, |m: f64, v| m.max(v.abs()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PinchedTensor {
    #[serde(skip)]
    pub tensor: CurvatureTensor,
    pub epsilon: f64,
    pub sign: Sign,
    pub seed: u64,
    /// Operator norm of the perturbation on `Lambda^2`.
    pub perturbation_norm: f64,
    pub halvings: usize,
    pub estimate: PinchingEstimate,
    pub berger: BergerReport,
}

/// Number of random planes used by the generator's post-hoc check.
const GENERATOR_PLANES: usize = 200;

/// `sign * ((1 - eps/2) R_1 + P)` with `P` a random algebraic curvature
/// tensor of operator norm `eps/2` on `Lambda^2`, so that every sectional
/// curvature satisfies `1 - eps <= |K| <= 1` and every mixed entry is at
/// most `eps/2` in absolute value.
pub fn random_pinched(n: usize, epsilon: f64, sign: Sign, seed: u64) -> Result<PinchedTensor> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::Parse(format!("epsilon {epsilon} outside [0, 1)")));
    }
    let d = 2 * n;
    let base = constant_curvature(n, 1.0 - epsilon / 2.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<f64> = (0..d.pow(4)).map(|_| rng.sample(StandardNormal)).collect();
    let p = project_to_curvature(n, &raw);
    let norm = operator_norm(&p);
    let mut scale = if norm > 0.0 { epsilon / 2.0 / norm } else { 0.0 };
    for halvings in 0..=50 {
        let tensor = base.add(&p.scaled(scale)).scaled(sign.factor());
        let estimate = pinching_estimate(&tensor, GENERATOR_PLANES, seed ^ 0x5eed);
        let berger = berger_check(&tensor, epsilon);
        let in_bracket = estimate.k_max_abs <= 1.0 + 1e-12 && estimate.k_min_abs >= 1.0 - epsilon - 1e-12;
        if in_bracket && berger.max_mixed <= 0.9 * berger.bound + 1e-15 {
            return Ok(PinchedTensor {
                tensor,
                epsilon,
                sign,
                seed,
                perturbation_norm: norm * scale,
                halvings,
                estimate,
                berger,
            });
        }
        scale /= 2.0;
    }
    Err(Error::ScaleFailure(50))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PinchingEstimate {
    pub k_min: f64,
    pub k_max: f64,
    pub k_min_abs: f64,
    pub k_max_abs: f64,
    /// `1 - k_min_abs / k_max_abs`.
    pub epsilon_est: f64,
    pub planes: usize,
}

fn random_unit(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Sectional curvature extremes over all coordinate planes and
/// `num_samples` random planes (degenerate draws are resampled).
pub fn pinching_estimate(r: &CurvatureTensor, num_samples: usize, seed: u64) -> PinchingEstimate {
    let d = r.dim();
    let mut ks = Vec::new();
    let unit = |i: usize| {
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        v
    };
    for i in 0..d {
        for j in i + 1..d {
            ks.extend(r.sectional(&unit(i), &unit(j)));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut drawn = 0;
    while drawn < num_samples {
        let x = random_unit(&mut rng, d);
        let y = random_unit(&mut rng, d);
        if let Some(k) = r.sectional(&x, &y) {
            ks.push(k);
            drawn += 1;
        }
    }
    let fold = |f: fn(f64, f64) -> f64, init: f64, abs: bool| {
        ks.iter().map(|k| if abs { k.abs() } else { *k }).fold(init, f)
    };
    let k_min_abs = fold(f64::min, f64::INFINITY, true);
    let k_max_abs = fold(f64::max, 0.0, true);
    PinchingEstimate {
        k_min: fold(f64::min, f64::INFINITY, false),
        k_max: fold(f64::max, f64::NEG_INFINITY, false),
        k_min_abs,
        k_max_abs,
        epsilon_est: if k_max_abs > 0.0 { 1.0 - k_min_abs / k_max_abs } else { 0.0 },
        planes: ks.len(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BergerReport {
    /// `2 eps / 3`.
    pub bound: f64,
    pub max_mixed: f64,
    pub worst: Option<[usize; 4]>,
    pub pass: bool,
}

/// Checks `|R_ijkl| <= 2 eps / 3` over index quadruples with at least three
/// distinct indices.
pub fn berger_check(r: &CurvatureTensor, epsilon: f64) -> BergerReport {
    let d = r.dim();
    let bound = 2.0 * epsilon / 3.0;
    let mut max_mixed = 0.0;
    let mut worst = None;
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let mut idx = [i, j, k, l];
                    idx.sort_unstable();
                    let distinct = 1 + idx.windows(2).filter(|w| w[0] != w[1]).count();
                    if distinct < 3 {
                        continue;
                    }
                    let v = r.get(i, j, k, l).abs();
                    if v > max_mixed {
                        max_mixed = v;
                        worst = Some([i, j, k, l]);
                    }
                }
            }
        }
    }
    BergerReport {
        bound,
        max_mixed,
        worst,
        pass: max_mixed <= bound,
    }
}

/// Orthonormal frame `u`; its columns are the adapted basis
/// `X_1, J_u X_1, ..., X_n, J_u X_n` for `J_u = u J u^T`.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    u: DMatrix<f64>,
}

/// Standard complex structure: `J e_{2i} = e_{2i+1}`.
pub fn standard_j(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(2 * i + 1, 2 * i)] = 1.0;
        j[(2 * i, 2 * i + 1)] = -1.0;
    }
    j
}

impl Frame {
    pub fn new(u: DMatrix<f64>) -> Result<Self> {
        if !u.is_square() || u.nrows() % 2 == 1 {
            return Err(Error::InvalidFrame(f64::INFINITY));
        }
        let res = (u.transpose() * &u - DMatrix::identity(u.nrows(), u.nrows())).amax();
        if res > 1e-12 {
            return Err(Error::InvalidFrame(res));
        }
        Ok(Self { u })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            u: DMatrix::identity(2 * n, 2 * n),
        }
    }

    /// Haar-like orthogonal frame: QR of a Gaussian matrix with the sign
    /// ambiguity removed, forced into `SO(2n)`.
    pub fn random(n: usize, rng: &mut ChaCha8Rng) -> Self {
        let d = 2 * n;
        let a = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
        let qr = a.qr();
        let (mut q, r) = (qr.q(), qr.r());
        for c in 0..d {
            if r[(c, c)] < 0.0 {
                q.column_mut(c).neg_mut();
            }
        }
        if q.determinant() < 0.0 {
            q.column_mut(0).neg_mut();
        }
        Self { u: q }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.u
    }

    pub fn n(&self) -> usize {
        self.u.nrows() / 2
    }

    pub fn complex_structure(&self) -> DMatrix<f64> {
        &self.u * standard_j(self.n()) * self.u.transpose()
    }
}

/// `T_ab = Tr(R(f_a, f_b) J_u)` over the frame vectors `f_a`.
pub fn twistor_form(r: &CurvatureTensor, frame: &Frame) -> Result<DMatrix<f64>> {
    let d = r.dim();
    if frame.u.nrows() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: frame.u.nrows(),
        });
    }
    let ju = frame.complex_structure();
    // S_ij = sum_kl R_ijkl (J_u)_kl
    let s = DMatrix::from_fn(d, d, |i, j| {
        let mut acc = 0.0;
        for k in 0..d {
            for l in 0..d {
                let jkl = ju[(k, l)];
                if jkl != 0.0 {
                    acc += r.get(i, j, k, l) * jkl;
                }
            }
        }
        acc
    });
    Ok(frame.u.transpose() * s * &frame.u)
}

/// `Omega_J[a][b] = g(J e_a, e_b)`.
pub fn omega_j(n: usize) -> DMatrix<f64> {
    standard_j(n).transpose()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrameReport {
    pub frame: usize,
    /// `sum_j g(R(X_i, J X_i) J X_j, X_j)` per adapted index.
    pub diagonal: Vec<f64>,
    /// Sectional term `K(X_i, J X_i)` of each diagonal entry.
    pub sectional: Vec<f64>,
    /// Remaining mixed terms `j != i` of each diagonal entry.
    pub mixed: Vec<f64>,
    pub min_abs_diagonal: f64,
    pub min_sv: f64,
    pub max_sv: f64,
    pub nondegenerate: bool,
    pub diagonal_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwistorReport {
    pub fat: bool,
    /// `1 - (2n+1) eps / 3`.
    pub bound: f64,
    pub min_abs_diagonal: f64,
    pub min_sv: f64,
    pub frames: Vec<FrameReport>,
}

/// Slack allowed below the diagonal bound.
pub const DIAGONAL_SLACK: f64 = 1e-9;

fn frame_report(r: &CurvatureTensor, frame: &Frame, index: usize, bound: f64, tol: f64) -> Result<FrameReport> {
    let n = r.n();
    let t = twistor_form(r, frame)?;
    let u = frame.matrix();
    let col = |c: usize| -> Vec<f64> { u.column(c).iter().copied().collect() };
    let mut diagonal = Vec::with_capacity(n);
    let mut sectional = Vec::with_capacity(n);
    let mut mixed = Vec::with_capacity(n);
    for i in 0..n {
        let (x, jx) = (col(2 * i), col(2 * i + 1));
        let k = r.eval(&x, &jx, &jx, &x);
        let mut rest = 0.0;
        for j in (0..n).filter(|&j| j != i) {
            rest += r.eval(&x, &jx, &col(2 * j + 1), &col(2 * j));
        }
        diagonal.push(t[(2 * i, 2 * i + 1)] / 2.0);
        sectional.push(k);
        mixed.push(rest);
    }
    let sv = singular_values(&t);
    let (min_sv, max_sv) = (sv[sv.len() - 1], sv[0]);
    let min_abs_diagonal = diagonal.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    Ok(FrameReport {
        frame: index,
        diagonal,
        sectional,
        mixed,
        min_abs_diagonal,
        min_sv,
        max_sv,
        nondegenerate: max_sv > 0.0 && min_sv > tol * max_sv,
        diagonal_ok: min_abs_diagonal >= bound - DIAGONAL_SLACK,
    })
}

/// Sampled frames; frame `k` draws from stream `k` of the seeded generator.
pub fn sample_frames(n: usize, num_frames: usize, seed: u64) -> Vec<Frame> {
    (0..num_frames)
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            Frame::random(n, &mut rng)
        })
        .collect()
}

/// Twistor-form nondegeneracy and the diagonal bound over sampled frames.
pub fn twistor_fatness(
    r: &CurvatureTensor,
    epsilon: f64,
    num_frames: usize,
    seed: u64,
    tol: f64,
) -> Result<TwistorReport> {
    let bound = 1.0 - (2 * r.n() + 1) as f64 * epsilon / 3.0;
    let frames = sample_frames(r.n(), num_frames, seed);
    let reports = frames
        .par_iter()
        .enumerate()
        .map(|(k, f)| frame_report(r, f, k, bound, tol))
        .collect::<Result<Vec<_>>>()?;
    let fat = reports.iter().all(|f| f.nondegenerate && f.diagonal_ok);
    Ok(TwistorReport {
        fat,
        bound,
        min_abs_diagonal: reports.iter().fold(f64::INFINITY, |m, f| m.min(f.min_abs_diagonal)),
        min_sv: reports.iter().fold(f64::INFINITY, |m, f| m.min(f.min_sv)),
        frames: reports,
    })
}

/// Apply an orthogonal change of basis `k` to a frame (`u -> u k`).
pub fn rotate_frame(frame: &Frame, k: &DMatrix<f64>) -> Result<Frame> {
    Frame::new(&frame.u * k)
}

#[cfg(test)]
mod tests;
