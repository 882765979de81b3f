//! Compact duals of noncompact real forms: with a Cartan involution
//! `g = k + p`, the dual `k + ip` has the `[p, p]` structure constants
//! negated. Fat sets of `k`-subalgebras are compared across the pair.

use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fatness::{certify, FatnessCertificate, Verdict};
use crate::liealg::{LieAlgebra, SubalgebraEmbedding};
use crate::linalg::Mat;
use crate::rootdata::{detect_subsystem, RootSystem, SubSystem, TorusVector};
use crate::scalar::{format_vec, Rational};

#[derive(Clone, Debug, PartialEq)]
pub enum CartanInvolution {
    /// `X -> P X P^{-1}` on the matrix realization.
    Conjugation(Mat<Rational>),
    /// A linear map on coordinate vectors (columns are images of basis vectors).
    Linear(Mat<Rational>),
}

impl CartanInvolution {
    /// Conjugation by `I_{p,q} = diag(1^p, (-1)^q)`.
    pub fn ipq(p: usize, q: usize) -> Self {
        let n = p + q;
        Self::Conjugation(Mat::from_fn(n, n, |r, c| {
            if r != c {
                Rational::zero()
            } else if r < p {
                Rational::one()
            } else {
                -Rational::one()
            }
        }))
    }

    pub fn identity(dim: usize) -> Self {
        Self::Linear(Mat::identity(dim))
    }

    /// Matrix of the involution on the coordinates of `g`.
    pub fn coordinate_matrix(&self, g: &LieAlgebra) -> Result<Mat<Rational>> {
        let dim = g.dim();
        match self {
            Self::Linear(m) => {
                if m.nrows() != dim || m.ncols() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: m.nrows(),
                    });
                }
                Ok(m.clone())
            }
            Self::Conjugation(p) => {
                let pinv = p
                    .inverse()
                    .map_err(|_| Error::InvolutionInvalid("conjugating matrix is singular".into()))?;
                let cols = g
                    .basis()
                    .iter()
                    .map(|b| {
                        g.coordinates(&p.mul(b).mul(&pinv))
                            .map_err(|_| Error::InvolutionInvalid("conjugation leaves the algebra".into()))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Mat::from_cols(&cols, dim))
            }
        }
    }
}

/// A noncompact algebra (in a basis adapted to `k + p`) and its compact dual
/// on the same coordinates.
#[derive(Clone, Debug)]
pub struct DualPair {
    noncompact: Arc<LieAlgebra>,
    compact_dual: Arc<LieAlgebra>,
    k_indices: Vec<usize>,
    p_indices: Vec<usize>,
    /// Columns are the adapted basis in the input coordinates, when the
    /// input basis was not already adapted.
    basis_change: Option<Mat<Rational>>,
}

/// Negate `c^k_ij` for `i, j` both in `p`.
fn flip_pp(g: &LieAlgebra, p_indices: &[usize]) -> Vec<Rational> {
    let dim = g.dim();
    let mut c = g.structure_constants().to_vec();
    for &i in p_indices {
        for &j in p_indices {
            for k in 0..dim {
                let idx = (i * dim + j) * dim + k;
                c[idx] = -c[idx].clone();
            }
        }
    }
    c
}

/// Compact dual of `g` for the Cartan involution `theta`.
pub fn dualize(g: &LieAlgebra, theta: &CartanInvolution) -> Result<DualPair> {
    let dim = g.dim();
    let t = theta.coordinate_matrix(g)?;
    if t.mul(&t) != Mat::identity(dim) {
        return Err(Error::InvolutionInvalid("theta^2 is not the identity".into()));
    }
    for i in 0..dim {
        for j in i + 1..dim {
            let lhs = t.mul_vec(&g.bracket(&g.unit(i), &g.unit(j))?);
            let rhs = g.bracket(&t.col(i), &t.col(j))?;
            if lhs != rhs {
                return Err(Error::InvolutionInvalid("theta is not an automorphism".into()));
            }
        }
    }
    let diagonal = (0..dim).all(|i| (0..dim).all(|j| i == j || t[(i, j)].is_zero()));
    let (work, basis_change) = if diagonal {
        (g.clone(), None)
    } else {
        let plus = t.sub(&Mat::identity(dim)).nullspace();
        let minus = t.add(&Mat::identity(dim)).nullspace();
        let basis: Vec<Vec<Rational>> = plus.into_iter().chain(minus).collect();
        let changed = g.change_basis(format!("{}[k+p]", g.name()), &basis)?;
        (changed, Some(Mat::from_cols(&basis, dim)))
    };
    let tw = match &basis_change {
        None => t,
        Some(b) => b.inverse()?.mul(&t).mul(b),
    };
    let (mut k_indices, mut p_indices) = (Vec::new(), Vec::new());
    for i in 0..dim {
        if tw[(i, i)].is_one() {
            k_indices.push(i);
        } else {
            p_indices.push(i);
        }
    }
    let c = flip_pp(&work, &p_indices);
    let dual = LieAlgebra::from_structure_constants(format!("{}*", work.name()), dim, c)?;
    if !dual.is_compact_semisimple() {
        return Err(Error::NotCompact);
    }
    Ok(DualPair {
        noncompact: Arc::new(work),
        compact_dual: Arc::new(dual),
        k_indices,
        p_indices,
        basis_change,
    })
}

impl DualPair {
    pub fn noncompact(&self) -> &Arc<LieAlgebra> {
        &self.noncompact
    }

    pub fn compact_dual(&self) -> &Arc<LieAlgebra> {
        &self.compact_dual
    }

    pub fn k_indices(&self) -> &[usize] {
        &self.k_indices
    }

    pub fn p_indices(&self) -> &[usize] {
        &self.p_indices
    }

    /// Flip `[p, p]` of the compact dual back; equals the noncompact constants.
    pub fn double_dual(&self) -> Result<LieAlgebra> {
        let c = flip_pp(&self.compact_dual, &self.p_indices);
        LieAlgebra::from_structure_constants(self.noncompact.name(), self.noncompact.dim(), c)
    }

    /// Coordinates in the adapted basis of a vector given in input coordinates.
    pub fn working_coordinates(&self, x: &[Rational]) -> Result<Vec<Rational>> {
        match &self.basis_change {
            None => Ok(x.to_vec()),
            Some(b) => b.solve(x),
        }
    }

    /// The subalgebra spanned by `h_basis` (input coordinates, inside `k`)
    /// embedded in both algebras with one shared torus.
    pub fn shared_embeddings(&self, h_basis: &[Vec<Rational>]) -> Result<(SubalgebraEmbedding, SubalgebraEmbedding)> {
        let h = h_basis
            .iter()
            .map(|x| self.working_coordinates(x))
            .collect::<Result<Vec<_>>>()?;
        for x in &h {
            if self.p_indices.iter().any(|&i| !x[i].is_zero()) {
                return Err(Error::InvolutionInvalid("h is not contained in k".into()));
            }
        }
        let nc = SubalgebraEmbedding::new(self.noncompact.clone(), h.clone())?;
        let c = SubalgebraEmbedding::new(self.compact_dual.clone(), h)?.with_torus(nc.torus().to_vec())?;
        Ok((nc, c))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleComparison {
    pub xu_torus: Vec<String>,
    pub noncompact: Verdict,
    pub compact: Verdict,
    pub roots: Verdict,
    pub noncompact_min_sv: Option<f64>,
    pub compact_min_sv: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AgreementReport {
    pub samples: usize,
    pub agreed: usize,
    pub fraction: f64,
    pub fat_count: usize,
    pub same_subsystem: bool,
    pub counterexample: Option<SampleComparison>,
    pub entries: Vec<SampleComparison>,
}

fn subsystems(
    root_system: Option<&RootSystem>,
    nc: &SubalgebraEmbedding,
    c: &SubalgebraEmbedding,
) -> Result<(Option<SubSystem>, Option<SubSystem>)> {
    match root_system {
        None => Ok((None, None)),
        Some(rs) => Ok((Some(detect_subsystem(nc, rs)?), Some(detect_subsystem(c, rs)?))),
    }
}

/// Certify the same torus points in both algebras.
pub fn compare_fat_sets_at(
    pair: &DualPair,
    h_basis: &[Vec<Rational>],
    root_system: Option<&RootSystem>,
    points: &[TorusVector],
    tol: f64,
) -> Result<AgreementReport> {
    let (nc, c) = pair.shared_embeddings(h_basis)?;
    let (sub_nc, sub_c) = subsystems(root_system, &nc, &c)?;
    let mut entries = Vec::with_capacity(points.len());
    for p in points {
        let x_nc = nc.torus_element(p.coords())?;
        let x_c = c.torus_element(p.coords())?;
        let a: FatnessCertificate = certify(pair.noncompact.name(), &nc, sub_nc.as_ref(), &x_nc, tol)?;
        let b: FatnessCertificate = certify(pair.compact_dual.name(), &c, sub_c.as_ref(), &x_c, tol)?;
        entries.push(SampleComparison {
            xu_torus: format_vec(p.coords()),
            noncompact: a.verdict(),
            compact: b.verdict(),
            roots: a.verdicts.roots,
            noncompact_min_sv: a.min_sv,
            compact_min_sv: b.min_sv,
        });
    }
    let agreed = entries.iter().filter(|e| e.noncompact == e.compact).count();
    Ok(AgreementReport {
        samples: entries.len(),
        agreed,
        fraction: if entries.is_empty() { 1.0 } else { agreed as f64 / entries.len() as f64 },
        fat_count: entries.iter().filter(|e| e.noncompact.is_fat()).count(),
        same_subsystem: sub_nc == sub_c,
        counterexample: entries.iter().find(|e| e.noncompact != e.compact).cloned(),
        entries,
    })
}

/// [`compare_fat_sets_at`] on seeded exact torus samples.
pub fn compare_fat_sets(
    pair: &DualPair,
    h_basis: &[Vec<Rational>],
    root_system: Option<&RootSystem>,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<AgreementReport> {
    let (nc, _) = pair.shared_embeddings(h_basis)?;
    let points = TorusVector::sample(nc.rank(), samples, seed);
    compare_fat_sets_at(pair, h_basis, root_system, &points, tol)
}

#[cfg(test)]
mod tests;
