//! Fatness of covectors for the canonical connection on `H -> G -> G/H`,
//! decided three ways: forbidden roots, nondegeneracy of the curvature
//! pairing on `m`, and the centralizer of `X_u`.

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::liealg::{LieAlgebra, SubalgebraEmbedding};
use crate::linalg::{singular_values, smallest_singular_pair, Mat};
use crate::rootdata::{fat_by_roots, Root, SubSystem, TorusVector};
use crate::scalar::{scalar_strings, Rational, Scalar};

/// Default relative threshold for the smallest singular value.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Fat,
    NotFat,
    NotApplicable,
}

impl Verdict {
    pub fn from_fat(fat: bool) -> Self {
        if fat {
            Verdict::Fat
        } else {
            Verdict::NotFat
        }
    }

    pub fn is_fat(self) -> bool {
        self == Verdict::Fat
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Fat => "fat",
            Verdict::NotFat => "not_fat",
            Verdict::NotApplicable => "not_applicable",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdicts {
    pub roots: Verdict,
    pub oracle: Verdict,
    pub centralizer: Verdict,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Witnesses {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub root: Option<Root>,
    /// Unit null vector of the Gram in `m`-basis coordinates.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub null_vector: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub null_residual: Option<f64>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub odd_dimension: bool,
    /// Nonzero element of `ker ad(X_u)` inside `m`, ambient coordinates.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub centralizer_element: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FatnessCertificate {
    pub instance: String,
    #[serde(rename = "Xu")]
    pub xu: Vec<String>,
    #[serde(rename = "Xu_torus", skip_serializing_if = "Option::is_none")]
    pub xu_torus: Option<Vec<String>>,
    pub verdicts: Verdicts,
    pub min_sv: Option<f64>,
    pub max_sv: Option<f64>,
    pub tol: f64,
    pub centralizer_dim: usize,
    pub witnesses: Witnesses,
    pub agreed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl FatnessCertificate {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// The common verdict of the applicable criteria.
    pub fn verdict(&self) -> Verdict {
        self.verdicts.oracle
    }

    pub fn is_fat(&self) -> bool {
        self.agreed && self.verdicts.oracle.is_fat()
    }
}

fn check_len<S: Scalar>(g: &LieAlgebra<S>, x: &[S]) -> Result<()> {
    if x.len() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            got: x.len(),
        });
    }
    Ok(())
}

/// `Omega(X, Y) = -1/2 [X, Y]_h` for `X, Y` in `m`.
pub fn canonical_curvature<S: Scalar>(emb: &SubalgebraEmbedding<S>, x: &[S], y: &[S]) -> Result<Vec<S>> {
    let g = emb.ambient();
    check_len(g, x)?;
    check_len(g, y)?;
    if !emb.in_m(x) || !emb.in_m(y) {
        return Err(Error::NotInComplement);
    }
    let (h, _) = emb.project(&g.bracket(x, y)?);
    let half = S::from_rational(&crate::scalar::q(-1, 2));
    Ok(h.into_iter().map(|v| half.clone() * v).collect())
}

/// `G_ij = B(X_u, [m_i, m_j])` over the `m`-basis.
pub fn fatness_gram<S: Scalar>(emb: &SubalgebraEmbedding<S>, x_u: &[S]) -> Result<Mat<S>> {
    let g = emb.ambient();
    check_len(g, x_u)?;
    let w = g.killing_gram().mul_vec(x_u);
    let m = emb.m_basis();
    let d = m.len();
    let mut gram = Mat::zeros(d, d);
    for i in 0..d {
        for j in i + 1..d {
            let br = g.bracket_unchecked(&m[i], &m[j]);
            let v = crate::scalar::dot(&w, &br);
            gram[(j, i)] = -v.clone();
            gram[(i, j)] = v;
        }
    }
    Ok(gram)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleVerdict {
    pub verdict: Verdict,
    /// Descending.
    pub singular_values: Vec<f64>,
    pub null_vector: Option<Vec<f64>>,
    pub residual: Option<f64>,
    pub odd_dimension: bool,
}

impl OracleVerdict {
    pub fn min_sv(&self) -> Option<f64> {
        self.singular_values.last().copied()
    }

    pub fn max_sv(&self) -> Option<f64> {
        self.singular_values.first().copied()
    }
}

/// Relative smallest-singular-value test on an antisymmetric Gram.
pub fn oracle_from_gram<S: Scalar>(gram: &Mat<S>, tol: f64) -> OracleVerdict {
    let d = gram.nrows();
    if d == 0 {
        return OracleVerdict {
            verdict: Verdict::Fat,
            singular_values: Vec::new(),
            null_vector: None,
            residual: None,
            odd_dimension: false,
        };
    }
    let dm: DMatrix<f64> = gram.to_dmatrix();
    let sv = singular_values(&dm);
    let (smin, smax) = (sv[sv.len() - 1], sv[0]);
    let odd = d % 2 == 1;
    let fat = !odd && smax > 0.0 && smin > tol * smax;
    let (null_vector, residual) = if fat {
        (None, None)
    } else {
        match smallest_singular_pair(&dm) {
            Some((_, v)) => {
                let gv = &dm * nalgebra::DVector::from_column_slice(&v);
                (Some(v), Some(gv.norm()))
            }
            None => (None, None),
        }
    };
    OracleVerdict {
        verdict: Verdict::from_fat(fat),
        singular_values: sv,
        null_vector,
        residual,
        odd_dimension: odd,
    }
}

pub fn fat_by_oracle<S: Scalar>(emb: &SubalgebraEmbedding<S>, x_u: &[S], tol: f64) -> Result<OracleVerdict> {
    Ok(oracle_from_gram(&fatness_gram(emb, x_u)?, tol))
}

/// `{Y in g : [Y, X_u] = 0}`.
pub fn isotropy_algebra<S: Scalar>(g: &LieAlgebra<S>, x_u: &[S]) -> Result<Vec<Vec<S>>> {
    check_len(g, x_u)?;
    Ok(g.ad_matrix(x_u).nullspace())
}

#[derive(Clone, Debug, PartialEq)]
pub struct CentralizerVerdict<S: Scalar = Rational> {
    pub verdict: Verdict,
    pub kernel_dim: usize,
    pub witness: Option<Vec<S>>,
}

/// Fat iff `ker ad(X_u)` meets `m` only in zero.
pub fn fat_by_centralizer<S: Scalar>(emb: &SubalgebraEmbedding<S>, x_u: &[S]) -> Result<CentralizerVerdict<S>> {
    let g = emb.ambient();
    let kernel = isotropy_algebra(g, x_u)?;
    // combinations of kernel vectors with vanishing h-part
    let h_parts: Vec<Vec<S>> = kernel.iter().map(|k| emb.split_coefficients(k).0).collect();
    let witness = if emb.dim_h() == 0 {
        kernel.first().cloned()
    } else {
        Mat::from_cols(&h_parts, emb.dim_h())
            .nullspace()
            .first()
            .map(|c| {
                let mut v = g.zero_vector();
                for (ci, k) in c.iter().zip(&kernel) {
                    crate::scalar::axpy(ci, k, &mut v);
                }
                v
            })
    };
    Ok(CentralizerVerdict {
        verdict: Verdict::from_fat(witness.is_none()),
        kernel_dim: kernel.len(),
        witness,
    })
}

/// Run every applicable criterion and require agreement.
///
/// The root test applies when `sub` is given, `X_u` lies in the torus of
/// `emb` and the arithmetic is exact.
pub fn certify<S: Scalar>(
    instance: &str,
    emb: &SubalgebraEmbedding<S>,
    sub: Option<&SubSystem>,
    x_u: &[S],
    tol: f64,
) -> Result<FatnessCertificate> {
    let g = emb.ambient();
    check_len(g, x_u)?;
    if !emb.in_h(x_u) {
        return Err(Error::NotInSubalgebra);
    }
    let torus = emb.torus_coordinates(x_u);
    let exact_torus: Option<TorusVector> = torus
        .as_ref()
        .and_then(|t| t.iter().map(Scalar::to_rational).collect::<Option<Vec<_>>>())
        .map(TorusVector);
    let root = match (sub, &exact_torus) {
        (Some(sub), Some(t)) => Some(fat_by_roots(t, sub)?),
        _ => None,
    };
    let oracle = fat_by_oracle(emb, x_u, tol)?;
    let cent = fat_by_centralizer(emb, x_u)?;

    let roots_verdict = root.as_ref().map_or(Verdict::NotApplicable, |r| Verdict::from_fat(r.fat));
    let applicable = [roots_verdict, oracle.verdict, cent.verdict];
    let agreed = applicable
        .iter()
        .filter(|v| **v != Verdict::NotApplicable)
        .all(|v| *v == oracle.verdict);

    let cert = FatnessCertificate {
        instance: instance.to_string(),
        xu: scalar_strings(x_u),
        xu_torus: torus.as_deref().map(scalar_strings),
        verdicts: Verdicts {
            roots: roots_verdict,
            oracle: oracle.verdict,
            centralizer: cent.verdict,
        },
        min_sv: oracle.min_sv(),
        max_sv: oracle.max_sv(),
        tol,
        centralizer_dim: cent.kernel_dim,
        witnesses: Witnesses {
            root: root.and_then(|r| r.witness_root),
            null_vector: oracle.null_vector,
            null_residual: oracle.residual,
            odd_dimension: oracle.odd_dimension,
            centralizer_element: cent.witness.as_deref().map(scalar_strings),
        },
        agreed,
        seed: None,
    };
    if agreed {
        Ok(cert)
    } else {
        Err(Error::CriteriaDisagree(Box::new(cert)))
    }
}

/// Seeded exact torus samples: `(t-coordinates, ambient vector)` pairs.
pub fn sample_torus<S: Scalar>(
    emb: &SubalgebraEmbedding<S>,
    count: usize,
    seed: u64,
) -> Result<Vec<(TorusVector, Vec<S>)>> {
    TorusVector::sample(emb.rank(), count, seed)
        .into_iter()
        .map(|t| {
            let x = emb.torus_element(&t.to_scalars::<S>())?;
            Ok((t, x))
        })
        .collect()
}
