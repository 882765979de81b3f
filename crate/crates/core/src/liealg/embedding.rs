use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{block_torus, LieAlgebra};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::{axpy, is_zero_vec, max_magnitude, Rational, Scalar};

/// A subalgebra `h` of `g` with its Killing-orthogonal complement `m`
/// and a maximal abelian subalgebra `t` of `h`.
#[derive(Clone, Debug)]
pub struct SubalgebraEmbedding<S: Scalar = Rational> {
    ambient: Arc<LieAlgebra<S>>,
    h_basis: Vec<Vec<S>>,
    m_basis: Vec<Vec<S>>,
    /// Inverse of the matrix with columns `h_basis ++ m_basis`.
    split_inv: Mat<S>,
    torus: Vec<Vec<S>>,
    compact: bool,
}

/// Split `g = h + m` with `m` the Killing-orthogonal complement of `h`.
pub fn reductive_split<S: Scalar>(
    g: Arc<LieAlgebra<S>>,
    h_basis: Vec<Vec<S>>,
) -> Result<SubalgebraEmbedding<S>> {
    let dim = g.dim();
    if let Some(bad) = h_basis.iter().find(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: bad.len(),
        });
    }
    let dim_h = h_basis.len();
    let h_cols = Mat::from_cols(&h_basis, dim);
    if h_cols.rank() != dim_h {
        return Err(Error::InvalidBasis("subalgebra basis is linearly dependent".into()));
    }
    for i in 0..dim_h {
        for j in i + 1..dim_h {
            let br = g.bracket_unchecked(&h_basis[i], &h_basis[j]);
            if h_cols.solve_any(&br).is_none() {
                return Err(Error::NotClosed);
            }
        }
    }
    let h_rows = Mat::from_rows(&h_basis);
    let hk = h_rows.mul(g.killing_gram());
    let gram_h = hk.mul(&h_rows.transpose());
    if gram_h.rank() != dim_h {
        return Err(Error::DegenerateRestriction);
    }
    let compact = gram_h.inertia().negative == dim_h;
    let m_basis = if dim_h == 0 {
        (0..dim).map(|i| g.unit(i)).collect()
    } else {
        hk.nullspace()
    };
    let all: Vec<Vec<S>> = h_basis.iter().chain(&m_basis).cloned().collect();
    let split_inv = Mat::from_cols(&all, dim).inverse()?;
    let emb = SubalgebraEmbedding {
        ambient: g,
        h_basis,
        m_basis,
        split_inv,
        torus: Vec::new(),
        compact,
    };
    // [h, m] must stay in m
    for hb in &emb.h_basis {
        for mb in &emb.m_basis {
            let br = emb.ambient.bracket_unchecked(hb, mb);
            let (hc, _) = emb.split_coefficients(&br);
            if !is_zero_vec(&hc, max_magnitude(&br)) {
                return Err(Error::InvalidBasis("complement is not ad(h)-invariant".into()));
            }
        }
    }
    Ok(emb)
}

impl<S: Scalar> SubalgebraEmbedding<S> {
    /// Reductive split plus a maximal torus when `h` is compact.
    pub fn new(g: Arc<LieAlgebra<S>>, h_basis: Vec<Vec<S>>) -> Result<Self> {
        let mut emb = reductive_split(g, h_basis)?;
        if emb.compact && emb.dim_h() > 0 {
            emb.torus = emb.maximal_torus()?;
        }
        Ok(emb)
    }

    pub fn ambient(&self) -> &LieAlgebra<S> {
        &self.ambient
    }

    pub fn ambient_arc(&self) -> &Arc<LieAlgebra<S>> {
        &self.ambient
    }

    pub fn h_basis(&self) -> &[Vec<S>] {
        &self.h_basis
    }

    pub fn m_basis(&self) -> &[Vec<S>] {
        &self.m_basis
    }

    pub fn dim_h(&self) -> usize {
        self.h_basis.len()
    }

    pub fn dim_m(&self) -> usize {
        self.m_basis.len()
    }

    pub fn is_compact(&self) -> bool {
        self.compact
    }

    pub fn torus(&self) -> &[Vec<S>] {
        &self.torus
    }

    pub fn rank(&self) -> usize {
        self.torus.len()
    }

    /// Replace the torus after checking it is abelian, inside `h` and maximal.
    pub fn with_torus(mut self, torus: Vec<Vec<S>>) -> Result<Self> {
        let g = &self.ambient;
        for t in &torus {
            if !self.in_h(t) {
                return Err(Error::TorusMismatch("torus element outside h".into()));
            }
        }
        for (i, a) in torus.iter().enumerate() {
            for b in &torus[i + 1..] {
                let br = g.bracket_unchecked(a, b);
                if !is_zero_vec(&br, max_magnitude(a) * max_magnitude(b)) {
                    return Err(Error::TorusMismatch("torus is not abelian".into()));
                }
            }
        }
        if self.compact && !torus.is_empty() {
            let rank = self.maximal_torus()?.len();
            if torus.len() != rank || Mat::from_cols(&torus, g.dim()).rank() != rank {
                return Err(Error::TorusMismatch(format!(
                    "expected {rank} independent torus elements"
                )));
            }
        }
        self.torus = torus;
        Ok(self)
    }

    /// Coefficients of `x` along `h_basis` and `m_basis`.
    pub fn split_coefficients(&self, x: &[S]) -> (Vec<S>, Vec<S>) {
        let mut c = self.split_inv.mul_vec(x);
        let m = c.split_off(self.dim_h());
        (c, m)
    }

    pub fn h_element(&self, coeffs: &[S]) -> Vec<S> {
        combine(&self.h_basis, coeffs, self.ambient.dim())
    }

    pub fn m_element(&self, coeffs: &[S]) -> Vec<S> {
        combine(&self.m_basis, coeffs, self.ambient.dim())
    }

    /// `x -> (x_h, x_m)` in ambient coordinates.
    pub fn project(&self, x: &[S]) -> (Vec<S>, Vec<S>) {
        let (hc, mc) = self.split_coefficients(x);
        (self.h_element(&hc), self.m_element(&mc))
    }

    pub fn in_h(&self, x: &[S]) -> bool {
        let (_, mc) = self.split_coefficients(x);
        is_zero_vec(&mc, max_magnitude(x))
    }

    pub fn in_m(&self, x: &[S]) -> bool {
        let (hc, _) = self.split_coefficients(x);
        is_zero_vec(&hc, max_magnitude(x))
    }

    /// `sum_i t_i T_i` for torus coordinates `t`.
    pub fn torus_element(&self, coords: &[S]) -> Result<Vec<S>> {
        if coords.len() != self.torus.len() {
            return Err(Error::DimensionMismatch {
                expected: self.torus.len(),
                got: coords.len(),
            });
        }
        Ok(combine(&self.torus, coords, self.ambient.dim()))
    }

    /// Torus coordinates of `x`, if `x` lies in `t`.
    pub fn torus_coordinates(&self, x: &[S]) -> Option<Vec<S>> {
        if self.torus.is_empty() {
            return None;
        }
        Mat::from_cols(&self.torus, self.ambient.dim()).solve_any(x)
    }

    /// Gram matrix of the Killing form on `h`.
    pub fn h_gram(&self) -> Mat<S> {
        let rows = Mat::from_rows(&self.h_basis);
        rows.mul(self.ambient.killing_gram()).mul(&rows.transpose())
    }

    /// A maximal abelian subalgebra of a compact `h`. Prefers the built-in
    /// block torus of the ambient family when it lies in `h` with full rank.
    pub fn maximal_torus(&self) -> Result<Vec<Vec<S>>> {
        if !self.compact {
            return Err(Error::NotCompact);
        }
        let generic = self.generic_centralizer()?;
        if let Some(blocks) = block_torus(&self.ambient) {
            let inside: Vec<Vec<S>> = blocks.into_iter().filter(|b| self.in_h(b)).collect();
            if inside.len() == generic.len() {
                return Ok(inside);
            }
        }
        Ok(generic)
    }

    /// Centralizer in `h` of a regular element; abelian, hence a maximal torus.
    fn generic_centralizer(&self) -> Result<Vec<Vec<S>>> {
        let dh = self.dim_h();
        let mut rng = ChaCha8Rng::seed_from_u64(0x70_7275);
        for attempt in 0..12 {
            let weights: Vec<S> = (0..dh)
                .map(|k| {
                    let w = match attempt {
                        0 => k as i64 + 1,
                        1 => (k * k) as i64 + 1,
                        _ => rng.random_range(-50i64..=50),
                    };
                    S::from_i64(w)
                })
                .collect();
            let x = self.h_element(&weights);
            let cols: Vec<Vec<S>> = self
                .h_basis
                .iter()
                .map(|h| self.ambient.bracket_unchecked(&x, h))
                .collect();
            let kernel: Vec<Vec<S>> = Mat::from_cols(&cols, self.ambient.dim())
                .nullspace()
                .into_iter()
                .map(|c| self.h_element(&c))
                .collect();
            let abelian = kernel.iter().enumerate().all(|(i, a)| {
                kernel[i + 1..].iter().all(|b| {
                    let br = self.ambient.bracket_unchecked(a, b);
                    is_zero_vec(&br, max_magnitude(a) * max_magnitude(b))
                })
            });
            if abelian {
                return Ok(kernel);
            }
        }
        Err(Error::TorusMismatch("no regular element found in h".into()))
    }

    pub fn to_float(&self) -> SubalgebraEmbedding<f64> {
        let conv = |vs: &[Vec<S>]| -> Vec<Vec<f64>> {
            vs.iter().map(|v| v.iter().map(Scalar::to_f64).collect()).collect()
        };
        SubalgebraEmbedding {
            ambient: Arc::new(self.ambient.to_float()),
            h_basis: conv(&self.h_basis),
            m_basis: conv(&self.m_basis),
            split_inv: Mat::from_fn(self.split_inv.nrows(), self.split_inv.ncols(), |r, c| {
                self.split_inv[(r, c)].to_f64()
            }),
            torus: conv(&self.torus),
            compact: self.compact,
        }
    }
}

fn combine<S: Scalar>(basis: &[Vec<S>], coeffs: &[S], dim: usize) -> Vec<S> {
    let mut v = vec![S::zero(); dim];
    for (c, b) in coeffs.iter().zip(basis) {
        axpy(c, b, &mut v);
    }
    v
}

/// A covector `u = B(X_u, .)` stored through its representative `X_u`.
#[derive(Clone, Debug, PartialEq)]
pub struct Covector<S: Scalar = Rational> {
    representative: Vec<S>,
}

impl<S: Scalar> Covector<S> {
    pub fn from_vector(x: Vec<S>) -> Self {
        Self { representative: x }
    }

    /// Solve `B(X_u, e_j) = values[j]`; needs a nondegenerate Killing form.
    pub fn from_values(g: &LieAlgebra<S>, values: &[S]) -> Result<Self> {
        let x = g.killing_gram().solve(values).map_err(|_| Error::DegenerateRestriction)?;
        Ok(Self { representative: x })
    }

    /// Covector on `h` given by its values on `h_basis`; the representative
    /// is taken inside `h`.
    pub fn from_h_values(emb: &SubalgebraEmbedding<S>, values: &[S]) -> Result<Self> {
        let c = emb.h_gram().solve(values).map_err(|_| Error::DegenerateRestriction)?;
        Ok(Self {
            representative: emb.h_element(&c),
        })
    }

    pub fn representative(&self) -> &[S] {
        &self.representative
    }

    /// Values `u(e_j)` on the ambient basis.
    pub fn values(&self, g: &LieAlgebra<S>) -> Vec<S> {
        g.killing_gram().mul_vec(&self.representative)
    }

    pub fn h_values(&self, emb: &SubalgebraEmbedding<S>) -> Vec<S> {
        let k = emb.ambient().killing_gram();
        emb.h_basis().iter().map(|h| k.bilinear(&self.representative, h)).collect()
    }
}
