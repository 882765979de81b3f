//! The invariant coupling form on `H/V -> G/V -> G/H` at the identity coset.
//!
//! `V` is the isotropy of `X_u` inside `H`, `n` is the Killing complement of
//! `v` in `g`, split as `n = (h ∩ n) + m` into vertical and horizontal parts.
//! The form is `sigma_u(X, Y) = B(X_u, [X, Y])` on `n`; it is closed by the
//! Jacobi identity and nondegenerate exactly when `u` is fat.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fatness::{canonical_curvature, fatness_gram, oracle_from_gram, DEFAULT_TOL};
use crate::liealg::{LieAlgebra, SubalgebraEmbedding};
use crate::linalg::Mat;
use crate::scalar::{dot, max_magnitude, scalar_string, Scalar};

#[derive(Clone, Debug)]
pub struct HomogeneousBundleInstance<S: Scalar> {
    emb: SubalgebraEmbedding<S>,
    x_u: Vec<S>,
    v_basis: Vec<Vec<S>>,
    /// Vertical `h ∩ n` first, then the `m`-basis of the embedding.
    n_basis: Vec<Vec<S>>,
    vertical_dim: usize,
}

/// `{Y in h : [Y, X_u] = 0}`.
pub fn isotropy_in_h<S: Scalar>(emb: &SubalgebraEmbedding<S>, x_u: &[S]) -> Vec<Vec<S>> {
    let g = emb.ambient();
    let cols: Vec<Vec<S>> = emb
        .h_basis()
        .iter()
        .map(|h| g.bracket_unchecked(h, x_u))
        .collect();
    if cols.is_empty() {
        return Vec::new();
    }
    Mat::from_cols(&cols, g.dim())
        .nullspace()
        .into_iter()
        .map(|c| emb.h_element(&c))
        .collect()
}

fn span_rank<S: Scalar>(vs: &[Vec<S>], dim: usize) -> usize {
    if vs.is_empty() {
        0
    } else {
        Mat::from_rows(vs).rank().min(dim)
    }
}

impl<S: Scalar> HomogeneousBundleInstance<S> {
    /// Requires `X_u` in `h`; `v` is computed as the isotropy of `X_u` in `h`.
    pub fn new(emb: SubalgebraEmbedding<S>, x_u: Vec<S>) -> Result<Self> {
        let v = isotropy_in_h(&emb, &x_u);
        Self::with_isotropy(emb, x_u, v)
    }

    /// As [`Self::new`] with a caller-supplied basis of `v`, which must span
    /// the isotropy of `X_u` in `h`.
    pub fn with_isotropy(emb: SubalgebraEmbedding<S>, x_u: Vec<S>, v_basis: Vec<Vec<S>>) -> Result<Self> {
        let g = emb.ambient();
        if x_u.len() != g.dim() {
            return Err(Error::DimensionMismatch {
                expected: g.dim(),
                got: x_u.len(),
            });
        }
        if !emb.in_h(&x_u) {
            return Err(Error::NotInSubalgebra);
        }
        let iso = isotropy_in_h(&emb, &x_u);
        let dim = g.dim();
        let same_span = span_rank(&v_basis, dim) == v_basis.len()
            && v_basis.len() == iso.len()
            && span_rank(&[v_basis.clone(), iso.clone()].concat(), dim) == iso.len();
        if !same_span {
            return Err(Error::IsotropyMismatch);
        }
        let k = g.killing_gram();
        if !v_basis.is_empty() {
            let vrows = Mat::from_rows(&v_basis);
            if vrows.mul(k).mul(&vrows.transpose()).rank() != v_basis.len() {
                return Err(Error::DegenerateRestriction);
            }
        }
        // vertical part: Killing complement of v inside h
        let vertical: Vec<Vec<S>> = if v_basis.is_empty() {
            emb.h_basis().to_vec()
        } else {
            let hrows = Mat::from_rows(emb.h_basis());
            let vrows = Mat::from_rows(&v_basis);
            vrows
                .mul(k)
                .mul(&hrows.transpose())
                .nullspace()
                .into_iter()
                .map(|c| emb.h_element(&c))
                .collect()
        };
        let vertical_dim = vertical.len();
        let mut n_basis = vertical;
        n_basis.extend(emb.m_basis().iter().cloned());
        // [v, n] must stay Killing-orthogonal to v
        for a in &v_basis {
            for b in &n_basis {
                let br = g.bracket_unchecked(a, b);
                let scale = max_magnitude(a) * max_magnitude(b);
                for c in &v_basis {
                    if !g.killing_gram().bilinear(&br, c).is_negligible(scale * max_magnitude(c)) {
                        return Err(Error::NotClosed);
                    }
                }
            }
        }
        Ok(Self {
            emb,
            x_u,
            v_basis,
            n_basis,
            vertical_dim,
        })
    }

    pub fn embedding(&self) -> &SubalgebraEmbedding<S> {
        &self.emb
    }

    pub fn ambient(&self) -> &LieAlgebra<S> {
        self.emb.ambient()
    }

    pub fn x_u(&self) -> &[S] {
        &self.x_u
    }

    pub fn v_basis(&self) -> &[Vec<S>] {
        &self.v_basis
    }

    pub fn n_basis(&self) -> &[Vec<S>] {
        &self.n_basis
    }

    pub fn vertical_dim(&self) -> usize {
        self.vertical_dim
    }

    pub fn horizontal_dim(&self) -> usize {
        self.n_basis.len() - self.vertical_dim
    }

    /// Coefficients of each ambient basis vector along `v ++ n`.
    fn ambient_coefficients(&self) -> Result<Mat<S>> {
        let cols: Vec<Vec<S>> = self.v_basis.iter().chain(&self.n_basis).cloned().collect();
        Mat::from_cols(&cols, self.ambient().dim()).inverse()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvariantTwoForm<S: Scalar> {
    /// Gram over the `n`-basis of the instance.
    pub gram: Mat<S>,
    pub scale: S,
    pub vertical_dim: usize,
}

impl<S: Scalar> InvariantTwoForm<S> {
    pub fn scaled(&self, r: &S) -> Self {
        Self {
            gram: self.gram.scaled(r),
            scale: self.scale.clone() * r.clone(),
            vertical_dim: self.vertical_dim,
        }
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    /// The same form with its horizontal block multiplied by `factor`.
    pub fn with_horizontal_factor(&self, factor: &S) -> Self {
        let v = self.vertical_dim;
        let mut gram = self.gram.clone();
        for i in v..gram.nrows() {
            for j in v..gram.ncols() {
                gram[(i, j)] = gram[(i, j)].clone() * factor.clone();
            }
        }
        Self {
            gram,
            scale: self.scale.clone(),
            vertical_dim: v,
        }
    }

    /// Extension by zero on `v`, as a Gram over the ambient basis.
    pub fn on_ambient(&self, inst: &HomogeneousBundleInstance<S>) -> Result<Mat<S>> {
        let coeff = inst.ambient_coefficients()?;
        let dv = inst.v_basis.len();
        let dim = inst.ambient().dim();
        let nrows: Vec<Vec<S>> = (0..self.dim()).map(|a| coeff.row(dv + a).to_vec()).collect();
        let n = Mat::from_rows(&nrows);
        debug_assert_eq!(n.ncols(), dim);
        Ok(n.transpose().mul(&self.gram).mul(&n))
    }
}

/// `sigma_u(X, Y) = B(X_u, [X, Y])` over the `n`-basis.
pub fn coupling_form<S: Scalar>(inst: &HomogeneousBundleInstance<S>) -> InvariantTwoForm<S> {
    let g = inst.ambient();
    let w = g.killing_gram().mul_vec(&inst.x_u);
    let d = inst.n_basis.len();
    let mut gram = Mat::zeros(d, d);
    for i in 0..d {
        for j in i + 1..d {
            let v = dot(&w, &g.bracket_unchecked(&inst.n_basis[i], &inst.n_basis[j]));
            gram[(j, i)] = -v.clone();
            gram[(i, j)] = v;
        }
    }
    InvariantTwoForm {
        gram,
        scale: S::one(),
        vertical_dim: inst.vertical_dim,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockReport {
    pub vertical_dim: usize,
    pub horizontal_dim: usize,
    pub cross_block_zero: bool,
    pub cross_block_max: f64,
    pub vertical_rank: usize,
    pub vertical_nondegenerate: bool,
    /// Horizontal block equals `scale` times the fatness Gram.
    pub horizontal_matches_fatness_gram: bool,
    /// Constant ratio of the connection-curvature pairing
    /// `<u, -1/2 [X, Y]_h>` to the horizontal block, when defined.
    pub curvature_to_horizontal_ratio: Option<String>,
}

pub fn verify_block_structure<S: Scalar>(
    inst: &HomogeneousBundleInstance<S>,
    form: &InvariantTwoForm<S>,
) -> Result<BlockReport> {
    let v = form.vertical_dim;
    let d = form.dim();
    let scale = max_magnitude(form.gram.as_slice());
    let mut cross_max: f64 = 0.0;
    let mut cross_zero = true;
    for i in 0..v {
        for j in v..d {
            let e = &form.gram[(i, j)];
            cross_max = cross_max.max(e.to_f64().abs());
            cross_zero &= e.is_negligible(scale);
        }
    }
    let vertical = Mat::from_fn(v, v, |i, j| form.gram[(i, j)].clone());
    let vertical_rank = if v == 0 { 0 } else { vertical.rank() };
    let horizontal = Mat::from_fn(d - v, d - v, |i, j| form.gram[(v + i, v + j)].clone());
    let fat_gram = fatness_gram(inst.embedding(), inst.x_u())?.scaled(&form.scale);
    let horizontal_matches = horizontal
        .sub(&fat_gram)
        .as_slice()
        .iter()
        .all(|e| e.is_negligible(scale));

    // connection-curvature pairing on the same horizontal basis
    let g = inst.ambient();
    let m = inst.embedding().m_basis();
    let mut ratio: Option<S> = None;
    let mut constant = true;
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            let h = &horizontal[(i, j)];
            let omega = canonical_curvature(inst.embedding(), &m[i], &m[j])?;
            let c = g.killing_gram().bilinear(inst.x_u(), &omega) * form.scale.clone();
            if h.is_negligible(scale) {
                constant &= c.is_negligible(scale);
                continue;
            }
            let r = c / h.clone();
            match &ratio {
                None => ratio = Some(r),
                Some(r0) => constant &= (r0.clone() - r).is_negligible(1.0),
            }
        }
    }
    Ok(BlockReport {
        vertical_dim: v,
        horizontal_dim: d - v,
        cross_block_zero: cross_zero,
        cross_block_max: cross_max,
        vertical_rank,
        vertical_nondegenerate: vertical_rank == v,
        horizontal_matches_fatness_gram: horizontal_matches,
        curvature_to_horizontal_ratio: ratio.filter(|_| constant).map(|r| scalar_string(&r)),
    })
}

/// `max |d sigma(e_i, e_j, e_k)|` over basis triples of `g`, with
/// `d sigma(X,Y,Z) = -sigma([X,Y],Z) - sigma([Y,Z],X) - sigma([Z,X],Y)`.
pub fn ce_closedness<S: Scalar>(g: &LieAlgebra<S>, form_on_g: &Mat<S>) -> Result<S> {
    let dim = g.dim();
    if form_on_g.nrows() != dim || form_on_g.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: form_on_g.nrows(),
        });
    }
    // sigma([e_a, e_b], e_c) = sum_k c^k_ab F_kc
    let sigma_br = |a: usize, b: usize, c: usize| -> S {
        let mut s = S::zero();
        for k in 0..dim {
            let ck = g.structure_constant(a, b, k);
            if !ck.is_zero() {
                s = s + ck.clone() * form_on_g[(k, c)].clone();
            }
        }
        s
    };
    let mut worst = S::zero();
    for i in 0..dim {
        for j in i + 1..dim {
            for k in j + 1..dim {
                let d = -(sigma_br(i, j, k) + sigma_br(j, k, i) + sigma_br(k, i, j));
                let a = d.abs();
                if a > worst {
                    worst = a;
                }
            }
        }
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TopPowerReport {
    pub half_dim: usize,
    pub min_sv: Option<f64>,
    pub pfaffian: String,
    pub nonzero: bool,
}

/// Smallest singular value and Pfaffian; a nonzero Pfaffian certifies
/// `sigma^{half_dim} != 0` at the point.
pub fn nondegenerate_and_top_power<S: Scalar>(form: &InvariantTwoForm<S>, half_dim: usize) -> Result<TopPowerReport> {
    let d = form.dim();
    if d % 2 == 1 {
        return Err(Error::OddDimension(d));
    }
    if d != 2 * half_dim {
        return Err(Error::DimensionMismatch {
            expected: 2 * half_dim,
            got: d,
        });
    }
    let oracle = oracle_from_gram(&form.gram, DEFAULT_TOL);
    let pf = form.gram.pfaffian();
    let nonzero = if S::EXACT {
        !pf.is_zero()
    } else {
        oracle.verdict.is_fat()
    };
    Ok(TopPowerReport {
        half_dim,
        min_sv: oracle.min_sv(),
        pfaffian: scalar_string(&pf),
        nonzero,
    })
}

/// Coupling form at the shifted point `X_u + X_a`, `a` in torus coordinates.
/// On a forbidden wall the returned form is degenerate.
pub fn shifted_coupling<S: Scalar>(
    emb: &SubalgebraEmbedding<S>,
    x_u: &[S],
    a: &[S],
) -> Result<(HomogeneousBundleInstance<S>, InvariantTwoForm<S>)> {
    let xa = emb.torus_element(a)?;
    let shifted: Vec<S> = x_u.iter().zip(&xa).map(|(p, q)| p.clone() + q.clone()).collect();
    let inst = HomogeneousBundleInstance::new(emb.clone(), shifted)?;
    let form = coupling_form(&inst);
    Ok((inst, form))
}

#[cfg(test)]
mod tests;
