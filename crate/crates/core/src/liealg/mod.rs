//! Matrix Lie algebras: structure constants, Killing form, reductive splittings
//! and the Killing-form identification of vectors with covectors.

mod embedding;
mod families;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Inertia, Mat};
use crate::scalar::{Rational, Scalar};

pub use embedding::{reductive_split, Covector, SubalgebraEmbedding};
pub use families::{
    block_torus, build_algebra, complex_structure, so_block, so_pair_index, u_block,
};

/// Built-in classical families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// Compact `so(n)`.
    So(usize),
    /// `so(p,q)`, preserving `diag(1^p, (-1)^q)`.
    SoPq(usize, usize),
    /// `su(n)` realified as `2n x 2n` real matrices.
    Su(usize),
    /// `u(n)` as the commutant of the standard complex structure in `so(2n)`.
    UInSo(usize),
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::So(n) => write!(f, "so({n})"),
            Family::SoPq(p, q) => write!(f, "so({p},{q})"),
            Family::Su(n) => write!(f, "su({n})"),
            Family::UInSo(n) => write!(f, "u({n})<so({})", 2 * n),
        }
    }
}

/// A finite-dimensional real Lie algebra realized by a basis of square
/// matrices, together with its structure constants and Killing Gram matrix.
#[derive(Clone, Debug)]
pub struct LieAlgebra<S: Scalar = Rational> {
    name: String,
    family: Option<Family>,
    basis: Vec<Mat<S>>,
    /// `c^k_ij` at `(i * dim + j) * dim + k`.
    structure: Vec<S>,
    /// Nonzero `(k, c^k_ij)` for each pair `(i, j)`.
    sparse: Vec<Vec<(usize, S)>>,
    killing: Mat<S>,
    /// Flattened matrix positions that determine coordinates.
    coord_positions: Vec<usize>,
    coord_inv: Mat<S>,
}

impl<S: Scalar> LieAlgebra<S> {
    /// Build from a basis of square matrices closed under the commutator.
    pub fn from_basis(name: impl Into<String>, basis: Vec<Mat<S>>) -> Result<Self> {
        let name = name.into();
        let first = basis
            .first()
            .ok_or_else(|| Error::InvalidBasis("empty basis".into()))?;
        let n = first.nrows();
        if basis.iter().any(|b| !b.is_square() || b.nrows() != n) {
            return Err(Error::InvalidBasis("basis matrices must be square of equal size".into()));
        }
        let dim = basis.len();
        let flat = Mat::from_rows(&basis.iter().map(|b| b.as_slice().to_vec()).collect::<Vec<_>>());
        let (_, pivots) = flat.rref();
        if pivots.len() != dim {
            return Err(Error::InvalidBasis("basis matrices are linearly dependent".into()));
        }
        // coordinates c solve sum_i c_i B_i[pos] = M[pos]
        let sub = Mat::from_fn(dim, dim, |k, i| flat[(i, pivots[k])].clone());
        let coord_inv = sub.inverse()?;
        let mut alg = Self {
            name,
            family: None,
            basis,
            structure: Vec::new(),
            sparse: Vec::new(),
            killing: Mat::zeros(dim, dim),
            coord_positions: pivots,
            coord_inv,
        };
        let mut structure = vec![S::zero(); dim * dim * dim];
        for i in 0..dim {
            for j in i + 1..dim {
                let c = alg.basis[i].commutator(&alg.basis[j]);
                let coords = alg.coordinates(&c).map_err(|_| Error::NotClosed)?;
                for (k, v) in coords.into_iter().enumerate() {
                    if v.is_zero() {
                        continue;
                    }
                    structure[(j * dim + i) * dim + k] = -v.clone();
                    structure[(i * dim + j) * dim + k] = v;
                }
            }
        }
        alg.set_structure(structure);
        Ok(alg)
    }

    /// Build from structure constants `c^k_ij` (flat, `[(i*dim+j)*dim+k]`),
    /// realized through the adjoint representation. Requires a trivial
    /// center so that `ad` is faithful.
    pub fn from_structure_constants(name: impl Into<String>, dim: usize, c: Vec<S>) -> Result<Self> {
        if c.len() != dim * dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim * dim,
                got: c.len(),
            });
        }
        let scale = crate::scalar::max_magnitude(&c);
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    let s = c[(i * dim + j) * dim + k].clone() + c[(j * dim + i) * dim + k].clone();
                    if !s.is_negligible(scale) {
                        return Err(Error::InvalidBasis("structure constants are not antisymmetric".into()));
                    }
                }
            }
        }
        // (ad e_i)[k][j] = c^k_ij
        let basis = (0..dim)
            .map(|i| Mat::from_fn(dim, dim, |k, j| c[(i * dim + j) * dim + k].clone()))
            .collect();
        let alg = Self::from_basis(name, basis)?;
        if !S::EXACT {
            return Ok(alg);
        }
        if alg.structure != c {
            return Err(Error::InvalidBasis("structure constants violate the Jacobi identity".into()));
        }
        Ok(alg)
    }

    fn set_structure(&mut self, structure: Vec<S>) {
        let dim = self.dim();
        self.sparse = (0..dim * dim)
            .map(|ij| {
                (0..dim)
                    .filter_map(|k| {
                        let v = &structure[ij * dim + k];
                        (!v.is_zero()).then(|| (k, v.clone()))
                    })
                    .collect()
            })
            .collect();
        self.structure = structure;
        self.killing = self.compute_killing();
    }

    fn compute_killing(&self) -> Mat<S> {
        // B_ij = tr(ad_i ad_j) = sum_{k,l} c^l_ik c^k_jl
        let dim = self.dim();
        let mut b = Mat::zeros(dim, dim);
        for i in 0..dim {
            for j in i..dim {
                let mut acc = S::zero();
                for k in 0..dim {
                    for (l, cl) in &self.sparse[i * dim + k] {
                        let ck = &self.structure[(j * dim + l) * dim + k];
                        if !ck.is_zero() {
                            acc = acc + cl.clone() * ck.clone();
                        }
                    }
                }
                b[(i, j)] = acc.clone();
                b[(j, i)] = acc;
            }
        }
        b
    }

    pub fn with_family(mut self, family: Family) -> Self {
        self.family = Some(family);
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn family(&self) -> Option<Family> {
        self.family
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Size of the realizing matrices.
    pub fn matrix_size(&self) -> usize {
        self.basis[0].nrows()
    }

    pub fn basis(&self) -> &[Mat<S>] {
        &self.basis
    }

    pub fn structure_constants(&self) -> &[S] {
        &self.structure
    }

    /// `c^k_ij`.
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> &S {
        let d = self.dim();
        &self.structure[(i * d + j) * d + k]
    }

    pub fn killing_gram(&self) -> &Mat<S> {
        &self.killing
    }

    pub fn unit(&self, i: usize) -> Vec<S> {
        let mut v = vec![S::zero(); self.dim()];
        v[i] = S::one();
        v
    }

    pub fn zero_vector(&self) -> Vec<S> {
        vec![S::zero(); self.dim()]
    }

    fn check_len(&self, v: &[S]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        Ok(())
    }

    /// Coordinates of `[x, y]` computed from the structure constants.
    pub fn bracket(&self, x: &[S], y: &[S]) -> Result<Vec<S>> {
        self.check_len(x)?;
        self.check_len(y)?;
        Ok(self.bracket_unchecked(x, y))
    }

    pub(crate) fn bracket_unchecked(&self, x: &[S], y: &[S]) -> Vec<S> {
        let dim = self.dim();
        let mut out = vec![S::zero(); dim];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() || i == j {
                    continue;
                }
                let w = xi.clone() * yj.clone();
                for (k, c) in &self.sparse[i * dim + j] {
                    out[*k] = out[*k].clone() + w.clone() * c.clone();
                }
            }
        }
        out
    }

    /// Matrix of `ad_x` acting on coordinate vectors.
    pub fn ad_matrix(&self, x: &[S]) -> Mat<S> {
        let dim = self.dim();
        let mut m: Mat<S> = Mat::zeros(dim, dim);
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for j in 0..dim {
                for (k, c) in &self.sparse[i * dim + j] {
                    m[(*k, j)] = m[(*k, j)].clone() + xi.clone() * c.clone();
                }
            }
        }
        m
    }

    /// `B(x, y) = tr(ad_x ad_y)`.
    pub fn killing_form(&self, x: &[S], y: &[S]) -> Result<S> {
        self.check_len(x)?;
        self.check_len(y)?;
        Ok(self.killing.bilinear(x, y))
    }

    pub fn killing_inertia(&self) -> Inertia {
        self.killing.inertia()
    }

    pub fn is_semisimple(&self) -> bool {
        self.killing.rank() == self.dim()
    }

    pub fn is_compact_semisimple(&self) -> bool {
        self.killing_inertia().negative == self.dim()
    }

    /// The realizing matrix of a coordinate vector.
    pub fn element_matrix(&self, x: &[S]) -> Result<Mat<S>> {
        self.check_len(x)?;
        let n = self.matrix_size();
        let mut m = Mat::zeros(n, n);
        for (xi, b) in x.iter().zip(&self.basis) {
            if !xi.is_zero() {
                m = m.add(&b.scaled(xi));
            }
        }
        Ok(m)
    }

    /// Coordinates of a matrix in the basis; fails if it is not in the span.
    pub fn coordinates(&self, m: &Mat<S>) -> Result<Vec<S>> {
        let n = self.matrix_size();
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: m.nrows(),
            });
        }
        let rhs: Vec<S> = self
            .coord_positions
            .iter()
            .map(|&p| m.as_slice()[p].clone())
            .collect();
        let c = self.coord_inv.mul_vec(&rhs);
        let back = self.element_matrix(&c)?;
        let scale = m.scale().max(back.scale());
        if !back
            .as_slice()
            .iter()
            .zip(m.as_slice())
            .all(|(a, b)| (a.clone() - b.clone()).is_negligible(scale))
        {
            return Err(Error::InvalidBasis("matrix is not in the span of the basis".into()));
        }
        Ok(c)
    }

    /// Largest Jacobi residual over all basis triples.
    pub fn jacobi_residual(&self) -> S {
        let dim = self.dim();
        let mut worst = S::zero();
        for i in 0..dim {
            for j in i + 1..dim {
                for k in j + 1..dim {
                    let (ei, ej, ek) = (self.unit(i), self.unit(j), self.unit(k));
                    let a = self.bracket_unchecked(&self.bracket_unchecked(&ei, &ej), &ek);
                    let b = self.bracket_unchecked(&self.bracket_unchecked(&ej, &ek), &ei);
                    let c = self.bracket_unchecked(&self.bracket_unchecked(&ek, &ei), &ej);
                    for l in 0..dim {
                        let r = (a[l].clone() + b[l].clone() + c[l].clone()).abs();
                        if r > worst {
                            worst = r;
                        }
                    }
                }
            }
        }
        worst
    }

    /// The same algebra over a new basis given by coordinate vectors.
    pub fn change_basis(&self, name: impl Into<String>, new_basis: &[Vec<S>]) -> Result<Self> {
        let mats = new_basis
            .iter()
            .map(|v| self.element_matrix(v))
            .collect::<Result<Vec<_>>>()?;
        let mut alg = Self::from_basis(name, mats)?;
        alg.family = self.family;
        Ok(alg)
    }

    /// Float copy carrying the same (exactly derived) data.
    pub fn to_float(&self) -> LieAlgebra<f64> {
        let conv = |m: &Mat<S>| Mat::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)].to_f64());
        let structure: Vec<f64> = self.structure.iter().map(Scalar::to_f64).collect();
        let mut out = LieAlgebra {
            name: self.name.clone(),
            family: self.family,
            basis: self.basis.iter().map(conv).collect(),
            structure: Vec::new(),
            sparse: Vec::new(),
            killing: Mat::zeros(0, 0),
            coord_positions: self.coord_positions.clone(),
            coord_inv: conv(&self.coord_inv),
        };
        out.set_structure(structure);
        out
    }
}
