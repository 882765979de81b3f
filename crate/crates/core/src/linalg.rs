//! Dense linear algebra over [`Scalar`]: row reduction, kernels, solves,
//! determinants, Pfaffians and inertia. Exact over rationals; float inputs
//! use magnitude pivoting and a relative zero threshold.

use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::{max_magnitude, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S> Index<(usize, usize)> for Mat<S> {
    type Output = S;
    fn index(&self, (r, c): (usize, usize)) -> &S {
        &self.data[r * self.cols + c]
    }
}

impl<S> IndexMut<(usize, usize)> for Mat<S> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut S {
        &mut self.data[r * self.cols + c]
    }
}

/// Signature of a symmetric form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<S>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            data: rows.iter().flatten().cloned().collect(),
        }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[Vec<S>], nrows: usize) -> Self {
        let mut m = Self::zeros(nrows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), nrows, "column length");
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[S] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[S] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<S> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn scale(&self) -> f64 {
        max_magnitude(&self.data)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    pub fn map(&self, f: impl Fn(&S) -> S) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.map(|x| -x.clone()))
    }

    pub fn scaled(&self, s: &S) -> Self {
        self.map(|x| s.clone() * x.clone())
    }

    /// Product skipping structural zeros (bases here are sparse).
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimension");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    out[(i, j)] = out[(i, j)].clone() + a.clone() * b.clone();
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len(), "vector length");
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    /// `x^T A y`.
    pub fn bilinear(&self, x: &[S], y: &[S]) -> S {
        crate::scalar::dot(x, &self.mul_vec(y))
    }

    pub fn trace(&self) -> S {
        (0..self.rows.min(self.cols)).fold(S::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    /// Commutator `AB - BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn is_zero_matrix(&self) -> bool {
        let s = self.scale();
        self.data.iter().all(|x| x.is_negligible(s))
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    fn pick_pivot(&self, col: usize, from: usize, scale: f64) -> Option<usize> {
        if S::EXACT {
            (from..self.rows).find(|&r| !self[(r, col)].is_zero())
        } else {
            let best = (from..self.rows).max_by(|&a, &b| {
                self[(a, col)]
                    .to_f64()
                    .abs()
                    .total_cmp(&self[(b, col)].to_f64().abs())
            })?;
            (!self[(best, col)].is_negligible(scale)).then_some(best)
        }
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let scale = self.scale();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = m.pick_pivot(c, r, scale) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = S::one() / m[(r, c)].clone();
            for j in c..m.cols {
                m[(r, j)] = m[(r, j)].clone() * inv.clone();
            }
            m[(r, c)] = S::one();
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m[(i, c)].clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let v = m[(r, j)].clone();
                    if v.is_zero() {
                        continue;
                    }
                    m[(i, j)] = m[(i, j)].clone() - f.clone() * v;
                }
                m[(i, c)] = S::zero();
            }
            pivots.push(c);
            r += 1;
        }
        if !S::EXACT {
            for x in m.data.iter_mut() {
                if x.is_negligible(scale.max(1.0)) {
                    *x = S::zero();
                }
            }
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{x : A x = 0}`, one vector per free column, with a unit
    /// entry at that column.
    pub fn nullspace(&self) -> Vec<Vec<S>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![S::zero(); self.cols];
                v[f] = S::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = -r[(row, f)].clone();
                }
                v
            })
            .collect()
    }

    /// Some solution of `A x = b`, or `None` if inconsistent.
    pub fn solve_any(&self, b: &[S]) -> Option<Vec<S>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug[(r, c)] = self[(r, c)].clone();
            }
            aug[(r, self.cols)] = b[r].clone();
        }
        let (red, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![S::zero(); self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = red[(row, self.cols)].clone();
        }
        Some(x)
    }

    /// Unique solution of `A x = b`.
    pub fn solve(&self, b: &[S]) -> Result<Vec<S>> {
        if self.rank() != self.cols {
            return Err(Error::Singular);
        }
        self.solve_any(b).ok_or(Error::Singular)
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: self.cols,
            });
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug[(r, c)] = self[(r, c)].clone();
            }
            aug[(r, n + r)] = S::one();
        }
        let (red, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::Singular);
        }
        Ok(Self::from_fn(n, n, |r, c| red[(r, n + c)].clone()))
    }

    pub fn determinant(&self) -> S {
        assert!(self.is_square());
        let mut m = self.clone();
        let scale = self.scale();
        let mut det = S::one();
        for c in 0..m.cols {
            let Some(p) = m.pick_pivot(c, c, scale) else {
                return S::zero();
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m[(c, c)].clone();
            det = det * piv.clone();
            for i in c + 1..m.rows {
                let f = m[(i, c)].clone() / piv.clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let v = m[(c, j)].clone();
                    m[(i, j)] = m[(i, j)].clone() - f.clone() * v;
                }
            }
        }
        det
    }

    /// Pfaffian of an antisymmetric matrix by congruence elimination.
    /// Odd order gives zero.
    pub fn pfaffian(&self) -> S {
        assert!(self.is_square());
        let n = self.rows;
        if n % 2 == 1 {
            return S::zero();
        }
        let mut a = self.clone();
        let scale = self.scale();
        let mut pf = S::one();
        let mut k = 0;
        while k < n {
            // pivot in row k among columns k+1..
            let candidates = k + 1..n;
            let p = if S::EXACT {
                candidates.clone().find(|&j| !a[(k, j)].is_zero())
            } else {
                candidates
                    .clone()
                    .max_by(|&x, &y| a[(k, x)].to_f64().abs().total_cmp(&a[(k, y)].to_f64().abs()))
                    .filter(|&j| !a[(k, j)].is_negligible(scale))
            };
            let Some(p) = p else {
                return S::zero();
            };
            if p != k + 1 {
                a.swap_rows(p, k + 1);
                a.swap_cols(p, k + 1);
                pf = -pf;
            }
            let piv = a[(k, k + 1)].clone();
            pf = pf * piv.clone();
            for i in k + 2..n {
                let f = a[(k, i)].clone() / piv.clone();
                if !f.is_zero() {
                    a.congruence_update(i, k + 1, &f);
                }
                let g = a[(k + 1, i)].clone() / (-piv.clone());
                if !g.is_zero() {
                    a.congruence_update(i, k, &g);
                }
            }
            k += 2;
        }
        pf
    }

    /// row_i -= f*row_j; col_i -= f*col_j.
    fn congruence_update(&mut self, i: usize, j: usize, f: &S) {
        for c in 0..self.cols {
            let v = self[(j, c)].clone();
            if !v.is_zero() {
                self[(i, c)] = self[(i, c)].clone() - f.clone() * v;
            }
        }
        for r in 0..self.rows {
            let v = self[(r, j)].clone();
            if !v.is_zero() {
                self[(r, i)] = self[(r, i)].clone() - f.clone() * v;
            }
        }
    }

    /// Inertia of a symmetric matrix by symmetric (congruence) elimination.
    pub fn inertia(&self) -> Inertia {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let scale = self.scale();
        let mut out = Inertia {
            positive: 0,
            negative: 0,
            zero: 0,
        };
        let mut active: Vec<usize> = (0..n).collect();
        while !active.is_empty() {
            let diag = if S::EXACT {
                active.iter().copied().find(|&i| !a[(i, i)].is_zero())
            } else {
                active
                    .iter()
                    .copied()
                    .max_by(|&x, &y| a[(x, x)].to_f64().abs().total_cmp(&a[(y, y)].to_f64().abs()))
                    .filter(|&i| !a[(i, i)].is_negligible(scale))
            };
            let pivot = match diag {
                Some(i) => i,
                None => {
                    // all remaining diagonal entries vanish; use an off-diagonal pair
                    let mut pair = None;
                    'outer: for (ix, &i) in active.iter().enumerate() {
                        for &j in &active[ix + 1..] {
                            if !a[(i, j)].is_negligible(scale) {
                                pair = Some((i, j));
                                break 'outer;
                            }
                        }
                    }
                    match pair {
                        Some((i, j)) => {
                            // row_i += row_j, col_i += col_j gives a_ii = 2 a_ij
                            a.congruence_update(i, j, &(-S::one()));
                            i
                        }
                        None => {
                            out.zero += active.len();
                            break;
                        }
                    }
                }
            };
            let piv = a[(pivot, pivot)].clone();
            if piv > S::zero() {
                out.positive += 1;
            } else {
                out.negative += 1;
            }
            active.retain(|&i| i != pivot);
            for &i in &active {
                let f = a[(i, pivot)].clone() / piv.clone();
                if !f.is_zero() {
                    a.congruence_update(i, pivot, &f);
                }
            }
        }
        out
    }

    pub fn is_antisymmetric(&self) -> bool {
        let s = self.scale();
        self.is_square()
            && (0..self.rows).all(|i| {
                (i..self.cols).all(|j| (self[(i, j)].clone() + self[(j, i)].clone()).is_negligible(s))
            })
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |r, c| self[(r, c)].to_f64())
    }
}

impl Mat<f64> {
    pub fn from_dmatrix(m: &DMatrix<f64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
    }
}

/// Singular values in decreasing order.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Smallest singular value and a unit right singular vector for it.
pub fn smallest_singular_pair(m: &DMatrix<f64>) -> Option<(f64, Vec<f64>)> {
    if m.is_empty() {
        return None;
    }
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t?;
    let (idx, &s) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))?;
    let v: Vec<f64> = v_t.row(idx).iter().copied().collect();
    Some((s, v))
}
