//! Built-in classical families with exact integer bases.
//!
//! `so(n)` and `so(p,q)` share the pair ordering `(i, j)`, `i < j`, in
//! lexicographic order. Compact pairs are realized as `E_ji - E_ij`, so the
//! block `[[0,-1],[1,0]]` on rows `2i, 2i+1` is a single basis element.
//! Mixed pairs of `so(p,q)` (`i < p <= j`) are `E_ij + E_ji`.

use super::{Family, LieAlgebra};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::{qi, Rational, Scalar};

pub fn build_algebra(family: Family) -> Result<LieAlgebra<Rational>> {
    let unsupported = || Err(Error::UnsupportedFamily(family.to_string()));
    let alg = match family {
        Family::So(n) => {
            if n < 2 {
                return unsupported();
            }
            LieAlgebra::from_basis(family.to_string(), so_pq_basis(n, 0))?
        }
        Family::SoPq(p, q) => {
            if p + q < 2 {
                return unsupported();
            }
            LieAlgebra::from_basis(family.to_string(), so_pq_basis(p, q))?
        }
        Family::Su(n) => {
            if n < 2 {
                return unsupported();
            }
            LieAlgebra::from_basis(family.to_string(), su_basis(n))?
        }
        Family::UInSo(n) => {
            if n < 1 {
                return unsupported();
            }
            let so = build_algebra(Family::So(2 * n))?;
            let coeffs = u_block(&so, n)?;
            let mats = coeffs
                .iter()
                .map(|c| so.element_matrix(c))
                .collect::<Result<Vec<_>>>()?;
            LieAlgebra::from_basis(family.to_string(), mats)?
        }
    };
    Ok(alg.with_family(family))
}

fn so_pq_basis(p: usize, q: usize) -> Vec<Mat<Rational>> {
    let n = p + q;
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let mut m = Mat::zeros(n, n);
            if i < p && j >= p {
                m[(i, j)] = qi(1);
                m[(j, i)] = qi(1);
            } else {
                m[(j, i)] = qi(1);
                m[(i, j)] = qi(-1);
            }
            out.push(m);
        }
    }
    out
}

/// `A + iB` realized as `[[A, -B], [B, A]]`.
fn realify(n: usize, a: &[(usize, usize, i64)], b: &[(usize, usize, i64)]) -> Mat<Rational> {
    let mut m = Mat::zeros(2 * n, 2 * n);
    for &(r, c, v) in a {
        m[(r, c)] = qi(v);
        m[(n + r, n + c)] = qi(v);
    }
    for &(r, c, v) in b {
        m[(n + r, c)] = qi(v);
        m[(r, n + c)] = qi(-v);
    }
    m
}

fn su_basis(n: usize) -> Vec<Mat<Rational>> {
    let mut out = Vec::with_capacity(n * n - 1);
    for j in 0..n {
        for k in j + 1..n {
            out.push(realify(n, &[(k, j, 1), (j, k, -1)], &[]));
            out.push(realify(n, &[], &[(j, k, 1), (k, j, 1)]));
        }
    }
    for j in 0..n - 1 {
        out.push(realify(n, &[], &[(j, j, 1), (j + 1, j + 1, -1)]));
    }
    out
}

/// Position of the pair `(i, j)`, `i < j`, in the `so(n)` / `so(p,q)` basis.
pub fn so_pair_index(n: usize, i: usize, j: usize) -> usize {
    assert!(i < j && j < n, "pair ({i},{j}) out of range for n={n}");
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

fn so_size<S: Scalar>(g: &LieAlgebra<S>) -> Result<(usize, usize)> {
    match g.family() {
        Some(Family::So(n)) => Ok((n, n)),
        Some(Family::SoPq(p, q)) => Ok((p + q, p)),
        _ => Err(Error::UnsupportedFamily(format!(
            "{} has no standard so-blocks",
            g.name()
        ))),
    }
}

/// The standard block `J` with `[[0,-1],[1,0]]` on the diagonal, size `2n`.
pub fn complex_structure(n: usize) -> Mat<Rational> {
    let mut m = Mat::zeros(2 * n, 2 * n);
    for i in 0..n {
        m[(2 * i + 1, 2 * i)] = qi(1);
        m[(2 * i, 2 * i + 1)] = qi(-1);
    }
    m
}

/// `so(k)` in the top-left block of `so(n)` or `so(p,q)` (`k <= p`).
pub fn so_block<S: Scalar>(g: &LieAlgebra<S>, k: usize) -> Result<Vec<Vec<S>>> {
    let (n, compact_rows) = so_size(g)?;
    if k > compact_rows || k < 2 {
        return Err(Error::UnsupportedFamily(format!("so({k}) inside {}", g.name())));
    }
    let mut out = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            out.push(g.unit(so_pair_index(n, i, j)));
        }
    }
    Ok(out)
}

/// `u(m)`: the commutant of `J` inside the top-left `so(2m)` block.
pub fn u_block<S: Scalar>(g: &LieAlgebra<S>, m: usize) -> Result<Vec<Vec<S>>> {
    let (n, _) = so_size(g)?;
    let block = so_block(g, 2 * m)?;
    let mut j = g.zero_vector();
    for i in 0..m {
        j[so_pair_index(n, 2 * i, 2 * i + 1)] = S::one();
    }
    let ad_j = g.ad_matrix(&j);
    let images: Vec<Vec<S>> = block.iter().map(|b| ad_j.mul_vec(b)).collect();
    let a = Mat::from_cols(&images, g.dim());
    Ok(a.nullspace()
        .into_iter()
        .map(|c| {
            let mut v = g.zero_vector();
            for (ci, b) in c.iter().zip(&block) {
                crate::scalar::axpy(ci, b, &mut v);
            }
            v
        })
        .collect())
}

/// Block-diagonal torus of the compact part: one `[[0,-1],[1,0]]` block per
/// disjoint index pair inside each definite block of the form.
pub fn block_torus<S: Scalar>(g: &LieAlgebra<S>) -> Option<Vec<Vec<S>>> {
    let (n, p) = so_size(g).ok()?;
    let mut out = Vec::new();
    for i in 0..p / 2 {
        out.push(g.unit(so_pair_index(n, 2 * i, 2 * i + 1)));
    }
    let q = n - p;
    for i in 0..q / 2 {
        out.push(g.unit(so_pair_index(n, p + 2 * i, p + 2 * i + 1)));
    }
    Some(out)
}
