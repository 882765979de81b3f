//! Exact root-system combinatorics for the classical types.
//!
//! Roots are integer vectors in the `t_i` coordinates of the block torus:
//! `B_n = {+-t_i +- t_j, +-t_i}`, `C_n = {+-t_i +- t_j, +-2t_i}`,
//! `D_n = {+-t_i +- t_j}`. `A_n` uses the trace-zero model in `n+1`
//! coordinates. Root lists are ordered with all positive roots first, then
//! their negatives in the same order.

use std::fmt;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::liealg::{Family, SubalgebraEmbedding};
use crate::linalg::Mat;
use crate::scalar::{format_vec, q, qi, Rational, Scalar};

pub type Root = Vec<i64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RootType {
    A,
    B,
    C,
    D,
}

impl fmt::Display for RootType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootSystem {
    #[serde(rename = "type")]
    root_type: RootType,
    rank: usize,
    roots: Vec<Root>,
    simple_roots: Vec<Root>,
}

/// A point of `t` in the `t_i` coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TorusVector(pub Vec<Rational>);

impl Serialize for TorusVector {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        format_vec(&self.0).serialize(s)
    }
}

impl TorusVector {
    pub fn from_ints(v: &[i64]) -> Self {
        Self(v.iter().map(|&x| qi(x)).collect())
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scaled(&self, r: &Rational) -> Self {
        Self(self.0.iter().map(|x| x * r).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Random exact vectors: numerators in `[-9, 9]`, denominators in `{1, 2, 3}`.
    pub fn sample(len: usize, count: usize, seed: u64) -> Vec<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                Self(
                    (0..len)
                        .map(|_| {
                            let num = rng.random_range(-9i64..=9);
                            let den = rng.random_range(1i64..=3);
                            q(num, den)
                        })
                        .collect(),
                )
            })
            .collect()
    }

    pub fn to_scalars<S: Scalar>(&self) -> Vec<S> {
        self.0.iter().map(S::from_rational).collect()
    }
}

/// `alpha(x) = sum_i alpha_i x_i`.
pub fn evaluate(root: &[i64], x: &[Rational]) -> Rational {
    root.iter()
        .zip(x)
        .filter(|(a, _)| **a != 0)
        .fold(Rational::zero(), |acc, (&a, v)| acc + v * qi(a))
}

fn unit(len: usize, i: usize, v: i64) -> Root {
    let mut r = vec![0; len];
    r[i] = v;
    r
}

fn pair(len: usize, i: usize, a: i64, j: usize, b: i64) -> Root {
    let mut r = vec![0; len];
    r[i] += a;
    r[j] += b;
    r
}

pub fn build_root_system(root_type: RootType, rank: usize) -> Result<RootSystem> {
    let min_rank = if root_type == RootType::D { 2 } else { 1 };
    if rank < min_rank {
        return Err(Error::UnsupportedFamily(format!("{root_type}{rank}")));
    }
    let n = rank;
    let mut positive = Vec::new();
    let mut simple = Vec::new();
    match root_type {
        RootType::A => {
            let len = n + 1;
            for i in 0..len {
                for j in i + 1..len {
                    positive.push(pair(len, i, 1, j, -1));
                }
            }
            for i in 0..n {
                simple.push(pair(len, i, 1, i + 1, -1));
            }
        }
        RootType::B | RootType::C | RootType::D => {
            for i in 0..n {
                for j in i + 1..n {
                    positive.push(pair(n, i, 1, j, -1));
                }
            }
            for i in 0..n {
                for j in i + 1..n {
                    positive.push(pair(n, i, 1, j, 1));
                }
            }
            let short = match root_type {
                RootType::B => Some(1),
                RootType::C => Some(2),
                _ => None,
            };
            if let Some(s) = short {
                for i in 0..n {
                    positive.push(unit(n, i, s));
                }
            }
            for i in 0..n.saturating_sub(1) {
                simple.push(pair(n, i, 1, i + 1, -1));
            }
            match short {
                Some(s) => simple.push(unit(n, n - 1, s)),
                None => simple.push(pair(n, n - 2, 1, n - 1, 1)),
            }
        }
    }
    let negative: Vec<Root> = positive
        .iter()
        .map(|r| r.iter().map(|x| -x).collect())
        .collect();
    let mut roots = positive;
    roots.extend(negative);
    Ok(RootSystem {
        root_type,
        rank,
        roots,
        simple_roots: simple,
    })
}

impl RootSystem {
    /// Root system of the complexification of a built-in family.
    pub fn for_family(family: Family) -> Result<Self> {
        let n = match family {
            Family::So(n) => n,
            Family::SoPq(p, q) => p + q,
            Family::Su(n) => return build_root_system(RootType::A, n - 1),
            Family::UInSo(_) => {
                return Err(Error::UnsupportedFamily(format!("{family} is not semisimple")))
            }
        };
        if n % 2 == 1 {
            build_root_system(RootType::B, (n - 1) / 2)
        } else {
            build_root_system(RootType::D, n / 2)
        }
    }

    pub fn root_type(&self) -> RootType {
        self.root_type
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Number of coordinates of a root (`rank + 1` for type A).
    pub fn coord_len(&self) -> usize {
        match self.root_type {
            RootType::A => self.rank + 1,
            _ => self.rank,
        }
    }

    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    pub fn positive_roots(&self) -> &[Root] {
        &self.roots[..self.roots.len() / 2]
    }

    pub fn simple_roots(&self) -> &[Root] {
        &self.simple_roots
    }

    pub fn contains(&self, root: &[i64]) -> bool {
        self.roots.iter().any(|r| r == root)
    }

    pub fn label(&self) -> String {
        format!("{}{}", self.root_type, self.rank)
    }

    /// Coefficients of `root` in the simple roots.
    pub fn simple_coefficients(&self, root: &[i64]) -> Result<Vec<Rational>> {
        let len = self.coord_len();
        if root.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                got: root.len(),
            });
        }
        let cols: Vec<Vec<Rational>> = self
            .simple_roots
            .iter()
            .map(|s| s.iter().map(|&x| qi(x)).collect())
            .collect();
        let rhs: Vec<Rational> = root.iter().map(|&x| qi(x)).collect();
        Mat::from_cols(&cols, len).solve(&rhs)
    }

    fn simple_index(&self, root: &[i64]) -> Result<usize> {
        self.simple_roots
            .iter()
            .position(|s| s == root)
            .ok_or_else(|| Error::NotSimpleRoot(root.to_vec()))
    }
}

/// A sub-root-system `Delta(h)` and the forbidden set `Delta \ Delta(h)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubSystem {
    #[serde(skip)]
    parent: RootSystem,
    members: Vec<Root>,
    forbidden: Vec<Root>,
}

impl SubSystem {
    /// Members must be roots of `parent` and closed under negation.
    pub fn new(parent: RootSystem, members: Vec<Root>) -> Result<Self> {
        for r in &members {
            if !parent.contains(r) {
                return Err(Error::TorusMismatch(format!("{r:?} is not a root")));
            }
            let neg: Root = r.iter().map(|x| -x).collect();
            if !members.contains(&neg) {
                return Err(Error::TorusMismatch(format!("{r:?} present without its negative")));
            }
        }
        // keep parent order
        let members: Vec<Root> = parent.roots.iter().filter(|r| members.contains(r)).cloned().collect();
        let forbidden = parent.roots.iter().filter(|r| !members.contains(r)).cloned().collect();
        Ok(Self {
            parent,
            members,
            forbidden,
        })
    }

    /// The sub-system `[S]` of roots whose simple-root expansion is
    /// supported on `S`.
    pub fn generated_by(parent: RootSystem, simple: &[Root]) -> Result<Self> {
        let idx = simple
            .iter()
            .map(|s| parent.simple_index(s))
            .collect::<Result<Vec<_>>>()?;
        let mut members = Vec::new();
        for r in &parent.roots {
            let c = parent.simple_coefficients(r)?;
            if c.iter().enumerate().all(|(i, ci)| ci.is_zero() || idx.contains(&i)) {
                members.push(r.clone());
            }
        }
        Self::new(parent, members)
    }

    pub fn parent(&self) -> &RootSystem {
        &self.parent
    }

    pub fn members(&self) -> &[Root] {
        &self.members
    }

    pub fn forbidden(&self) -> &[Root] {
        &self.forbidden
    }

    /// One representative per forbidden `+-` pair (the positive one).
    pub fn forbidden_positive(&self) -> Vec<Root> {
        let pos = self.parent.positive_roots();
        self.forbidden.iter().filter(|r| pos.contains(r)).cloned().collect()
    }
}

/// Determine `Delta(h)` from the simultaneous eigenspaces of `ad(t)` on `g`.
///
/// Over the reals each pair `+-alpha` owns a 2-dimensional isotypic block
/// on which `ad(T_i) ad(T_j) = -alpha_i alpha_j`. The block lies in `h`
/// (member) or in `m` (forbidden).
pub fn detect_subsystem<S: Scalar>(emb: &SubalgebraEmbedding<S>, rs: &RootSystem) -> Result<SubSystem> {
    let g = emb.ambient();
    let torus = emb.torus();
    let rank = torus.len();
    if rank != rs.coord_len() {
        return Err(Error::TorusMismatch(format!(
            "torus has {rank} generators, roots have {} coordinates",
            rs.coord_len()
        )));
    }
    let dim = g.dim();
    // generic element: weights 5^i separate all +-pairs of classical roots
    let weights: Vec<i64> = (0..rank).map(|i| 5i64.pow(i as u32)).collect();
    let mut t = g.zero_vector();
    for (w, ti) in weights.iter().zip(torus) {
        crate::scalar::axpy(&S::from_i64(*w), ti, &mut t);
    }
    let ad_t = g.ad_matrix(&t);
    let ad_t2 = ad_t.mul(&ad_t);
    let ad_each: Vec<Mat<S>> = torus.iter().map(|ti| g.ad_matrix(ti)).collect();

    let zero_weight = ad_t.nullspace().len();
    if zero_weight != rank {
        return Err(Error::TorusMismatch(format!(
            "zero weight space has dimension {zero_weight}, expected {rank}"
        )));
    }
    let mut members = Vec::new();
    let mut total = zero_weight;
    for alpha in rs.positive_roots() {
        let value: i64 = alpha.iter().zip(&weights).map(|(a, w)| a * w).sum();
        let shift = S::from_i64(value * value);
        let mut k = ad_t2.clone();
        for i in 0..dim {
            k[(i, i)] = k[(i, i)].clone() + shift.clone();
        }
        let block = k.nullspace();
        if block.len() != 2 {
            return Err(Error::TorusMismatch(format!(
                "root {alpha:?} has a {}-dimensional real block",
                block.len()
            )));
        }
        for v in &block {
            for i in 0..rank {
                for j in i..rank {
                    let lhs = ad_each[i].mul_vec(&ad_each[j].mul_vec(v));
                    let c = S::from_i64(alpha[i] * alpha[j]);
                    let scale = crate::scalar::max_magnitude(v).max(1.0);
                    if !lhs
                        .iter()
                        .zip(v)
                        .all(|(l, x)| (l.clone() + c.clone() * x.clone()).is_negligible(scale))
                    {
                        return Err(Error::TorusMismatch(format!(
                            "eigenvalues of ad(t) do not match root {alpha:?}"
                        )));
                    }
                }
            }
        }
        total += 2;
        let in_h = block.iter().all(|v| emb.in_h(v));
        let in_m = block.iter().all(|v| emb.in_m(v));
        match (in_h, in_m) {
            (true, _) => {
                members.push(alpha.clone());
                members.push(alpha.iter().map(|x| -x).collect());
            }
            (false, true) => {}
            (false, false) => {
                return Err(Error::TorusMismatch(format!(
                    "root block of {alpha:?} splits across h and m"
                )))
            }
        }
    }
    if total != dim {
        return Err(Error::TorusMismatch(format!(
            "root blocks cover {total} of {dim} dimensions"
        )));
    }
    SubSystem::new(rs.clone(), members)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootVerdict {
    pub fat: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_root: Option<Root>,
}

/// Fat iff no forbidden root vanishes on `x`; the witness is the first
/// vanishing forbidden root in root order.
pub fn fat_by_roots(x: &TorusVector, sub: &SubSystem) -> Result<RootVerdict> {
    let len = sub.parent.coord_len();
    if x.len() != len {
        return Err(Error::DimensionMismatch {
            expected: len,
            got: x.len(),
        });
    }
    let witness = sub
        .forbidden
        .iter()
        .find(|r| evaluate(r, &x.0).is_zero())
        .cloned();
    Ok(RootVerdict {
        fat: witness.is_none(),
        witness_root: witness,
    })
}

/// Sum of the fundamental coweights of `Pi \ S`: zero exactly on `[S]`.
pub fn find_centralizing_vector(rs: &RootSystem, s: &[Root]) -> Result<TorusVector> {
    let idx = s
        .iter()
        .map(|r| rs.simple_index(r))
        .collect::<Result<Vec<_>>>()?;
    let len = rs.coord_len();
    let mut rows: Vec<Vec<Rational>> = rs
        .simple_roots
        .iter()
        .map(|r| r.iter().map(|&v| qi(v)).collect())
        .collect();
    let mut rhs: Vec<Rational> = (0..rs.simple_roots.len())
        .map(|i| if idx.contains(&i) { qi(0) } else { qi(1) })
        .collect();
    if rs.root_type == RootType::A {
        rows.push(vec![qi(1); len]);
        rhs.push(qi(0));
    }
    let x = TorusVector(Mat::from_rows(&rows).solve(&rhs)?);
    let sub = SubSystem::generated_by(rs.clone(), s)?;
    debug_assert!(verify_centralizing_vector(&x, &sub));
    Ok(x)
}

/// Exact check: zero on the members of `sub`, nonzero on the rest.
pub fn verify_centralizing_vector(x: &TorusVector, sub: &SubSystem) -> bool {
    sub.members.iter().all(|r| evaluate(r, &x.0).is_zero())
        && sub.forbidden.iter().all(|r| !evaluate(r, &x.0).is_zero())
}

/// True when every forbidden root has a strict constant sign on all
/// translated vertices `v + a`.
pub fn verify_shift(vertices: &[TorusVector], sub: &SubSystem, shift: &TorusVector) -> bool {
    sub.forbidden.iter().all(|r| {
        let signs: Vec<i8> = vertices
            .iter()
            .map(|v| {
                let val = evaluate(r, &v.add(shift).0);
                if val.is_positive() {
                    1
                } else if val.is_negative() {
                    -1
                } else {
                    0
                }
            })
            .collect();
        signs.iter().all(|&s| s == 1) || signs.iter().all(|&s| s == -1)
    })
}

/// Shift `a` with `conv(vertices) + a` off every forbidden wall.
pub fn find_fat_shift(vertices: &[TorusVector], sub: &SubSystem) -> Option<TorusVector> {
    let len = sub.parent.coord_len();
    let directions: Vec<TorusVector> = (0..len)
        .map(|i| TorusVector::from_ints(&unit(len, i, 1)))
        .collect();
    find_fat_shift_in(vertices, sub, &directions)
}

/// As [`find_fat_shift`] with the shift restricted to the span of
/// `directions` (for instance central directions of a nonabelian structure
/// group, where only those shifts keep the moment map equivariant).
///
/// Sign patterns are tried in a fixed order, one bit per forbidden pair;
/// each is an exact strict linear system solved by Fourier-Motzkin.
pub fn find_fat_shift_in(
    vertices: &[TorusVector],
    sub: &SubSystem,
    directions: &[TorusVector],
) -> Option<TorusVector> {
    if vertices.is_empty() {
        return None;
    }
    let pairs = sub.forbidden_positive();
    let k = directions.len();
    // per pair: coefficients alpha(d_j) and vertex values alpha(v)
    let data: Vec<(Vec<Rational>, Vec<Rational>)> = pairs
        .iter()
        .map(|r| {
            (
                directions.iter().map(|d| evaluate(r, &d.0)).collect(),
                vertices.iter().map(|v| evaluate(r, &v.0)).collect(),
            )
        })
        .collect();
    let patterns: u64 = 1u64 << pairs.len();
    (0..patterns).into_par_iter().find_map_first(|pattern| {
        let system: Vec<Strict> = data
            .iter()
            .enumerate()
            .map(|(i, (coef, vals))| {
                let s = if pattern >> i & 1 == 1 { qi(-1) } else { qi(1) };
                // s*(alpha(v) + f(lambda)) > 0 for all v  <=>  s*f(lambda) > max_v(-s*alpha(v))
                let bound = vals.iter().map(|v| -(&s * v)).max().expect("nonempty");
                Strict {
                    coef: coef.iter().map(|c| &s * c).collect(),
                    bound,
                }
            })
            .collect();
        let lambda = solve_strict(system, k)?;
        let mut shift = TorusVector(vec![Rational::zero(); sub.parent.coord_len()]);
        for (l, d) in lambda.iter().zip(directions) {
            shift = shift.add(&d.scaled(l));
        }
        verify_shift(vertices, sub, &shift).then_some(shift)
    })
}

/// `coef . x > bound`.
#[derive(Clone, Debug)]
struct Strict {
    coef: Vec<Rational>,
    bound: Rational,
}

/// Fourier-Motzkin elimination for a system of strict inequalities, with
/// back substitution choosing small integers where the open interval
/// allows it.
fn solve_strict(system: Vec<Strict>, vars: usize) -> Option<Vec<Rational>> {
    let mut levels = vec![system];
    for v in (0..vars).rev() {
        let cur = levels.last().expect("level");
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for c in cur {
            let a = &c.coef[v];
            if a.is_positive() {
                pos.push(c);
            } else if a.is_negative() {
                neg.push(c);
            } else {
                rest.push(c.clone());
            }
        }
        for p in &pos {
            for n in &neg {
                let (cp, cn) = (p.coef[v].clone(), -n.coef[v].clone());
                let coef: Vec<Rational> = p
                    .coef
                    .iter()
                    .zip(&n.coef)
                    .map(|(a, b)| &cn * a + &cp * b)
                    .collect();
                rest.push(Strict {
                    coef,
                    bound: &cn * &p.bound + &cp * &n.bound,
                });
            }
        }
        levels.push(rest);
    }
    // all variables eliminated: constraints read 0 > bound
    if levels.last().expect("level").iter().any(|c| !c.bound.is_negative()) {
        return None;
    }
    let mut x = vec![Rational::zero(); vars];
    for v in 0..vars {
        // constraints mentioning variables 0..=v only
        let sys = &levels[vars - 1 - v];
        let mut lower: Option<Rational> = None;
        let mut upper: Option<Rational> = None;
        for c in sys {
            let a = &c.coef[v];
            if a.is_zero() {
                continue;
            }
            let rest: Rational = (0..v).map(|j| &c.coef[j] * &x[j]).sum();
            let b = (&c.bound - rest) / a;
            if a.is_positive() {
                lower = Some(lower.map_or(b.clone(), |l| l.max(b)));
            } else {
                upper = Some(upper.map_or(b.clone(), |u| u.min(b)));
            }
        }
        x[v] = pick_inside(lower, upper)?;
    }
    Some(x)
}

/// A value strictly inside `(lower, upper)`, preferring small integers.
fn pick_inside(lower: Option<Rational>, upper: Option<Rational>) -> Option<Rational> {
    match (lower, upper) {
        (None, None) => Some(Rational::zero()),
        (Some(l), None) => Some(if l.is_negative() { Rational::zero() } else { l.floor() + Rational::one() }),
        (None, Some(u)) => Some(if u.is_positive() { Rational::zero() } else { u.ceil() - Rational::one() }),
        (Some(l), Some(u)) => {
            if l >= u {
                return None;
            }
            if l.is_negative() && u.is_positive() {
                return Some(Rational::zero());
            }
            let candidate = if l.is_negative() { u.ceil() - Rational::one() } else { l.floor() + Rational::one() };
            if candidate > l && candidate < u {
                Some(candidate)
            } else {
                let two = qi(2);
                Some((l + u) / two)
            }
        }
    }
}

#[cfg(test)]
mod tests;
