//! Certification of fat covectors for canonical invariant connections on
//! homogeneous principal bundles `H -> G -> G/H`.
//!
//! Three independent criteria decide fatness of `u = B(X_u, .)`:
//!
//! * the root criterion: `alpha(X_u) != 0` for every root of `g` outside the
//!   root system of `h` ([`rootdata`]);
//! * the curvature oracle: nondegeneracy of `(X, Y) -> B(X_u, [X, Y])` on the
//!   reductive complement `m` ([`fatness`]);
//! * the centralizer criterion: `ker ad(X_u)` meets `m` only in zero.
//!
//! Around them sit the coupling (KKS) form on `G/V` ([`coupling`]), pinched
//! curvature tensors and twistor forms ([`curvature`]), compact duals of
//! symmetric pairs ([`duality`]) and a batch catalog driver ([`catalog`]).

pub mod catalog;
pub mod coupling;
pub mod curvature;
pub mod duality;
pub mod error;
pub mod fatness;
pub mod liealg;
pub mod linalg;
pub mod rootdata;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};
