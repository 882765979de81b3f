use thiserror::Error;

use crate::fatness::FatnessCertificate;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),

    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("subalgebra is not closed under the bracket")]
    NotClosed,

    #[error("Killing form is degenerate on the subalgebra")]
    DegenerateRestriction,

    #[error("Killing form is not negative definite on the subalgebra")]
    NotCompact,

    #[error("torus does not match the root system: {0}")]
    TorusMismatch(String),

    #[error("vector is not in the reductive complement (residual in h)")]
    NotInComplement,

    #[error("vector is not in the subalgebra h")]
    NotInSubalgebra,

    #[error("criteria disagree for instance {}", .0.instance)]
    CriteriaDisagree(Box<FatnessCertificate>),

    #[error("could not meet the pinching bracket after {0} halvings")]
    ScaleFailure(usize),

    #[error("tensor violates curvature symmetries (residual {0:e})")]
    NotCurvatureTensor(f64),

    #[error("frame is not orthonormal (residual {0:e})")]
    InvalidFrame(f64),

    #[error("isotropy subalgebra does not match the kernel of ad(X_u)")]
    IsotropyMismatch,

    #[error("form has odd dimension {0}")]
    OddDimension(usize),

    #[error("invalid Cartan involution: {0}")]
    InvolutionInvalid(String),

    #[error("not a simple root: {0:?}")]
    NotSimpleRoot(Vec<i64>),

    #[error("singular linear system")]
    Singular,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown instance: {0}")]
    UnknownInstance(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
