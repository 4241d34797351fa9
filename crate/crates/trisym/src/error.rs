use thiserror::Error;

/// Errors raised by constructors and theorem checks.
///
/// `TheoremViolation` and `JacobiViolation` are hard failures: the facts they
/// encode hold unconditionally for well-formed inputs, so tripping one means
/// the input data (or a rank threshold) is broken, not that the theorem has a
/// borderline case.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("sigma is not a Lie algebra automorphism (residual {residual:.3e})")]
    NotAutomorphism { residual: f64 },

    #[error("sigma does not have order three (residual {residual:.3e})")]
    NotOrderThree { residual: f64 },

    #[error("sigma is the identity")]
    SigmaIsIdentity,

    #[error("computed subspace fails the ideal check (residual {residual:.3e})")]
    IdealityViolation { residual: f64 },

    #[error("structural check `{check}` failed: {detail}")]
    TheoremViolation { check: String, detail: String },

    #[error("representation is not admissible: {0}")]
    NotAdmissible(String),

    #[error("direct sum requires identical base algebras: {0}")]
    MismatchedAlgebra(String),

    #[error("deformation is not in the required centralizer branch (residual {residual:.3e})")]
    NotInCentralizer { residual: f64 },

    #[error("1 + S is not positive definite (min eigenvalue {min_eig:.3e})")]
    NotPositive { min_eig: f64 },

    #[error("restriction of the Killing form to H is not a scalar multiple of g_H (residual {residual:.3e})")]
    LambdaNotScalar { residual: f64 },

    #[error("candidate background metric fails the branch conditions: {0}")]
    BackgroundCheckFailed(String),

    #[error("curvature tensor violates pair symmetry (residual {residual:.3e})")]
    SymmetryViolation { residual: f64 },

    #[error("Killing-generator bracket fails the Jacobi identity (residual {residual:.3e})")]
    JacobiViolation { residual: f64 },

    #[error("quaternionic-type moduli are unsupported; only real and complex type normal forms are implemented")]
    QuaternionicUnsupported,

    #[error("deformation parameter outside the admissible domain: {0}")]
    OutOfDomain(String),

    #[error("unknown model id `{0}`")]
    UnknownModelId(String),

    #[error("bad metric flag: {0}")]
    BadMetricFlag(String),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
