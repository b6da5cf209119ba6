use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("degree mismatch: {0}")]
    Degree(String),
    #[error("unsupported ambient dimension {0} (expected 1..=8)")]
    AmbientDimension(usize),
    #[error("invalid Lie algebra: {0}")]
    InvalidAlgebra(String),
    #[error("endomorphism is not a derivation (residual {0})")]
    NotDerivation(String),
    #[error("not a positive 3-form: {0}")]
    NotPositive(String),
    #[error("metric is not positive-definite")]
    MetricNotPositive,
    #[error("{0} has no exact root in the rational backend; use the float backend")]
    InexactRoot(&'static str),
    #[error("3-form is not closed (|dφ| = {0:e})")]
    NotClosed(f64),
    #[error("inconsistent torsion system (residual {0:e})")]
    InconsistentTorsion(f64),
    #[error("not ERP: {0}")]
    NotErp(String),
    #[error("omega degenerate")]
    OmegaDegenerate,
    #[error("psi not stable")]
    PsiNotStable,
    #[error("incompatible pair: {0}")]
    IncompatiblePair(String),
    #[error("inconsistent: {0}")]
    Inconsistent(String),
    #[error("numerical inconsistency: {0}")]
    Numerical(String),
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error("unknown catalog entry '{0}'")]
    UnknownEntry(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
}
