use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not Hermitian: {0}")]
    NotHermitian(String),
    #[error("polynomial is not Hermitian: {0}")]
    NotHermitianPoly(String),
    #[error("imaginary residue {residue:e} exceeds bound {bound:e}")]
    ImaginaryResidue { residue: f64, bound: f64 },
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("target degree too small: {0}")]
    DegreeTooSmall(String),
    #[error("not biquadratic: {0}")]
    NotBiquadratic(String),
    #[error("regime mismatch: {0}")]
    Regime(String),
    #[error("unknown fixture {0}")]
    UnknownFixture(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("clearing power insufficient: {0}")]
    Clearing(String),
    #[error("functional has no value for monomial {0}")]
    MissingMoment(String),
    #[error("certificate does not verify")]
    CertificateRejected,
    #[error("wrong basis pattern: {0}")]
    BasisPattern(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
