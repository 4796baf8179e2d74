use thiserror::Error;

/// Failure modes shared by every module of the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("product of two parameter-dependent coefficients `{0}` and `{1}` leaves the affine class")]
    NonlinearParameterProduct(String, String),

    #[error("total u-degree {degree} exceeds the cap {cap}")]
    UDegreeOverflow { degree: u32, cap: u32 },

    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),

    #[error("no solution at eps-order {order}: {detail}")]
    NoSolution { order: u32, detail: String },

    #[error("coefficients are not constant: {0}")]
    NotConstantCoefficients(String),

    #[error("operator failed the Poisson precheck: {0}")]
    NotPoissonInput(String),

    #[error("operator has a nonzero dx^0 column: {0}")]
    NoDxFactor(String),

    #[error("missing structure: {0}")]
    MissingStructure(&'static str),

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("division by a zero or parameter-dependent quantity")]
    DivisionByZero,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("syntax error at {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("unknown parameter `{0}` (declare it with --param)")]
    UnknownParameter(String),
}

impl Error {
    /// Stable machine-readable code, used by the CLI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonlinearParameterProduct(..) => "E_NONLINEAR",
            Error::UDegreeOverflow { .. } => "E_UDEGREE",
            Error::DegreeMismatch(_) => "E_DEGREE",
            Error::NoSolution { .. } => "E_NOSOLUTION",
            Error::NotConstantCoefficients(_) => "E_NONCONSTANT",
            Error::NotPoissonInput(_) => "E_NOTPOISSON",
            Error::NoDxFactor(_) => "E_NODXFACTOR",
            Error::MissingStructure(_) => "E_MISSING",
            Error::OutOfRange(_) => "E_RANGE",
            Error::DivisionByZero => "E_DIVZERO",
            Error::InvalidInput(_) => "E_INPUT",
            Error::Syntax { .. } => "E_SYNTAX",
            Error::UnknownParameter(_) => "E_PARAM",
        }
    }
}

impl Error {
    /// Errors caused by malformed input rather than by the mathematics.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Syntax { .. } | Error::UnknownParameter(_) | Error::InvalidInput(_) | Error::OutOfRange(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
