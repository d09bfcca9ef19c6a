use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,

    #[error("division by zero")]
    DivisionByZero,

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("unknown variable `{name}` at byte {offset}")]
    UnknownVariable { name: String, offset: usize },

    #[error("evaluation error: {0}")]
    Eval(String),

    #[error("budget exhausted: {what} (budget {budget})")]
    BudgetExhausted { what: String, budget: u64 },

    #[error("certificate violation: {0}")]
    CertificateViolation(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("enumeration has {available} elements, {needed} required")]
    InsufficientEnumeration { needed: u64, available: u64 },

    #[error("graph has {vertices} vertices, cap is {cap}")]
    TooLarge { vertices: usize, cap: usize },

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ZeroDenominator => "ZeroDenominator",
            Error::DivisionByZero => "DivisionByZero",
            Error::Parse { .. } => "ParseError",
            Error::UnknownVariable { .. } => "UnknownVariable",
            Error::Eval(_) => "EvalError",
            Error::BudgetExhausted { .. } => "BudgetExhausted",
            Error::CertificateViolation(_) => "CertificateViolation",
            Error::Precondition(_) => "PreconditionViolation",
            Error::InsufficientEnumeration { .. } => "InsufficientEnumeration",
            Error::TooLarge { .. } => "TooLarge",
            Error::Invalid(_) => "InvalidInput",
        }
    }

    pub(crate) fn budget(what: impl Into<String>, budget: u64) -> Self {
        Error::BudgetExhausted {
            what: what.into(),
            budget,
        }
    }
}
