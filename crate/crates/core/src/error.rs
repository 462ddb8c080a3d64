use thiserror::Error;

/// Everything that can go wrong inside the library.
///
/// Variants fall into three classes, see [`Error::class`]: bad input, refusals
/// caused by precision or budget limits, and defects (a guaranteed object was
/// not found or a guaranteed inequality failed).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precision exceeded: need coefficients down to z^-{needed}, have z^-{available}")]
    PrecisionExceeded { needed: i64, available: i64 },
    #[error("zero status undecidable: all known coefficients down to z^-{prec} vanish")]
    IndeterminateZero { prec: i64 },
    #[error("division by zero")]
    DivideByZero,
    #[error("continued fraction precision exhausted: {safe_k} partial quotients certified")]
    CfPrecision { safe_k: usize },
    #[error("partial quotient spec exhausted after {available} quotients")]
    SpecExhausted { available: usize },
    #[error("continued fraction too short: need index {needed}, have {available}")]
    CfTooShort { needed: usize, available: usize },
    #[error("budget exceeded for {what}: requested {requested}, cap {cap}")]
    BudgetExceeded { what: &'static str, requested: u128, cap: u128 },
    #[error("entries are not exact rational functions")]
    NotExact,

    #[error("polynomial degree {deg} is not below deg Q_(k+1) = {bound}")]
    DepthTooSmall { deg: usize, bound: usize },
    #[error("digit {index} has degree {deg}, partial quotient has degree {bound}")]
    InvalidPrefix { index: usize, deg: usize, bound: usize },
    #[error("element lies outside the open unit ball")]
    OutsideUnitBall,
    #[error("the transference hypothesis does not hold")]
    HypothesisFails,
    #[error("no solution with norm at most q^{bound}")]
    NotFoundAtBound { bound: i64 },
    #[error("condition (2) of the Kronecker criterion fails: {0}")]
    ConditionFails(String),
    #[error("no valid extension of the index sequence beyond position {at}")]
    PrefixTooShort { at: usize },

    #[error("defect: {0}")]
    Defect(String),
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Input,
    Refusal,
    Defect,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            InvalidField(_) | Parse(_) | DimensionMismatch(_) | InvalidInput(_) | DepthTooSmall { .. }
            | InvalidPrefix { .. } | OutsideUnitBall | HypothesisFails | ConditionFails(_) | NotExact => {
                ErrorClass::Input
            }
            PrecisionExceeded { .. }
            | IndeterminateZero { .. }
            | DivideByZero
            | CfPrecision { .. }
            | SpecExhausted { .. }
            | CfTooShort { .. }
            | BudgetExceeded { .. }
            | NotFoundAtBound { .. }
            | PrefixTooShort { .. } => ErrorClass::Refusal,
            Defect(_) => ErrorClass::Defect,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Hard desk-scale cap on the number of candidates any single exhaustive scan may visit.
pub const SCAN_CAP: u128 = 1 << 26;

pub(crate) fn check_budget(what: &'static str, requested: u128, cap: u128) -> Result<()> {
    if requested > cap {
        Err(Error::BudgetExceeded { what, requested, cap })
    } else {
        Ok(())
    }
}
