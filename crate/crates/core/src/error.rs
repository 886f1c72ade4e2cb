use thiserror::Error;

/// Errors raised while building models, parsing terms, or evaluating constants.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(
        "invalid size model: zeros and applications both have size 0 (a + d must be at least 1)"
    )]
    ZeroSizeZeroAndApplication,
    #[error("invalid size model: successors have size 0 (b must be at least 1)")]
    ZeroSizeSuccessor,
    #[error("invalid size model: abstractions have size 0 (c must be at least 1)")]
    ZeroSizeAbstraction,
    #[error("invalid size model: gcd(b, c, a + d) = {0}, expected 1")]
    GcdNotOne(u64),
    #[error("unknown model `{0}` (expected natural, lessnatural, binary or custom:a,b,c,d)")]
    UnknownModel(String),

    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("De Bruijn index 0 at byte {pos}; indices start at 1")]
    ZeroIndex { pos: usize },

    #[error("enumeration refused: {predicted} terms predicted, cap is {cap}")]
    BudgetExceeded { predicted: u128, cap: u128 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("root bracket could not be refined to {digits} digits")]
    PrecisionUnreachable { digits: u32 },
    #[error("negative radicand while evaluating {context}")]
    NegativeRadicand { context: String },
    #[error("supercriticality guard failed: {0}")]
    GuardViolated(String),
    #[error("bound orientation check failed: {0}")]
    Orientation(String),
}

impl Error {
    /// True for errors caused by bad user input rather than by numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::ZeroSizeZeroAndApplication
                | Error::ZeroSizeSuccessor
                | Error::ZeroSizeAbstraction
                | Error::GcdNotOne(_)
                | Error::UnknownModel(_)
                | Error::Syntax { .. }
                | Error::ZeroIndex { .. }
                | Error::BudgetExceeded { .. }
                | Error::InvalidParameter(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
