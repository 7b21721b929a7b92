use thiserror::Error;

pub type Result<T> = std::result::Result<T, AinError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AinError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("M must be a multiple of 4 (got M = {m})")]
    UnsupportedDimension { m: usize },

    #[error("channel {which} is singular or ill-conditioned")]
    SingularChannel { which: &'static str },

    #[error("{what} is rank deficient (smallest singular value {sigma_min:e})")]
    RankDeficient { what: &'static str, sigma_min: f64 },

    #[error("channel generation failed after {attempts} consecutive singular draws")]
    GenerationFailure { attempts: usize },

    #[error("degenerate channel: coefficient {which} is zero")]
    DegenerateChannel { which: &'static str },

    #[error(
        "constellation enumeration needs {tuples} tuples for Q = {q}, \
         exceeding the budget of {budget}; reduce Q (raise epsilon or lower gamma) or raise the budget"
    )]
    EnumerationTooLarge { q: u32, tuples: u128, budget: u64 },

    #[error("channel realization is rationally dependent after {attempts} direction draws")]
    RationallyDependent { attempts: usize },

    #[error("relay mode {mode} is not supported for {scheme}")]
    UnsupportedMode {
        mode: &'static str,
        scheme: &'static str,
    },
}
