use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// The surviving fleet alone exceeds transport demand.
    #[error("negative new-vehicle demand in {year}: surviving fleet exceeds demand by {excess} vehicles")]
    NegativeDemand { year: i32, excess: f64 },
    #[error("no emission factor for cohort year {cohort_year}")]
    MissingCohortFactor { cohort_year: i32 },
    #[error("no exogenous inputs for year {year}")]
    MissingYear { year: i32 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("division by zero: {0}")]
    DivisionByZero(String),
    #[error("empty parameter grid")]
    EmptyGrid,
    #[error(
        "infeasible target: {target} Mt requested but the upper control bound only reaches {reachable} Mt"
    )]
    Infeasible { target: f64, reachable: f64 },
}
