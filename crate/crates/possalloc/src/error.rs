//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by construction, evaluation and solving.
#[derive(Debug, Error)]
pub enum Error {
    /// A constructor argument violates its contract (negative spread,
    /// zero exponent, bad grid, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A membership level outside the unit interval.
    #[error("membership level {0} outside [0, 1]")]
    LevelOutOfRange(f64),

    /// An integrand or utility produced a non-finite value.
    #[error("non-finite evaluation: {0}")]
    NonFinite(String),

    /// The requested closed form is only available for a specific
    /// operator/weighting combination.
    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),

    /// A wealth argument (or the wealth reached on the support of the risk)
    /// falls outside the utility domain.
    #[error("utility domain violation: wealth {wealth} outside ({lo}, {hi}){context}")]
    DomainViolation {
        wealth: f64,
        lo: f64,
        hi: f64,
        context: String,
    },

    /// An indicator ratio has a vanishing denominator.
    #[error("indicator undefined: {0}")]
    IndicatorUndefined(String),

    /// The portfolio model cannot support the requested computation
    /// (zero variance, zero risk aversion, uncentered risk, ...).
    #[error("degenerate model: {0}")]
    DegenerateModel(String),

    /// The first-order condition has no sign change inside the feasible
    /// range; the report carries the boundary behaviour.
    #[error("no interior optimum: {0}")]
    NoInteriorOptimum(String),

    /// The bisection loop stopped before meeting the residual tolerance.
    #[error("solver did not converge: {0}")]
    SolverFailure(String),

    /// A document failed to parse or validate.
    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(wealth: f64, domain: (f64, f64), context: impl Into<String>) -> Self {
        let context = context.into();
        Error::DomainViolation {
            wealth,
            lo: domain.0,
            hi: domain.1,
            context: if context.is_empty() {
                context
            } else {
                format!(" ({context})")
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
