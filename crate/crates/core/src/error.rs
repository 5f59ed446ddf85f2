use std::fmt;

use thiserror::Error;

/// Property of an arc cost function checked at validation time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostProperty {
    Finite,
    NonNegative,
    StrictlyIncreasing,
    Convex,
}

impl fmt::Display for CostProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CostProperty::Finite => "finiteness",
            CostProperty::NonNegative => "non-negativity",
            CostProperty::StrictlyIncreasing => "strict monotonicity",
            CostProperty::Convex => "convexity",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("argument {t} outside the cost domain [0, {bound}]")]
    Domain { t: f64, bound: f64 },

    #[error("arc cost violates {property} at t = {witness}: {detail}")]
    CostAssumption {
        property: CostProperty,
        witness: f64,
        detail: String,
    },

    #[error("invalid network: {0}")]
    Network(String),

    #[error("invalid player profile: {0}")]
    Profile(String),

    #[error("invalid decentralization strategy: {0}")]
    Strategy(String),

    #[error("invalid leader flow: {0}")]
    LeaderFlow(String),

    #[error("value {value} cannot be inverted")]
    Bracket { value: f64 },

    #[error("regime premise violated: {0}")]
    Regime(String),

    #[error("cannot classify equilibrium: {0}")]
    Classification(String),

    #[error("no iteration convergence after {iterations} steps (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("solver consistency failure: {0}")]
    Consistency(String),
}

impl Error {
    /// True for errors caused by bad input rather than by the solvers.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. }
                | Error::CostAssumption { .. }
                | Error::Network(_)
                | Error::Profile(_)
                | Error::Strategy(_)
                | Error::LeaderFlow(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
