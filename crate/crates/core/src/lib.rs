//! Composite congestion games on two parallel arcs.
//!
//! Atomic splittable players and a nonatomic population share two arcs with
//! convex increasing per-unit costs. The crate computes the composite
//! equilibrium (CE), reduces decentralization strategies of one atomic player
//! to single-atomic form, finds optimal decentralizations, solves the
//! equivalent Stackelberg leader problem and reports welfare impacts.
//!
//! ```
//! use congestion_core::{ArcCost, GameInstance, PlayerProfile, solve_ce_bisection};
//!
//! let profile = PlayerProfile::new(0.0, &[0.5, 0.5]).unwrap();
//! let game = GameInstance::from_arcs(
//!     ArcCost::affine(10.0, 1.0, 2.0),
//!     ArcCost::affine(1.0, 10.0, 2.0),
//!     profile,
//! )
//! .unwrap();
//! let ce = solve_ce_bisection(&game).unwrap();
//! assert!((ce.xi[0] - 7.0 / 11.0).abs() < 1e-9);
//! ```

pub mod analysis;
pub mod cost_model;
pub mod decentralization;
pub mod equilibrium;
pub mod error;
pub mod io;
pub mod numeric;
pub mod oracle;
pub mod stackelberg;

pub use analysis::{impact_report, sweep, verify_monotonicity, ImpactReport, SweepTable};
pub use cost_model::{ArcCost, ArcKind, AssumptionCase, CanonicalNetwork, Cost, Network};
pub use decentralization::{
    classify_case, optimal_strategy, sa_reduce, strategy_cost, CaseClassification,
    DecentralizationStrategy, Regime, SAStrategy,
};
pub use equilibrium::{
    classify_mode, solve_ce_bisection, solve_ce_modal, EquilibriumOutcome, GameInstance, Mode,
    Origin, PlayerProfile,
};
pub use error::{CostProperty, Error, Result};
pub use oracle::OracleConfig;
pub use stackelberg::{solve_spne, LeaderFlow, StackelbergSolution};
