//! Decentralization strategies of one atomic player, their reduction to a
//! single atomic deputy, the regime classification and the optimal strategy.

use serde::{Deserialize, Serialize};

use crate::cost_model::CanonicalNetwork;
use crate::equilibrium::{
    solve_ce_bisection, AtomicPlayer, EquilibriumOutcome, GameInstance, Mode, Origin,
    PlayerProfile, FLOW_ZERO_TOL,
};
use crate::error::{Error, Result};
use crate::numeric::{scan_then_golden, Minimum, GOLDEN_TOL};
use crate::oracle::{grid_argmin_sa, OracleConfig};

/// Relative tolerance on weight conservation of a strategy.
const WEIGHT_TOL: f64 = 1e-9;
/// Cost agreement required between the optimizer and the grid oracle.
pub const ORACLE_COST_TOL: f64 = 1e-6;
/// Scan points per smooth segment before golden refinement.
const SEGMENT_SCAN_POINTS: usize = 33;

/// Deputy profile `(alpha^0; alpha^1 >= ... >= alpha^n)` of one atomic player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecentralizationStrategy {
    pub nonatomic: f64,
    pub atomic: Vec<f64>,
}

impl DecentralizationStrategy {
    /// Validates the parts and sorts the atomic deputies, heaviest first.
    pub fn new(nonatomic: f64, mut atomic: Vec<f64>) -> Result<Self> {
        if !nonatomic.is_finite() || nonatomic < 0.0 {
            return Err(Error::Strategy(format!(
                "nonatomic part must be non-negative, got {nonatomic}"
            )));
        }
        if let Some(w) = atomic.iter().find(|w| !w.is_finite() || **w <= 0.0) {
            return Err(Error::Strategy(format!(
                "atomic deputies need strictly positive weight, got {w}"
            )));
        }
        atomic.sort_by(|a, b| b.total_cmp(a));
        Ok(DecentralizationStrategy { nonatomic, atomic })
    }

    /// Not decentralizing: a single deputy carrying everything.
    pub fn trivial(weight: f64) -> Self {
        DecentralizationStrategy {
            nonatomic: 0.0,
            atomic: vec![weight],
        }
    }

    /// Handing everything to nonatomic deputies.
    pub fn nonatomic_only(weight: f64) -> Self {
        DecentralizationStrategy {
            nonatomic: weight,
            atomic: Vec::new(),
        }
    }

    /// At most one atomic deputy of weight `s`, the rest nonatomic.
    pub fn from_sa(s: SAStrategy, weight: f64) -> Self {
        if s.s <= 0.0 {
            Self::nonatomic_only(weight)
        } else {
            DecentralizationStrategy {
                nonatomic: (weight - s.s).max(0.0),
                atomic: vec![s.s],
            }
        }
    }

    pub fn weight(&self) -> f64 {
        self.nonatomic + self.atomic.iter().sum::<f64>()
    }
}

/// Single-atomic strategy: one atomic deputy of weight `s`, the rest
/// nonatomic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SAStrategy {
    pub s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// Every strategy is equivalent to the nonatomic one.
    Nonatomic,
    /// Not decentralizing is the unique optimum.
    Trivial,
    Nontrivial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseClassification {
    pub regime: Regime,
    pub big_h: f64,
    pub xi_hat: Option<f64>,
    /// Number of opponents splitting at the CE of the nonatomic strategy.
    pub l0: Option<usize>,
    pub c0: Option<f64>,
    /// `F_0(xi_hat)`.
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    /// Largest `s` whose SA strategy is equivalent to the nonatomic one.
    pub plateau_edge: f64,
    /// `B_l` values inside `(plateau_edge, T^N)`.
    pub breakpoints: Vec<f64>,
}

/// Optimal SA strategy with its cost and the oracle's cross-check.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalDecentralization {
    pub strategy: SAStrategy,
    pub cost: f64,
    pub classification: CaseClassification,
    pub oracle_s: f64,
    pub oracle_cost: f64,
}

/// Weight of the caller's atomic player `player` and the weights of the
/// other atomic players, heaviest first.
pub(crate) fn split_profile(game: &GameInstance, player: usize) -> Result<(f64, Vec<f64>)> {
    let profile = game.profile();
    let pos = profile
        .position_of(player)
        .ok_or_else(|| Error::Profile(format!("no atomic player with index {player}")))?;
    let weight = profile.atomic()[pos].weight;
    let opponents = profile
        .atomic()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != pos)
        .map(|(_, p)| p.weight)
        .collect();
    Ok((weight, opponents))
}

/// The game after `player` is replaced by the deputies of `strategy`.
pub fn induced_game(
    game: &GameInstance,
    player: usize,
    strategy: &DecentralizationStrategy,
) -> Result<GameInstance> {
    let (weight, _) = split_profile(game, player)?;
    let total = strategy.weight();
    if (total - weight).abs() > WEIGHT_TOL * weight.max(1.0) {
        return Err(Error::Strategy(format!(
            "deputy weights sum to {total}, player weight is {weight}"
        )));
    }
    let scale = weight / total;
    let profile = game.profile();
    let mut atomic: Vec<AtomicPlayer> = profile
        .atomic()
        .iter()
        .filter(|p| p.origin != Origin::User(player))
        .copied()
        .collect();
    atomic.extend(
        strategy
            .atomic
            .iter()
            .enumerate()
            .map(|(d, &w)| AtomicPlayer {
                weight: w * scale,
                origin: Origin::Deputy(d),
            }),
    );
    let alpha0 = strategy.nonatomic * scale;
    let induced = PlayerProfile::from_parts(profile.nonatomic() + alpha0, alpha0, atomic)?;
    game.with_profile(induced)
}

/// The CE of the induced game.
pub fn induced_outcome(
    game: &GameInstance,
    player: usize,
    strategy: &DecentralizationStrategy,
) -> Result<EquilibriumOutcome> {
    solve_ce_bisection(&induced_game(game, player, strategy)?)
}

/// Total cost of the deputies, nonatomic share included.
pub fn deputy_cost(outcome: &EquilibriumOutcome) -> f64 {
    let x = outcome.deputy_flow();
    x[0] * outcome.arc_costs[0] + x[1] * outcome.arc_costs[1]
}

/// `U^N(alpha, T^{-N})`.
pub fn strategy_cost(
    game: &GameInstance,
    player: usize,
    strategy: &DecentralizationStrategy,
) -> Result<f64> {
    Ok(deputy_cost(&induced_outcome(game, player, strategy)?))
}

/// `U^N(s, T^{-N})` for an SA strategy.
pub fn sa_cost(game: &GameInstance, player: usize, s: f64) -> Result<f64> {
    let (weight, _) = split_profile(game, player)?;
    strategy_cost(
        game,
        player,
        &DecentralizationStrategy::from_sa(SAStrategy { s }, weight),
    )
}

/// An SA strategy equivalent to `strategy`.
///
/// When the induced CE has mode 2 with `k` splitting deputies the answer is
/// `alpha^[k] - (k - 1) h(xi_1)`. Every other mode is equivalent to the
/// nonatomic strategy and yields `s = 0`.
pub fn sa_reduce(
    game: &GameInstance,
    player: usize,
    strategy: &DecentralizationStrategy,
) -> Result<SAStrategy> {
    let (weight, _) = split_profile(game, player)?;
    let outcome = induced_outcome(game, player, strategy)?;
    let s = match outcome.mode {
        Mode::Mode2 { k, .. } => {
            let splitting: f64 = outcome
                .atomic
                .iter()
                .filter(|p| {
                    matches!(p.origin, Origin::Deputy(_))
                        && p.flow[0] > FLOW_ZERO_TOL
                        && p.flow[1] > FLOW_ZERO_TOL
                })
                .map(|p| p.weight)
                .sum();
            let h = game.network().h(outcome.xi[0]);
            (splitting - (k as f64 - 1.0) * h).clamp(0.0, weight)
        }
        Mode::Mode1 | Mode::Mode3 { .. } | Mode::Mode4 => 0.0,
    };
    let reduced = sa_cost(game, player, s)?;
    let original = deputy_cost(&outcome);
    if (reduced - original).abs() > 1e-7 * original.abs().max(1.0) {
        return Err(Error::Consistency(format!(
            "SA strategy {s} costs {reduced}, original strategy costs {original}"
        )));
    }
    Ok(SAStrategy { s })
}

/// Number of opponents that split at the CE of the nonatomic strategy.
///
/// `opponents` are the other atomic weights, heaviest first.
pub fn compute_l0(net: &CanonicalNetwork, opponents: &[f64]) -> Result<usize> {
    let big_h = net.big_h();
    let n = opponents.len();
    let total: f64 = opponents.iter().sum();
    let f0 = net.f0_at_xi_hat();
    let premise = if big_h > 0.0 {
        n >= 1 && opponents[0] > big_h
    } else {
        n >= 1 && f0.is_some_and(|c1| total > c1)
    };
    if !premise {
        return Err(Error::Regime(
            "the nonatomic strategy does not induce a mode-3 equilibrium".into(),
        ));
    }
    let mut best: Option<(f64, usize)> = None;
    let mut top = 0.0;
    for l in 1..=n {
        top += opponents[l - 1];
        let h = net.h(net.inverse_f(l, top)?);
        let mut violation = (h - opponents[l - 1]).max(0.0);
        if l < n {
            violation = violation.max(opponents[l] - h);
        }
        if big_h <= 0.0 {
            violation = violation.max(f0.unwrap_or(0.0) - top);
        }
        if violation == 0.0 && h < opponents[l - 1] {
            return Ok(l);
        }
        if best.map_or(true, |(v, _)| violation < v) {
            best = Some((violation, l));
        }
    }
    match best {
        Some((v, l)) if v <= 1e-9 * net.mass.max(1.0) => Ok(l),
        _ => Err(Error::Regime(
            "no opponent count satisfies the mode-3 conditions".into(),
        )),
    }
}

/// `B_l = F_{l+1}(h^{-1}(T^{l+1})) - T^[l]` for `l = 0..opponents.len()`.
pub fn breakpoint_values(net: &CanonicalNetwork, opponents: &[f64]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(opponents.len());
    let mut top = 0.0;
    for (l, &next) in opponents.iter().enumerate() {
        out.push(net.f(l + 1, net.inverse_h(next)?) - top);
        top += next;
    }
    Ok(out)
}

/// Determines which optimality regime `player` faces.
pub fn classify_case(game: &GameInstance, player: usize) -> Result<CaseClassification> {
    let net = game.network();
    let (weight, opponents) = split_profile(game, player)?;
    let big_h = net.big_h();
    let xi_hat = net.xi_hat();
    let c1 = net.f0_at_xi_hat();
    let total_opp: f64 = opponents.iter().sum();
    let heaviest_opp = opponents.first().copied();

    let l0 = compute_l0(net, &opponents).ok();
    let c0 = match l0 {
        Some(l) => {
            let top: f64 = opponents[..l].iter().sum();
            Some(net.h(net.inverse_f(l, top)?))
        }
        None => None,
    };

    let regime = if big_h > 0.0 {
        let opp_small = heaviest_opp.map_or(true, |t| t <= big_h);
        let small_self = if opp_small {
            weight <= big_h
        } else {
            c0.is_some_and(|c| weight <= c)
        };
        if small_self {
            Regime::Nonatomic
        } else if opp_small {
            Regime::Trivial
        } else {
            Regime::Nontrivial
        }
    } else {
        let c1v =
            c1.ok_or_else(|| Error::Network("non-positive H without a crossing point".into()))?;
        let all_small = weight + total_opp <= c1v;
        let small_self =
            !opponents.is_empty() && total_opp > c1v && c0.is_some_and(|c| weight <= c);
        if all_small || small_self {
            Regime::Nonatomic
        } else if opponents.is_empty() && weight > c1v {
            Regime::Trivial
        } else {
            Regime::Nontrivial
        }
    };

    // SA strategies up to the plateau edge are equivalent to the nonatomic one.
    let edge = if let Some(c) = c0 {
        c
    } else if big_h > 0.0 {
        big_h
    } else {
        c1.unwrap_or(0.0) - total_opp
    }
    .clamp(0.0, weight);

    let breakpoints = breakpoint_values(net, &opponents)?
        .into_iter()
        .filter(|&b| b > edge && b < weight)
        .collect();

    Ok(CaseClassification {
        regime,
        big_h,
        xi_hat,
        l0,
        c0,
        c1,
        c2: if big_h <= 0.0 { c0 } else { None },
        plateau_edge: edge,
        breakpoints,
    })
}

/// Optimal SA strategy of `player`, cross-checked against the grid oracle
/// with the default configuration.
pub fn optimal_strategy(game: &GameInstance, player: usize) -> Result<OptimalDecentralization> {
    optimal_strategy_with(game, player, &OracleConfig::default())
}

/// [`optimal_strategy`] with an explicit oracle configuration.
pub fn optimal_strategy_with(
    game: &GameInstance,
    player: usize,
    cfg: &OracleConfig,
) -> Result<OptimalDecentralization> {
    let (weight, _) = split_profile(game, player)?;
    let classification = classify_case(game, player)?;
    let best = match classification.regime {
        Regime::Nonatomic => Minimum {
            x: 0.0,
            value: sa_cost(game, player, 0.0)?,
        },
        Regime::Trivial => Minimum {
            x: weight,
            value: sa_cost(game, player, weight)?,
        },
        Regime::Nontrivial => segmented_minimum(game, player, weight, &classification)?,
    };
    let (oracle_s, oracle_cost) = grid_argmin_sa(game, player, cfg)?;
    if (oracle_cost - best.value).abs() > ORACLE_COST_TOL {
        return Err(Error::Consistency(format!(
            "optimal SA cost {} at s = {} disagrees with grid oracle {} at s = {}",
            best.value, best.x, oracle_cost, oracle_s
        )));
    }
    Ok(OptimalDecentralization {
        strategy: SAStrategy { s: best.x },
        cost: best.value,
        classification,
        oracle_s,
        oracle_cost,
    })
}

fn segmented_minimum(
    game: &GameInstance,
    player: usize,
    weight: f64,
    class: &CaseClassification,
) -> Result<Minimum> {
    let mut cuts = vec![class.plateau_edge];
    cuts.extend(class.breakpoints.iter().copied());
    cuts.push(weight);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    // Solver failures inside the objective are surfaced after the search.
    let failure = std::cell::RefCell::new(None);
    let objective = |s: f64| match sa_cost(game, player, s) {
        Ok(u) => u,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::INFINITY
        }
    };
    let mut best = Minimum {
        x: 0.0,
        value: objective(0.0),
    };
    for w in cuts.windows(2) {
        best = best.better(scan_then_golden(
            objective,
            w[0],
            w[1],
            SEGMENT_SCAN_POINTS,
            GOLDEN_TOL,
        ));
    }
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(best)
}
