//! The Stackelberg game where one atomic player commits a flow first and the
//! others reach a CE on the pre-loaded arcs.

use serde::{Deserialize, Serialize};

use crate::cost_model::{Network, Shifted};
use crate::decentralization::{
    induced_outcome, optimal_strategy_with, split_profile, DecentralizationStrategy, SAStrategy,
};
use crate::equilibrium::{
    assemble_unclassified, bisection_flows, classify_mode, EquilibriumOutcome, GameInstance,
    Origin, PlayerProfile,
};
use crate::error::{Error, Result};
use crate::oracle::{numeric_leader_argmin, OracleConfig};

/// Agreement required between the constructed SPNE and the numeric leader
/// optimum.
pub const LEADER_COST_TOL: f64 = 1e-6;

/// Leader flow on (arc 1, arc 2) in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeaderFlow {
    pub x1: f64,
    pub x2: f64,
}

impl LeaderFlow {
    /// Checks non-negativity and that the flow routes exactly `weight`.
    pub fn new(x1: f64, x2: f64, weight: f64) -> Result<Self> {
        if !(x1.is_finite() && x2.is_finite()) || x1 < 0.0 || x2 < 0.0 {
            return Err(Error::LeaderFlow(format!(
                "flows ({x1}, {x2}) must be non-negative"
            )));
        }
        if (x1 + x2 - weight).abs() > 1e-9 * weight.max(1.0) {
            return Err(Error::LeaderFlow(format!(
                "flows ({x1}, {x2}) do not sum to the leader weight {weight}"
            )));
        }
        Ok(LeaderFlow { x1, x2 })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StackelbergSolution {
    pub leader_flow: LeaderFlow,
    /// Followers only; `xi` excludes the leader while `arc_costs` include it.
    pub follower_outcome: EquilibriumOutcome,
    pub leader_cost: f64,
    /// The optimal SA strategy the leader flow was built from.
    pub strategy: SAStrategy,
    pub oracle_x1: f64,
    pub oracle_cost: f64,
}

fn followers(game: &GameInstance, leader: usize) -> Result<(f64, PlayerProfile)> {
    let (weight, _) = split_profile(game, leader)?;
    let profile = game.profile();
    let atomic = profile
        .atomic()
        .iter()
        .filter(|p| p.origin != Origin::User(leader))
        .copied()
        .collect();
    Ok((
        weight,
        PlayerProfile::from_parts(profile.nonatomic(), 0.0, atomic)?,
    ))
}

/// CE of the followers when the leader routes `x`.
///
/// The shifted arcs may favour arc 2, in which case the mode is read with the
/// arcs exchanged.
pub fn follower_ce(
    game: &GameInstance,
    leader: usize,
    x: LeaderFlow,
) -> Result<EquilibriumOutcome> {
    let (weight, profile) = followers(game, leader)?;
    let x = LeaderFlow::new(x.x1, x.x2, weight)?;
    let base = game.network();
    let net = Network::new(
        Shifted {
            inner: &base.arc1,
            offset: x.x1,
        },
        Shifted {
            inner: &base.arc2,
            offset: x.x2,
        },
        (base.mass - weight).max(0.0),
    );
    let raw = bisection_flows(&net, profile.nonatomic(), &profile.weights());
    let outcome = assemble_unclassified(&net, &profile, &raw);
    let mode = if outcome.arc_costs[0] <= outcome.arc_costs[1] {
        classify_mode(&outcome)?
    } else {
        classify_mode(&mirrored(&outcome))?
    };
    Ok(EquilibriumOutcome { mode, ..outcome })
}

fn mirrored(outcome: &EquilibriumOutcome) -> EquilibriumOutcome {
    let swap = |p: [f64; 2]| [p[1], p[0]];
    let mut m = outcome.clone();
    for p in &mut m.atomic {
        p.flow = swap(p.flow);
    }
    m.nonatomic_flow = swap(m.nonatomic_flow);
    m.xi = swap(m.xi);
    m.arc_costs = swap(m.arc_costs);
    m
}

/// `Pi^N(x, T^{-N}) = x_1 c_1(xi_1) + x_2 c_2(xi_2)` at the followers' CE.
pub fn leader_cost(game: &GameInstance, leader: usize, x: LeaderFlow) -> Result<f64> {
    let outcome = follower_ce(game, leader, x)?;
    Ok(x.x1 * outcome.arc_costs[0] + x.x2 * outcome.arc_costs[1])
}

/// SPNE built from the optimal decentralization, cross-checked against the
/// numeric leader optimum with the default oracle configuration.
pub fn solve_spne(game: &GameInstance, leader: usize) -> Result<StackelbergSolution> {
    solve_spne_with(game, leader, &OracleConfig::default())
}

/// [`solve_spne`] with an explicit oracle configuration.
pub fn solve_spne_with(
    game: &GameInstance,
    leader: usize,
    cfg: &OracleConfig,
) -> Result<StackelbergSolution> {
    let (weight, _) = split_profile(game, leader)?;
    let optimum = optimal_strategy_with(game, leader, cfg)?;
    let strategy = DecentralizationStrategy::from_sa(optimum.strategy, weight);
    let deputies = induced_outcome(game, leader, &strategy)?.deputy_flow();
    let x1 = deputies[0].clamp(0.0, weight);
    let leader_flow = LeaderFlow::new(x1, weight - x1, weight)?;
    let follower_outcome = follower_ce(game, leader, leader_flow)?;
    let cost = leader_flow.x1 * follower_outcome.arc_costs[0]
        + leader_flow.x2 * follower_outcome.arc_costs[1];
    let (oracle_x1, oracle_cost) = numeric_leader_argmin(game, leader, cfg)?;
    if (oracle_cost - cost).abs() > LEADER_COST_TOL {
        return Err(Error::Consistency(format!(
            "leader cost {cost} at x1 = {x1} disagrees with numeric optimum {oracle_cost} at x1 = {oracle_x1}"
        )));
    }
    Ok(StackelbergSolution {
        leader_flow,
        follower_outcome,
        leader_cost: cost,
        strategy: optimum.strategy,
        oracle_x1,
        oracle_cost,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost_model::ArcCost;

    fn game(a: ArcCost, b: ArcCost, w: &[f64]) -> GameInstance {
        GameInstance::from_arcs(a, b, PlayerProfile::new(0.0, w).unwrap()).unwrap()
    }

    fn g1() -> GameInstance {
        game(
            ArcCost::affine(10.0, 1.0, 2.0),
            ArcCost::affine(1.0, 10.0, 2.0),
            &[0.5, 0.5],
        )
    }

    fn coarse() -> OracleConfig {
        OracleConfig {
            grid_resolution: 1e-3,
            leader_resolution: 1e-3,
            ..OracleConfig::default()
        }
    }

    #[test]
    fn intro_leader_flow_reproduces_decentralized_ce() {
        let g = g1();
        let x = LeaderFlow::new(20.0 / 44.0, 2.0 / 44.0, 0.5).unwrap();
        let ce = follower_ce(&g, 1, x).unwrap();
        let opp = ce.user_player(0).unwrap();
        assert!((opp.flow[0] - 0.25).abs() < 1e-9);
        assert!((leader_cost(&g, 1, x).unwrap() - 4.125).abs() < 1e-9);
    }

    #[test]
    fn simultaneous_flow_gives_baseline_cost() {
        // User order (2/11, 7/22) is canonical (7/22, 2/11).
        let x = LeaderFlow::new(7.0 / 22.0, 2.0 / 11.0, 0.5).unwrap();
        assert!((leader_cost(&g1(), 1, x).unwrap() - 1023.0 / 242.0).abs() < 1e-9);
    }

    #[test]
    fn full_leader_on_arc_one_in_case_one() {
        let g3 = game(
            ArcCost::affine(1.0, 1.0, 2.0),
            ArcCost::affine(5.0, 1.0, 2.0),
            &[0.5, 0.5],
        );
        let ce = follower_ce(&g3, 0, LeaderFlow::new(0.5, 0.0, 0.5).unwrap()).unwrap();
        assert_eq!(ce.xi, [0.5, 0.0]);
    }

    #[test]
    fn symmetric_sole_leader() {
        let sym = game(
            ArcCost::affine(0.0, 1.0, 2.0),
            ArcCost::affine(0.0, 1.0, 2.0),
            &[1.0],
        );
        for a in [0.0, 0.3, 0.5, 1.0] {
            let u = leader_cost(&sym, 0, LeaderFlow::new(a, 1.0 - a, 1.0).unwrap()).unwrap();
            assert!((u - (a * a + (1.0 - a) * (1.0 - a))).abs() < 1e-12);
        }
    }

    #[test]
    fn infeasible_leader_flow_is_rejected() {
        assert!(matches!(
            LeaderFlow::new(0.3, 0.3, 0.5),
            Err(Error::LeaderFlow(_))
        ));
        assert!(matches!(
            LeaderFlow::new(-0.1, 0.6, 0.5),
            Err(Error::LeaderFlow(_))
        ));
        assert!(LeaderFlow::new(0.0, 0.0, 0.0).is_ok());
    }

    #[test]
    fn spne_of_reference_games() {
        let sol = solve_spne_with(&g1(), 1, &coarse()).unwrap();
        assert!((sol.leader_cost - 4.125).abs() < 1e-9);
        assert!((sol.leader_flow.x1 - 20.0 / 44.0).abs() < 1e-6);

        let g2 = game(
            ArcCost::affine(0.0, 1.0, 1.0),
            ArcCost::affine(0.5, 1.0, 1.0),
            &[0.4],
        );
        let sol = solve_spne_with(&g2, 0, &coarse()).unwrap();
        assert!((sol.leader_cost - 0.14875).abs() < 1e-9);
        assert!((sol.leader_flow.x1 - 0.325).abs() < 1e-9);

        let g3 = game(
            ArcCost::affine(1.0, 1.0, 2.0),
            ArcCost::affine(5.0, 1.0, 2.0),
            &[0.5, 0.5],
        );
        let sol = solve_spne_with(&g3, 0, &coarse()).unwrap();
        assert!((sol.leader_cost - 1.0).abs() < 1e-9);
        assert_eq!(sol.leader_flow.x1, 0.5);
    }
}
