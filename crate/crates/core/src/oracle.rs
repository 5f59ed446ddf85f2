//! Brute-force verifiers: a damped best-response iteration for the CE, a grid
//! search over SA strategies and a grid search over leader flows.
//!
//! Responses are computed straight from the arc costs and never go through
//! the auxiliary functions or the modal closed forms.

use crate::cost_model::{Cost, Network};
use crate::decentralization::{induced_game, split_profile, DecentralizationStrategy, SAStrategy};
use crate::equilibrium::{
    assemble_unclassified, classify_mode, EquilibriumOutcome, GameInstance, RawFlows,
};
use crate::error::{Error, Result};
use crate::numeric::{golden_section, Minimum, GOLDEN_TOL};
use crate::stackelberg::{leader_cost, LeaderFlow};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Grid step over SA strategies, relative to the player's weight.
    pub grid_resolution: f64,
    /// Grid step over leader flows, relative to the leader's weight.
    pub leader_resolution: f64,
    pub br_damping: f64,
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            grid_resolution: 1e-4,
            leader_resolution: 1e-5,
            br_damping: 0.5,
            max_iterations: 100_000,
            tolerance: 1e-10,
        }
    }
}

impl OracleConfig {
    fn validate(&self) -> Result<()> {
        let ok = self.grid_resolution > 0.0
            && self.leader_resolution > 0.0
            && self.br_damping > 0.0
            && self.br_damping <= 1.0
            && self.max_iterations > 0
            && self.tolerance > 0.0
            && self.tolerance <= 1e-7;
        if ok {
            Ok(())
        } else {
            Err(Error::Consistency(format!(
                "invalid oracle configuration {self:?}"
            )))
        }
    }
}

/// Arc-1 best response of an atomic player of weight `w` to aggregate `xi`.
fn best_response<C: Cost>(net: &Network<C>, w: f64, xi: f64) -> f64 {
    let m = net.mass;
    let (c1, c2) = (net.arc1.value(xi), net.arc2.value(m - xi));
    let (d1, d2) = (net.arc1.slope(xi), net.arc2.slope(m - xi));
    ((c2 - c1 + w * d2) / (d1 + d2)).clamp(0.0, w)
}

/// Where the nonatomic population settles given the atomic arc-1 total.
#[derive(Debug, Clone, Copy)]
enum Population {
    Crossing(f64),
    AllOnArc1,
    AllOnArc2,
}

fn population<C: Cost>(net: &Network<C>) -> Population {
    let m = net.mass;
    let gap = |t: f64| net.arc1.value(t) - net.arc2.value(m - t);
    if gap(m) < 0.0 {
        return Population::AllOnArc1;
    }
    if gap(0.0) > 0.0 {
        return Population::AllOnArc2;
    }
    let (mut lo, mut hi) = (0.0, m);
    while hi - lo > 1e-13 * m.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if gap(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Population::Crossing(0.5 * (lo + hi))
}

fn population_response(pop: Population, atomic: f64, mass: f64) -> f64 {
    match pop {
        Population::Crossing(x) => (x - atomic).clamp(0.0, mass),
        Population::AllOnArc1 => mass,
        Population::AllOnArc2 => 0.0,
    }
}

/// CE flows by damped best-response iteration on the aggregate arc-1 flow.
pub(crate) fn br_flows<C: Cost>(
    net: &Network<C>,
    nonatomic: f64,
    weights: &[f64],
    start: f64,
    cfg: &OracleConfig,
) -> Result<RawFlows> {
    let m = net.mass;
    let pop = population(net);
    let phi = |xi: f64| -> (Vec<f64>, f64) {
        let atomic: Vec<f64> = weights.iter().map(|&w| best_response(net, w, xi)).collect();
        let sum: f64 = atomic.iter().sum();
        let r0 = population_response(pop, sum, nonatomic);
        (atomic, r0)
    };
    let residual = |xi: f64| {
        let (a, r0) = phi(xi);
        a.iter().sum::<f64>() + r0 - xi
    };

    let mut xi = start.clamp(0.0, m);
    let mut lambda = cfg.br_damping;
    let mut r = residual(xi);
    let mut iterations = 0;
    while r.abs() >= cfg.tolerance {
        if iterations >= cfg.max_iterations || lambda < 1e-16 {
            return Err(Error::NonConvergence {
                iterations,
                residual: r.abs(),
            });
        }
        iterations += 1;
        let next = (xi + lambda * r).clamp(0.0, m);
        let rn = residual(next);
        if rn.abs() < r.abs() {
            xi = next;
            r = rn;
        } else {
            lambda *= 0.5;
        }
    }
    let (atomic_arc1, nonatomic_arc1) = phi(xi);
    Ok(RawFlows {
        atomic_arc1,
        nonatomic_arc1,
    })
}

/// The CE by damped best-response iteration from `start`.
pub fn best_response_iteration_ce(
    game: &GameInstance,
    start: f64,
    cfg: &OracleConfig,
) -> Result<EquilibriumOutcome> {
    cfg.validate()?;
    let net = game.network();
    if !(0.0..=net.mass).contains(&start) {
        return Err(Error::Consistency(format!(
            "start {start} outside [0, {}]",
            net.mass
        )));
    }
    let profile = game.profile();
    let raw = br_flows(net, profile.nonatomic(), &profile.weights(), start, cfg)?;
    let outcome = assemble_unclassified(net, profile, &raw);
    let mode = classify_mode(&outcome)?;
    Ok(EquilibriumOutcome { mode, ..outcome })
}

fn br_sa_cost(
    game: &GameInstance,
    player: usize,
    weight: f64,
    s: f64,
    cfg: &OracleConfig,
) -> Result<f64> {
    let strategy = DecentralizationStrategy::from_sa(SAStrategy { s }, weight);
    let induced = induced_game(game, player, &strategy)?;
    let profile = induced.profile();
    let net = induced.network();
    let raw = br_flows(net, profile.nonatomic(), &profile.weights(), 0.0, cfg)?;
    let outcome = assemble_unclassified(&**net, profile, &raw);
    let x = outcome.deputy_flow();
    Ok(x[0] * outcome.arc_costs[0] + x[1] * outcome.arc_costs[1])
}

/// Grid minimization over a scalar decision on `[0, upper]` followed by a
/// golden refinement on the cells around the best grid point.
fn grid_then_refine<F>(objective: F, upper: f64, resolution: f64) -> Result<Minimum>
where
    F: Fn(f64) -> Result<f64>,
{
    let cells = (1.0 / resolution).ceil().max(1.0) as usize;
    let step = upper / cells as f64;
    let mut best = Minimum {
        x: 0.0,
        value: objective(0.0)?,
    };
    let mut best_i = 0;
    for i in 1..=cells {
        let x = if i == cells { upper } else { step * i as f64 };
        let value = objective(x)?;
        if value < best.value {
            best = Minimum { x, value };
            best_i = i;
        }
    }
    let lo = step * best_i.saturating_sub(1) as f64;
    let hi = (step * (best_i + 1) as f64).min(upper);
    let failure = std::cell::RefCell::new(None);
    let refined = golden_section(
        |x| match objective(x) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::INFINITY
            }
        },
        lo,
        hi,
        GOLDEN_TOL,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(best.better(refined))
}

/// Grid argmin of `s -> U^N(s)` with every CE found by best-response
/// iteration.
pub fn grid_argmin_sa(
    game: &GameInstance,
    player: usize,
    cfg: &OracleConfig,
) -> Result<(f64, f64)> {
    cfg.validate()?;
    let (weight, _) = split_profile(game, player)?;
    let best = grid_then_refine(
        |s| br_sa_cost(game, player, weight, s, cfg),
        weight,
        cfg.grid_resolution,
    )?;
    Ok((best.x, best.value))
}

/// Grid argmin of the leader cost over the canonical arc-1 flow
/// `x_1 in [0, T^N]`.
pub fn numeric_leader_argmin(
    game: &GameInstance,
    leader: usize,
    cfg: &OracleConfig,
) -> Result<(f64, f64)> {
    cfg.validate()?;
    let (weight, _) = split_profile(game, leader)?;
    let best = grid_then_refine(
        |x1| leader_cost(game, leader, LeaderFlow::new(x1, weight - x1, weight)?),
        weight,
        cfg.leader_resolution,
    )?;
    Ok((best.x, best.value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost_model::ArcCost;
    use crate::equilibrium::PlayerProfile;

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
    fn br_reaches_intro_equilibrium_from_both_ends() {
        let g = g1();
        let cfg = OracleConfig::default();
        for start in [0.0, 1.0] {
            let ce = best_response_iteration_ce(&g, start, &cfg).unwrap();
            assert!((ce.xi[0] - 7.0 / 11.0).abs() < 1e-7);
        }
    }

    #[test]
    fn br_symmetric_and_corner() {
        let cfg = OracleConfig::default();
        let sym = game(
            ArcCost::affine(0.0, 1.0, 2.0),
            ArcCost::affine(0.0, 1.0, 2.0),
            &[1.0],
        );
        for start in [0.0, 0.3, 1.0] {
            let ce = best_response_iteration_ce(&sym, start, &cfg).unwrap();
            assert!((ce.xi[0] - 0.5).abs() < 1e-9);
        }
        let g3 = game(
            ArcCost::affine(1.0, 1.0, 2.0),
            ArcCost::affine(5.0, 1.0, 2.0),
            &[0.5, 0.5],
        );
        let ce = best_response_iteration_ce(&g3, 0.0, &cfg).unwrap();
        assert!((ce.xi[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn br_reports_non_convergence() {
        let cfg = OracleConfig {
            max_iterations: 2,
            ..OracleConfig::default()
        };
        assert!(matches!(
            best_response_iteration_ce(&g1(), 0.0, &cfg),
            Err(Error::NonConvergence { .. })
        ));
    }

    #[test]
    fn grid_sa_on_reference_games() {
        let (s, u) = grid_argmin_sa(&g1(), 1, &coarse()).unwrap();
        assert!((s - 0.275).abs() < 1e-3);
        assert!((u - 4.125).abs() < 1e-8);

        let g2 = game(
            ArcCost::affine(0.0, 1.0, 1.0),
            ArcCost::affine(0.5, 1.0, 1.0),
            &[0.4],
        );
        let (s, u) = grid_argmin_sa(&g2, 0, &coarse()).unwrap();
        // U is flat to first order at the endpoint, so only grid accuracy.
        assert!((s - 0.4).abs() <= 1e-3 * 0.4);
        assert!((u - 0.14875).abs() < 1e-9);

        let g3 = game(
            ArcCost::affine(1.0, 1.0, 2.0),
            ArcCost::affine(5.0, 1.0, 2.0),
            &[0.5, 0.5],
        );
        let (_, u) = grid_argmin_sa(&g3, 0, &coarse()).unwrap();
        assert!((u - 1.0).abs() < 1e-9);
    }

    #[test]
    fn leader_grid_on_reference_games() {
        let (_, u) = numeric_leader_argmin(&g1(), 1, &coarse()).unwrap();
        assert!((u - 4.125).abs() < 1e-8);
        let sym = game(
            ArcCost::affine(0.0, 1.0, 2.0),
            ArcCost::affine(0.0, 1.0, 2.0),
            &[1.0],
        );
        let (x1, _) = numeric_leader_argmin(&sym, 0, &coarse()).unwrap();
        assert!((x1 - 0.5).abs() < 1e-6);
    }
}
