//! Player profiles, the composite equilibrium and its mode.

use serde::{Deserialize, Serialize};

use crate::cost_model::{ArcCost, CanonicalNetwork, Cost, Network};
use crate::error::{Error, Result};
use crate::numeric::{bisect_decreasing, BISECTION_TOL};

/// Flows below this count as zero when classifying a CE.
pub const FLOW_ZERO_TOL: f64 = 1e-10;
/// Cost gaps below this count as equality when classifying a CE.
pub const COST_EQ_TOL: f64 = 1e-10;
/// A cost ordering violated by more than this is a classification error.
const COST_ORDER_TOL: f64 = 1e-7;

/// Where an atomic player of a (possibly induced) profile comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Origin {
    /// The caller's atomic player with this 0-based index.
    User(usize),
    /// A deputy of the decentralizing player.
    Deputy(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomicPlayer {
    pub weight: f64,
    pub origin: Origin,
}

/// Nonatomic mass plus atomic players sorted by non-increasing weight.
#[derive(Debug, Clone, PartialEq)]
pub struct PlayerProfile {
    nonatomic: f64,
    deputy_nonatomic: f64,
    atomic: Vec<AtomicPlayer>,
}

impl PlayerProfile {
    /// Profile of a plain game; atomic weights are given in user order.
    pub fn new(nonatomic: f64, atomic_weights: &[f64]) -> Result<Self> {
        let atomic = atomic_weights
            .iter()
            .enumerate()
            .map(|(i, &weight)| AtomicPlayer {
                weight,
                origin: Origin::User(i),
            })
            .collect();
        Self::from_parts(nonatomic, 0.0, atomic)
    }

    /// Builds a profile from tagged players. `deputy_nonatomic` is the part of
    /// `nonatomic` that belongs to a decentralizing player. An empty profile
    /// is allowed here; games reject it through the network mass check.
    pub fn from_parts(
        nonatomic: f64,
        deputy_nonatomic: f64,
        mut atomic: Vec<AtomicPlayer>,
    ) -> Result<Self> {
        if !nonatomic.is_finite() || nonatomic < 0.0 {
            return Err(Error::Profile(format!(
                "nonatomic mass must be non-negative, got {nonatomic}"
            )));
        }
        if !(0.0..=nonatomic).contains(&deputy_nonatomic) {
            return Err(Error::Profile(format!(
                "deputy nonatomic share {deputy_nonatomic} outside [0, {nonatomic}]"
            )));
        }
        for p in &atomic {
            if !p.weight.is_finite() || p.weight <= 0.0 {
                return Err(Error::Profile(format!(
                    "atomic weights must be strictly positive, got {}",
                    p.weight
                )));
            }
        }
        atomic.sort_by(|a, b| b.weight.total_cmp(&a.weight));
        Ok(PlayerProfile {
            nonatomic,
            deputy_nonatomic,
            atomic,
        })
    }

    pub fn nonatomic(&self) -> f64 {
        self.nonatomic
    }

    pub fn deputy_nonatomic(&self) -> f64 {
        self.deputy_nonatomic
    }

    /// Atomic players, heaviest first.
    pub fn atomic(&self) -> &[AtomicPlayer] {
        &self.atomic
    }

    pub fn weights(&self) -> Vec<f64> {
        self.atomic.iter().map(|p| p.weight).collect()
    }

    pub fn mass(&self) -> f64 {
        self.nonatomic + self.atomic.iter().map(|p| p.weight).sum::<f64>()
    }

    /// Number of players tagged [`Origin::User`].
    pub fn user_count(&self) -> usize {
        self.atomic
            .iter()
            .filter(|p| matches!(p.origin, Origin::User(_)))
            .count()
    }

    /// Sorted position of the caller's atomic player `user`.
    pub fn position_of(&self, user: usize) -> Option<usize> {
        self.atomic
            .iter()
            .position(|p| p.origin == Origin::User(user))
    }

    pub fn has_deputies(&self) -> bool {
        self.deputy_nonatomic > 0.0
            || self
                .atomic
                .iter()
                .any(|p| matches!(p.origin, Origin::Deputy(_)))
    }
}

/// A canonical network together with the profile routed on it.
#[derive(Debug, Clone)]
pub struct GameInstance {
    network: CanonicalNetwork,
    profile: PlayerProfile,
}

impl GameInstance {
    /// Pairs a network with a profile of the same total mass.
    pub fn new(network: CanonicalNetwork, profile: PlayerProfile) -> Result<Self> {
        let (m, p) = (network.mass, profile.mass());
        if (m - p).abs() > 1e-12 * m.max(1.0) {
            return Err(Error::Profile(format!(
                "profile mass {p} differs from network mass {m}"
            )));
        }
        Ok(GameInstance { network, profile })
    }

    /// Validates and canonicalizes the arcs for the profile's total mass.
    pub fn from_arcs(arc_a: ArcCost, arc_b: ArcCost, profile: PlayerProfile) -> Result<Self> {
        let network = CanonicalNetwork::new(arc_a, arc_b, profile.mass())?;
        Ok(GameInstance { network, profile })
    }

    pub fn network(&self) -> &CanonicalNetwork {
        &self.network
    }

    pub fn profile(&self) -> &PlayerProfile {
        &self.profile
    }

    /// Same network with a different profile of equal mass.
    pub fn with_profile(&self, profile: PlayerProfile) -> Result<Self> {
        GameInstance::new(self.network.clone(), profile)
    }
}

/// Qualitative shape of a CE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode")]
pub enum Mode {
    /// Everything on arc 1, which is strictly cheaper.
    Mode1,
    /// `k >= 1` atomic deputies and `l` opponents use both arcs.
    Mode2 { k: usize, l: usize },
    /// No deputy splits, `l >= 1` opponents do.
    Mode3 { l: usize },
    /// Both arcs cost the same.
    Mode4,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomicOutcome {
    pub weight: f64,
    pub origin: Origin,
    /// Flow on (arc 1, arc 2) in canonical order.
    pub flow: [f64; 2],
    pub cost: f64,
}

/// A composite equilibrium with all flows in canonical arc order.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumOutcome {
    /// Atomic players in profile order (heaviest first).
    pub atomic: Vec<AtomicOutcome>,
    pub nonatomic_mass: f64,
    pub deputy_nonatomic: f64,
    pub nonatomic_flow: [f64; 2],
    pub xi: [f64; 2],
    pub arc_costs: [f64; 2],
    /// Total cost borne by the nonatomic population.
    pub nonatomic_cost: f64,
    pub social_cost: f64,
    pub mode: Mode,
}

impl EquilibriumOutcome {
    /// Outcome of the caller's atomic player `user`, if present.
    pub fn user_player(&self, user: usize) -> Option<&AtomicOutcome> {
        self.atomic.iter().find(|p| p.origin == Origin::User(user))
    }

    /// Aggregate flow of the decentralizer's deputies, nonatomic share
    /// included.
    pub fn deputy_flow(&self) -> [f64; 2] {
        let mut x = [0.0; 2];
        for p in &self.atomic {
            if let Origin::Deputy(_) = p.origin {
                x[0] += p.flow[0];
                x[1] += p.flow[1];
            }
        }
        if self.deputy_nonatomic > 0.0 {
            let share = self.deputy_nonatomic / self.nonatomic_mass;
            x[0] += share * self.nonatomic_flow[0];
            x[1] += share * self.nonatomic_flow[1];
        }
        x
    }
}

/// `u^i = x_1 c_1(xi_1) + x_2 c_2(xi_2)` for the player at profile position `i`.
pub fn player_cost(outcome: &EquilibriumOutcome, i: usize) -> f64 {
    let f = outcome.atomic[i].flow;
    f[0] * outcome.arc_costs[0] + f[1] * outcome.arc_costs[1]
}

/// `CS = xi_1 c_1(xi_1) + xi_2 c_2(xi_2)`.
pub fn social_cost(outcome: &EquilibriumOutcome) -> f64 {
    outcome.xi[0] * outcome.arc_costs[0] + outcome.xi[1] * outcome.arc_costs[1]
}

/// Arc-1 flows of a CE in an arbitrary orientation.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct RawFlows {
    pub atomic_arc1: Vec<f64>,
    pub nonatomic_arc1: f64,
}

fn atomic_response<C: Cost>(net: &Network<C>, weight: f64, xi: f64) -> f64 {
    let a = net.a(xi);
    ((weight * a + net.h(xi)) / (1.0 + a)).clamp(0.0, weight)
}

/// Reference CE computation by bisection on the aggregate arc-1 flow.
///
/// Works for either arc orientation, so it also serves follower games with
/// pre-loaded costs.
pub(crate) fn bisection_flows<C: Cost>(
    net: &Network<C>,
    nonatomic: f64,
    weights: &[f64],
) -> RawFlows {
    let m = net.mass;
    if m <= 0.0 {
        return RawFlows {
            atomic_arc1: vec![0.0; weights.len()],
            nonatomic_arc1: 0.0,
        };
    }
    let atomic_sum =
        |xi: f64| -> f64 { weights.iter().map(|&w| atomic_response(net, w, xi)).sum() };
    let crossing = if nonatomic > 0.0 {
        net.crossing()
    } else {
        None
    };

    let xi = match crossing {
        Some(xh) if (atomic_sum(xh)..=atomic_sum(xh) + nonatomic).contains(&xh) => xh,
        _ => {
            let excess = |xi: f64| {
                let r0 = if net.cost_gap(xi) < 0.0 {
                    nonatomic
                } else {
                    0.0
                };
                atomic_sum(xi) + r0 - xi
            };
            bisect_decreasing(excess, 0.0, m, BISECTION_TOL)
        }
    };

    let atomic_arc1: Vec<f64> = weights
        .iter()
        .map(|&w| atomic_response(net, w, xi))
        .collect();
    let placed: f64 = atomic_arc1.iter().sum();
    let nonatomic_arc1 = match crossing {
        Some(xh) if (xi - xh).abs() <= 1e-9 * m.max(1.0) => (xi - placed).clamp(0.0, nonatomic),
        _ if nonatomic > 0.0 && net.cost_gap(xi) < 0.0 => nonatomic,
        _ => 0.0,
    };
    RawFlows {
        atomic_arc1,
        nonatomic_arc1,
    }
}

/// Assembles an outcome from arc-1 flows on the canonical network.
pub(crate) fn assemble(
    net: &Network<ArcCost>,
    profile: &PlayerProfile,
    raw: &RawFlows,
) -> Result<EquilibriumOutcome> {
    let outcome = assemble_unclassified(net, profile, raw);
    let mode = classify_mode(&outcome)?;
    Ok(EquilibriumOutcome { mode, ..outcome })
}

pub(crate) fn assemble_unclassified<C: Cost>(
    net: &Network<C>,
    profile: &PlayerProfile,
    raw: &RawFlows,
) -> EquilibriumOutcome {
    let t0 = profile.nonatomic();
    let nonatomic_flow = [raw.nonatomic_arc1, t0 - raw.nonatomic_arc1];
    let mut xi = nonatomic_flow;
    let mut flows = Vec::with_capacity(raw.atomic_arc1.len());
    for (p, &x1) in profile.atomic().iter().zip(&raw.atomic_arc1) {
        let flow = [x1, p.weight - x1];
        xi[0] += flow[0];
        xi[1] += flow[1];
        flows.push(flow);
    }
    let arc_costs = [net.arc1.value(xi[0]), net.arc2.value(xi[1])];
    let atomic = profile
        .atomic()
        .iter()
        .zip(flows)
        .map(|(p, flow)| AtomicOutcome {
            weight: p.weight,
            origin: p.origin,
            flow,
            cost: flow[0] * arc_costs[0] + flow[1] * arc_costs[1],
        })
        .collect();
    EquilibriumOutcome {
        atomic,
        nonatomic_mass: t0,
        deputy_nonatomic: profile.deputy_nonatomic(),
        nonatomic_flow,
        xi,
        arc_costs,
        nonatomic_cost: nonatomic_flow[0] * arc_costs[0] + nonatomic_flow[1] * arc_costs[1],
        social_cost: xi[0] * arc_costs[0] + xi[1] * arc_costs[1],
        mode: Mode::Mode1,
    }
}

/// The unique CE, computed by bisection on the aggregate flow.
pub fn solve_ce_bisection(game: &GameInstance) -> Result<EquilibriumOutcome> {
    let profile = game.profile();
    let raw = bisection_flows(game.network(), profile.nonatomic(), &profile.weights());
    assemble(game.network(), profile, &raw)
}

/// The unique CE, computed by enumerating the closed-form modes and keeping
/// the one whose validity conditions hold.
pub fn solve_ce_modal(game: &GameInstance) -> Result<EquilibriumOutcome> {
    let net = game.network();
    let profile = game.profile();
    let m = net.mass;
    let t0 = profile.nonatomic();
    let w = profile.weights();
    let n = w.len();
    let big_h = net.big_h();

    // (violation, raw flows)
    let mut best: Option<(f64, RawFlows)> = None;
    let mut consider = |violation: f64, raw: RawFlows| {
        if best.as_ref().map_or(true, |(v, _)| violation < *v) {
            best = Some((violation, raw));
        }
    };

    // Mode 1: all on arc 1, the heaviest player does not want to split.
    let heaviest = w.first().copied().unwrap_or(0.0);
    consider(
        (heaviest - big_h).max(-big_h).max(0.0),
        RawFlows {
            atomic_arc1: w.clone(),
            nonatomic_arc1: t0,
        },
    );

    // Mode 2/3: the m heaviest players split, everyone else stays on arc 1.
    let mut top = 0.0;
    for k in 1..=n {
        top += w[k - 1];
        let xi = net.inverse_f(k, top)?;
        let h = net.h(xi);
        let next = w.get(k).copied().unwrap_or(0.0);
        let violation = [h - w[k - 1], next - h, -h, -xi, xi - m]
            .into_iter()
            .fold(0.0_f64, f64::max);
        let a = net.a(xi);
        let atomic_arc1 = w
            .iter()
            .enumerate()
            .map(|(j, &wj)| if j < k { (wj * a + h) / (1.0 + a) } else { wj })
            .collect();
        consider(
            violation,
            RawFlows {
                atomic_arc1,
                nonatomic_arc1: t0,
            },
        );
    }

    // Mode 4: both arcs cost the same at the crossing.
    if let Some(xh) = net.xi_hat() {
        let big_a = net.a(xh);
        let atomic_arc1: Vec<f64> = w.iter().map(|&wj| big_a * wj / (1.0 + big_a)).collect();
        let r = xh - atomic_arc1.iter().sum::<f64>();
        consider(
            (-r).max(r - t0).max(0.0),
            RawFlows {
                atomic_arc1,
                nonatomic_arc1: r.clamp(0.0, t0),
            },
        );
    }

    let (violation, raw) = best.expect("mode 1 is always a candidate");
    if violation > 1e-9 * m.max(1.0) {
        return Err(Error::Consistency(format!(
            "no equilibrium mode validates (smallest violation {violation:e})"
        )));
    }
    assemble(net, profile, &raw)
}

/// Reads the mode off the sign pattern of a feasible outcome.
///
/// Players tagged [`Origin::Deputy`] count towards `k`, the others towards
/// `l`; in a game without deputies every atomic player counts towards `k`.
pub fn classify_mode(outcome: &EquilibriumOutcome) -> Result<Mode> {
    let [c1, c2] = outcome.arc_costs;
    let scale = c1.abs().max(c2.abs()).max(1.0);
    if c1 - c2 > COST_ORDER_TOL * scale {
        return Err(Error::Classification(format!(
            "arc 1 costs {c1} > arc 2 cost {c2}"
        )));
    }
    if (c1 - c2).abs() <= COST_EQ_TOL * scale || c1 > c2 {
        return Ok(Mode::Mode4);
    }
    if outcome.nonatomic_flow[1] > FLOW_ZERO_TOL {
        return Err(Error::Classification(
            "nonatomic flow on the strictly costlier arc 2".into(),
        ));
    }
    let plain = !outcome
        .atomic
        .iter()
        .any(|p| matches!(p.origin, Origin::Deputy(_)));
    let (mut k, mut l) = (0, 0);
    for p in &outcome.atomic {
        if p.flow[0] <= FLOW_ZERO_TOL && p.flow[1] > FLOW_ZERO_TOL {
            return Err(Error::Classification(
                "atomic player entirely on the strictly costlier arc 2".into(),
            ));
        }
        if p.flow[0] > FLOW_ZERO_TOL && p.flow[1] > FLOW_ZERO_TOL {
            match p.origin {
                Origin::Deputy(_) => k += 1,
                Origin::User(_) if plain => k += 1,
                Origin::User(_) => l += 1,
            }
        }
    }
    Ok(if k >= 1 {
        Mode::Mode2 { k, l }
    } else if l >= 1 {
        Mode::Mode3 { l }
    } else {
        Mode::Mode1
    })
}

/// Largest violations of the CE conditions at an outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    /// Clamped first-order condition of the atomic players.
    pub atomic: f64,
    /// Nonatomic mass times the cost excess of the arc it uses.
    pub nonatomic: f64,
}

/// Measures how far `outcome` is from satisfying the CE conditions on `net`.
pub fn residuals<C: Cost>(net: &Network<C>, outcome: &EquilibriumOutcome) -> Residuals {
    let [x1, x2] = outcome.xi;
    let (c1, c2) = (net.arc1.value(x1), net.arc2.value(x2));
    let (d1, d2) = (net.arc1.slope(x1), net.arc2.slope(x2));
    let mut atomic = 0.0_f64;
    for p in &outcome.atomic {
        let g1 = c1 + p.flow[0] * d1;
        let g2 = c2 + p.flow[1] * d2;
        // Complementarity: equal marginal costs when interior, the used arc
        // is weakly cheaper at a corner.
        let r = if p.flow[0] > FLOW_ZERO_TOL && p.flow[1] > FLOW_ZERO_TOL {
            (g1 - g2).abs()
        } else if p.flow[1] <= FLOW_ZERO_TOL {
            (g1 - g2).max(0.0)
        } else {
            (g2 - g1).max(0.0)
        };
        atomic = atomic.max(r);
    }
    let nonatomic = (outcome.nonatomic_flow[0] * (c1 - c2).max(0.0))
        .max(outcome.nonatomic_flow[1] * (c2 - c1).max(0.0));
    Residuals { atomic, nonatomic }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g1(weights: &[f64]) -> GameInstance {
        GameInstance::from_arcs(
            ArcCost::affine(10.0, 1.0, 2.0),
            ArcCost::affine(1.0, 10.0, 2.0),
            PlayerProfile::new(0.0, weights).unwrap(),
        )
        .unwrap()
    }

    fn g1_decentralized() -> GameInstance {
        let atomic = vec![
            AtomicPlayer {
                weight: 0.5,
                origin: Origin::User(0),
            },
            AtomicPlayer {
                weight: 0.25,
                origin: Origin::Deputy(0),
            },
            AtomicPlayer {
                weight: 0.25,
                origin: Origin::Deputy(1),
            },
        ];
        g1(&[0.5, 0.5])
            .with_profile(PlayerProfile::from_parts(0.0, 0.0, atomic).unwrap())
            .unwrap()
    }

    fn g3() -> GameInstance {
        GameInstance::from_arcs(
            ArcCost::affine(1.0, 1.0, 2.0),
            ArcCost::affine(5.0, 1.0, 2.0),
            PlayerProfile::new(0.0, &[0.5, 0.5]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn intro_game_flows() {
        for ce in [
            solve_ce_bisection(&g1(&[0.5, 0.5])).unwrap(),
            solve_ce_modal(&g1(&[0.5, 0.5])).unwrap(),
        ] {
            assert!((ce.xi[0] - 7.0 / 11.0).abs() < 1e-9);
            for p in &ce.atomic {
                assert!((p.flow[0] - 7.0 / 22.0).abs() < 1e-9);
                assert!((p.flow[1] - 2.0 / 11.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn intro_game_baseline_costs() {
        // The paper rounds these to 4.14 and 8.28, which do not follow from
        // its own flows; the exact values are 1023/242 and 1023/121.
        let ce = solve_ce_bisection(&g1(&[0.5, 0.5])).unwrap();
        for i in 0..2 {
            assert!((player_cost(&ce, i) - 1023.0 / 242.0).abs() < 1e-9);
        }
        assert!((social_cost(&ce) - 1023.0 / 121.0).abs() < 1e-9);
        assert!((ce.social_cost - 8.4545).abs() < 1e-4);
    }

    #[test]
    fn intro_game_decentralized() {
        let game = g1_decentralized();
        for ce in [
            solve_ce_bisection(&game).unwrap(),
            solve_ce_modal(&game).unwrap(),
        ] {
            assert!((ce.xi[0] - 31.0 / 44.0).abs() < 1e-9);
            for p in &ce.atomic {
                match p.origin {
                    Origin::Deputy(_) => {
                        assert!((p.flow[0] - 10.0 / 44.0).abs() < 1e-9);
                        assert!((p.flow[1] - 1.0 / 44.0).abs() < 1e-9);
                        assert!((p.cost - 2.0625).abs() < 1e-9);
                    }
                    Origin::User(_) => {
                        assert!((p.flow[0] - 0.25).abs() < 1e-9);
                        assert!((p.cost - 4.5852).abs() < 1e-4);
                    }
                }
            }
            assert!((ce.social_cost - 8.7102).abs() < 1e-4);
            assert_eq!(ce.mode, Mode::Mode2 { k: 2, l: 1 });
        }
    }

    #[test]
    fn three_player_plain_game_all_split() {
        let ce = solve_ce_modal(&g1(&[0.5, 0.25, 0.25])).unwrap();
        assert!((ce.xi[0] - 31.0 / 44.0).abs() < 1e-9);
        assert_eq!(ce.mode, Mode::Mode2 { k: 3, l: 0 });
    }

    #[test]
    fn symmetric_single_player() {
        let game = GameInstance::from_arcs(
            ArcCost::affine(0.0, 1.0, 2.0),
            ArcCost::affine(0.0, 1.0, 2.0),
            PlayerProfile::new(0.0, &[1.0]).unwrap(),
        )
        .unwrap();
        let ce = solve_ce_bisection(&game).unwrap();
        assert!((ce.xi[0] - 0.5).abs() < 1e-12);
        assert_eq!(ce.mode, Mode::Mode4);
    }

    #[test]
    fn case_one_game_is_mode_one() {
        for ce in [
            solve_ce_bisection(&g3()).unwrap(),
            solve_ce_modal(&g3()).unwrap(),
        ] {
            assert_eq!(ce.xi, [1.0, 0.0]);
            assert_eq!(ce.mode, Mode::Mode1);
            assert!((ce.social_cost - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn all_nonatomic_equalizes_costs() {
        let game = g1(&[0.5, 0.5])
            .with_profile(PlayerProfile::new(1.0, &[]).unwrap())
            .unwrap();
        for ce in [
            solve_ce_bisection(&game).unwrap(),
            solve_ce_modal(&game).unwrap(),
        ] {
            assert!((ce.xi[0] - 10.0 / 11.0).abs() < 1e-9);
            assert_eq!(ce.mode, Mode::Mode4);
        }
    }

    #[test]
    fn intro_game_classification() {
        let ce = solve_ce_bisection(&g1(&[0.5, 0.5])).unwrap();
        assert_eq!(ce.mode, Mode::Mode2 { k: 2, l: 0 });
        let trivial = g1(&[0.5, 0.5])
            .with_profile(
                PlayerProfile::from_parts(
                    0.0,
                    0.0,
                    vec![
                        AtomicPlayer {
                            weight: 0.5,
                            origin: Origin::User(0),
                        },
                        AtomicPlayer {
                            weight: 0.5,
                            origin: Origin::Deputy(0),
                        },
                    ],
                )
                .unwrap(),
            )
            .unwrap();
        let ce = solve_ce_bisection(&trivial).unwrap();
        assert_eq!(ce.mode, Mode::Mode2 { k: 1, l: 1 });
    }

    #[test]
    fn residuals_vanish_at_equilibrium() {
        let game = g1_decentralized();
        let ce = solve_ce_bisection(&game).unwrap();
        let r = residuals(game.network(), &ce);
        assert!(r.atomic < 1e-9 && r.nonatomic < 1e-9);
    }

    #[test]
    fn single_arc_social_cost() {
        let ce = solve_ce_bisection(&g3()).unwrap();
        assert_eq!(
            ce.social_cost,
            1.0 * ArcCost::affine(1.0, 1.0, 2.0).value(1.0)
        );
    }

    #[test]
    fn zero_weight_is_rejected() {
        assert!(matches!(
            PlayerProfile::new(0.0, &[0.5, 0.0]),
            Err(Error::Profile(_))
        ));
        assert!(matches!(
            PlayerProfile::new(-1.0, &[0.5]),
            Err(Error::Profile(_))
        ));
    }

    #[test]
    fn profile_sorts_with_provenance() {
        let p = PlayerProfile::new(0.1, &[0.2, 0.7, 0.4]).unwrap();
        assert_eq!(p.weights(), vec![0.7, 0.4, 0.2]);
        assert_eq!(p.position_of(0), Some(2));
        assert_eq!(p.position_of(1), Some(0));
        assert!((p.mass() - 1.4).abs() < 1e-15);
    }
}
