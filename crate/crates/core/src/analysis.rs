//! Welfare impact of a decentralization and sweeps over SA strategies.

use std::fmt::Write as _;

use crate::cost_model::{Cost, Network};
use crate::decentralization::{
    classify_case, induced_outcome, split_profile, CaseClassification, DecentralizationStrategy,
    SAStrategy,
};
use crate::equilibrium::{EquilibriumOutcome, GameInstance, Origin};
use crate::error::{Error, Result};

/// Slack for the sign checks on deltas and monotone columns.
pub const MONOTONE_SLACK: f64 = 1e-9;
/// A delta above this counts as strictly positive.
pub const STRICT_THRESHOLD: f64 = 1e-8;
/// Change in `xi_1` above which deltas are expected to exceed
/// [`STRICT_THRESHOLD`]. Near a mode-4 boundary the deltas shrink like the
/// square of the change, so smaller moves only guarantee a positive sign.
pub const MOVED_THRESHOLD: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct ImpactReport {
    /// CE without decentralization.
    pub baseline: EquilibriumOutcome,
    /// CE under the evaluated strategy.
    pub treated: EquilibriumOutcome,
    pub delta_social: f64,
    /// `(user index, cost change)` for every other atomic player, in user
    /// order.
    pub delta_opponent_costs: Vec<(usize, f64)>,
    pub delta_decentralizer: f64,
    pub regime: CaseClassification,
}

/// Compares the CE under `strategy` with the CE of not decentralizing.
pub fn impact_report(
    game: &GameInstance,
    player: usize,
    strategy: &DecentralizationStrategy,
) -> Result<ImpactReport> {
    let (weight, _) = split_profile(game, player)?;
    let baseline = induced_outcome(game, player, &DecentralizationStrategy::trivial(weight))?;
    let treated = induced_outcome(game, player, strategy)?;
    let mut delta_opponent_costs: Vec<(usize, f64)> = treated
        .atomic
        .iter()
        .filter_map(|p| match p.origin {
            Origin::User(i) => {
                let before = baseline.user_player(i).map_or(0.0, |b| b.cost);
                Some((i, p.cost - before))
            }
            Origin::Deputy(_) => None,
        })
        .collect();
    delta_opponent_costs.sort_by_key(|(i, _)| *i);
    let deputy = |o: &EquilibriumOutcome| {
        let x = o.deputy_flow();
        x[0] * o.arc_costs[0] + x[1] * o.arc_costs[1]
    };
    Ok(ImpactReport {
        delta_social: treated.social_cost - baseline.social_cost,
        delta_decentralizer: deputy(&treated) - deputy(&baseline),
        delta_opponent_costs,
        regime: classify_case(game, player)?,
        baseline,
        treated,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub s: f64,
    /// Aggregate flow on canonical arc 1.
    pub xi1: f64,
    /// Deputies' flow on canonical arc 1, nonatomic share included.
    pub x1: f64,
    /// Everyone else's flow on canonical arc 1.
    pub y1: f64,
    pub decentralizer_cost: f64,
    pub social_cost: f64,
    /// Cost borne by the original nonatomic population.
    pub nonatomic_cost: f64,
    /// Costs of the other atomic players, in user order.
    pub opponent_costs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    /// User indices of the other atomic players, matching
    /// [`SweepRow::opponent_costs`].
    pub opponents: Vec<usize>,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// CSV with a header row. `arc1_label` names canonical arc 1 and
    /// `player_label` maps a user index to a column suffix.
    pub fn to_csv(&self, arc1_label: &str, player_label: impl Fn(usize) -> String) -> String {
        let mut out = format!("s,xi_{arc1_label},x_{arc1_label},y_{arc1_label},U,CS,u0");
        for &i in &self.opponents {
            let _ = write!(out, ",u_{}", player_label(i));
        }
        out.push('\n');
        for r in &self.rows {
            let fields = [
                r.s,
                r.xi1,
                r.x1,
                r.y1,
                r.decentralizer_cost,
                r.social_cost,
                r.nonatomic_cost,
            ];
            let line: Vec<String> = fields
                .iter()
                .chain(&r.opponent_costs)
                .map(|v| crate::io::fmt_num(*v))
                .collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

fn sweep_row(outcome: &EquilibriumOutcome, s: f64, original_nonatomic: f64) -> SweepRow {
    let x = outcome.deputy_flow();
    let mut opponents: Vec<(usize, f64)> = outcome
        .atomic
        .iter()
        .filter_map(|p| match p.origin {
            Origin::User(i) => Some((i, p.cost)),
            Origin::Deputy(_) => None,
        })
        .collect();
    opponents.sort_by_key(|(i, _)| *i);
    let nonatomic_cost = if outcome.nonatomic_mass > 0.0 {
        outcome.nonatomic_cost * original_nonatomic / outcome.nonatomic_mass
    } else {
        0.0
    };
    SweepRow {
        s,
        xi1: outcome.xi[0],
        x1: x[0],
        y1: outcome.xi[0] - x[0],
        decentralizer_cost: x[0] * outcome.arc_costs[0] + x[1] * outcome.arc_costs[1],
        social_cost: outcome.social_cost,
        nonatomic_cost,
        opponent_costs: opponents.into_iter().map(|(_, c)| c).collect(),
    }
}

/// Solves the induced CE at `grid_size` evenly spaced SA strategies in
/// `[0, T^N]`.
pub fn sweep(game: &GameInstance, player: usize, grid_size: usize) -> Result<SweepTable> {
    let points: Vec<f64> = {
        let (weight, _) = split_profile(game, player)?;
        if grid_size < 2 {
            return Err(Error::Strategy(format!(
                "sweep needs at least two grid points, got {grid_size}"
            )));
        }
        (0..grid_size)
            .map(|i| {
                if i == grid_size - 1 {
                    weight
                } else {
                    weight * i as f64 / (grid_size - 1) as f64
                }
            })
            .collect()
    };
    sweep_at(game, player, &points)
}

/// Like [`sweep`] on explicit, strictly increasing SA strategies.
pub fn sweep_at(game: &GameInstance, player: usize, points: &[f64]) -> Result<SweepTable> {
    let (weight, _) = split_profile(game, player)?;
    if points.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Strategy(
            "sweep grid must be strictly increasing".into(),
        ));
    }
    let t0 = game.profile().nonatomic();
    let mut rows = Vec::with_capacity(points.len());
    let mut opponents = Vec::new();
    for &s in points {
        if !(0.0..=weight).contains(&s) {
            return Err(Error::Strategy(format!(
                "SA strategy {s} outside [0, {weight}]"
            )));
        }
        let outcome = induced_outcome(
            game,
            player,
            &DecentralizationStrategy::from_sa(SAStrategy { s }, weight),
        )?;
        if opponents.is_empty() {
            opponents = outcome
                .atomic
                .iter()
                .filter_map(|p| match p.origin {
                    Origin::User(i) => Some(i),
                    Origin::Deputy(_) => None,
                })
                .collect();
            opponents.sort_unstable();
        }
        rows.push(sweep_row(&outcome, s, t0));
    }
    Ok(SweepTable { opponents, rows })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyCheck {
    pub name: String,
    pub passed: bool,
    /// Index of the first row breaking the property.
    pub first_violation: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport {
    pub checks: Vec<PropertyCheck>,
}

impl MonotonicityReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn check(name: &str, first_violation: Option<usize>) -> PropertyCheck {
    PropertyCheck {
        name: name.to_string(),
        passed: first_violation.is_none(),
        first_violation,
    }
}

/// Checks that `xi_1` and `x_1` do not increase and `y_1` does not decrease
/// along the table, and that no row beats the last one (taken as the
/// trivial strategy) in social or opponent cost.
pub fn verify_monotonicity(table: &SweepTable, slack: f64) -> MonotonicityReport {
    let rows = &table.rows;
    let pairwise = |f: &dyn Fn(&SweepRow, &SweepRow) -> bool| {
        rows.windows(2)
            .position(|w| !f(&w[0], &w[1]))
            .map(|i| i + 1)
    };
    let mut checks = vec![
        check(
            "xi1_non_increasing",
            pairwise(&|a, b| b.xi1 <= a.xi1 + slack),
        ),
        check("x1_non_increasing", pairwise(&|a, b| b.x1 <= a.x1 + slack)),
        check("y1_non_decreasing", pairwise(&|a, b| b.y1 >= a.y1 - slack)),
    ];
    if let Some(last) = rows.last() {
        checks.push(check(
            "social_cost_not_below_trivial",
            rows.iter()
                .position(|r| r.social_cost < last.social_cost - slack),
        ));
        checks.push(check(
            "opponent_costs_not_below_trivial",
            rows.iter().position(|r| {
                r.opponent_costs
                    .iter()
                    .zip(&last.opponent_costs)
                    .any(|(u, base)| *u < base - slack)
            }),
        ));
    }
    MonotonicityReport { checks }
}

/// Decentralizer cost as a function of `xi_1` in the trivial regime:
/// `v(xi) = (T^N - M + xi) c_1(xi) + (M - xi) c_2(M - xi)`.
pub fn trivial_value<C: Cost>(net: &Network<C>, weight: f64, xi: f64) -> f64 {
    let m = net.mass;
    (weight - m + xi) * net.arc1.value(xi) + (m - xi) * net.arc2.value(m - xi)
}

/// `v'(xi) = c_1'(xi) (T^N - F_1(xi))`.
pub fn trivial_derivative<C: Cost>(net: &Network<C>, weight: f64, xi: f64) -> f64 {
    net.arc1.slope(xi) * (weight - net.f(1, xi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost_model::ArcCost;
    use crate::decentralization::Regime;
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

    fn g3() -> GameInstance {
        game(
            ArcCost::affine(1.0, 1.0, 2.0),
            ArcCost::affine(5.0, 1.0, 2.0),
            &[0.5, 0.5],
        )
    }

    #[test]
    fn intro_impact() {
        let alpha = DecentralizationStrategy::new(0.0, vec![0.25, 0.25]).unwrap();
        let r = impact_report(&g1(), 1, &alpha).unwrap();
        // 8.7102 - 8.4545 and 4.5852 - 4.2273
        assert!((r.delta_social - 0.2557).abs() < 1e-4);
        assert_eq!(r.delta_opponent_costs.len(), 1);
        assert!((r.delta_opponent_costs[0].1 - 0.3580).abs() < 1e-4);
        assert_eq!(r.regime.regime, Regime::Nontrivial);
    }

    #[test]
    fn nonatomic_regime_impact_is_zero() {
        let alpha = DecentralizationStrategy::new(0.2, vec![0.2, 0.1]).unwrap();
        let r = impact_report(&g3(), 0, &alpha).unwrap();
        assert!(r.delta_social.abs() < 1e-12);
        assert!(r.delta_opponent_costs.iter().all(|(_, d)| d.abs() < 1e-12));
    }

    #[test]
    fn trivial_strategy_impact_is_zero() {
        let r = impact_report(&g1(), 0, &DecentralizationStrategy::trivial(0.5)).unwrap();
        assert_eq!(r.delta_social, 0.0);
        assert_eq!(r.delta_opponent_costs[0].1, 0.0);
    }

    #[test]
    fn intro_sweep_columns() {
        let t = sweep_at(&g1(), 1, &[0.0, 0.275, 0.5]).unwrap();
        let u: Vec<f64> = t.rows.iter().map(|r| r.decentralizer_cost).collect();
        assert!((u[0] - 91.0 / 22.0).abs() < 1e-9);
        assert!((u[1] - 4.125).abs() < 1e-9);
        assert!((u[2] - 1023.0 / 242.0).abs() < 1e-9);
        let xi: Vec<f64> = t.rows.iter().map(|r| r.xi1).collect();
        for (got, want) in xi.iter().zip([8.0 / 11.0, 31.0 / 44.0, 7.0 / 11.0]) {
            assert!((got - want).abs() < 1e-9);
        }
        assert!(verify_monotonicity(&t, MONOTONE_SLACK).all_passed());
    }

    #[test]
    fn nonatomic_sweep_is_constant() {
        let t = sweep(&g3(), 0, 9).unwrap();
        let first = &t.rows[0];
        for r in &t.rows {
            assert!((r.decentralizer_cost - first.decentralizer_cost).abs() < 1e-12);
            assert!((r.xi1 - first.xi1).abs() < 1e-12);
        }
    }

    #[test]
    fn corrupted_table_fails_with_row() {
        let mut t = sweep(&g1(), 1, 11).unwrap();
        let (a, b) = (t.rows[7].xi1, t.rows[8].xi1);
        t.rows[7].xi1 = b;
        t.rows[8].xi1 = a;
        let report = verify_monotonicity(&t, MONOTONE_SLACK);
        let xi = &report.checks[0];
        assert!(!xi.passed);
        assert_eq!(xi.first_violation, Some(8));
    }

    #[test]
    fn single_row_passes_vacuously() {
        let t = sweep_at(&g1(), 1, &[0.3]).unwrap();
        assert!(verify_monotonicity(&t, MONOTONE_SLACK).all_passed());
    }

    #[test]
    fn csv_header_uses_labels() {
        let t = sweep(&g1(), 1, 2).unwrap();
        let csv = t.to_csv("b", |i| format!("p{}", i + 1));
        assert!(csv.starts_with("s,xi_b,x_b,y_b,U,CS,u0,u_p1\n"));
        assert_eq!(csv.lines().count(), 3);
    }

    #[test]
    fn trivial_gradient_on_g2() {
        let g2 = game(
            ArcCost::affine(0.0, 1.0, 1.0),
            ArcCost::affine(0.5, 1.0, 1.0),
            &[0.4],
        );
        let net = g2.network();
        let h = 1e-6;
        for xi in [0.33, 0.35, 0.38] {
            let fd = (trivial_value(&**net, 0.4, xi + h) - trivial_value(&**net, 0.4, xi - h))
                / (2.0 * h);
            let exact = trivial_derivative(&**net, 0.4, xi);
            assert!((fd - exact).abs() <= 1e-5 * exact.abs().max(1e-12));
        }
    }
}
