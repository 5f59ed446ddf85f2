mod common;

use common::{arb_game_params, intro_game, suite_oracle};
use congestion_core::decentralization::{optimal_strategy_with, sa_cost};
use congestion_core::stackelberg::{leader_cost, solve_spne_with};
use congestion_core::{solve_spne, LeaderFlow};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn leading_is_worth_the_optimal_decentralization(p in arb_game_params(1), u in 0.0..1.0f64) {
        let game = p.build();
        let leader = ((u * p.atomic.len() as f64) as usize).min(p.atomic.len() - 1);
        let weight = p.atomic[leader];
        let cfg = suite_oracle();
        let spne = solve_spne_with(&game, leader, &cfg).unwrap();
        let opt = optimal_strategy_with(&game, leader, &cfg).unwrap();
        prop_assert!((spne.leader_cost - opt.cost).abs() < 1e-6);
        prop_assert!((spne.oracle_cost - spne.leader_cost).abs() < 1e-6);
        prop_assert!(spne.leader_cost <= sa_cost(&game, leader, weight).unwrap() + 1e-9);
        let x = spne.leader_flow;
        prop_assert!((x.x1 + x.x2 - weight).abs() < 1e-9);
        let again = leader_cost(&game, leader, x).unwrap();
        prop_assert!((again - spne.leader_cost).abs() < 1e-9);
    }
}

#[test]
fn intro_spne_matches_the_decentralized_cost() {
    let game = intro_game();
    let spne = solve_spne(&game, 0).unwrap();
    assert!((spne.leader_cost - 4.125).abs() < 1e-9);
    // Canonical order: 10/22 on the 10t + 1 arc, 1/22 on the t + 10 arc.
    let exact = LeaderFlow::new(10.0 / 22.0, 1.0 / 22.0, 0.5).unwrap();
    let u = leader_cost(&game, 0, exact).unwrap();
    assert!((u - 4.125).abs() < 1e-9, "{u}");
}
