mod common;

use common::{arb_arc, arb_game_params};
use congestion_core::{ArcCost, CanonicalNetwork};
use proptest::prelude::*;

proptest! {
    #[test]
    fn inverses_round_trip(p in arb_game_params(1), u in 0.0..1.0f64, n in 0usize..6) {
        let game = p.build();
        let net = game.network();
        let t = u * net.mass;
        let back_h = net.inverse_h(net.h(t)).unwrap();
        prop_assert!((back_h - t).abs() < 1e-9, "h: {t} -> {back_h}");
        let back_f = net.inverse_f(n, net.f(n, t)).unwrap();
        prop_assert!((back_f - t).abs() < 1e-9, "F_{n}: {t} -> {back_f}");
    }

    #[test]
    fn auxiliaries_strictly_decrease(
        p in arb_game_params(1),
        u in 0.0..1.0f64,
        v in 0.0..1.0f64,
        n in 0usize..6,
    ) {
        prop_assume!((u - v).abs() > 1e-6);
        let game = p.build();
        let net = game.network();
        let (t, t2) = (u.min(v) * net.mass, u.max(v) * net.mass);
        prop_assert!(net.h(t) > net.h(t2));
        prop_assert!(net.f(n, t) > net.f(n, t2));
    }

    #[test]
    fn marginal_matches_finite_difference(arc in arb_arc(), u in 0.01..0.99f64) {
        let c = arc.build(4.0);
        let t = 4.0 * u;
        let step = 1e-5;
        let fd = (c.eval(t + step).unwrap() - c.eval(t - step).unwrap()) / (2.0 * step);
        let exact = c.marginal(t).unwrap();
        prop_assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1.0));
    }

    #[test]
    fn canonicalization_is_idempotent(p in arb_game_params(1)) {
        let game = p.build();
        let net = game.network();
        let again = CanonicalNetwork::new(net.arc1.clone(), net.arc2.clone(), net.mass).unwrap();
        prop_assert!(!again.swapped());
        prop_assert_eq!(again.case(), net.case());
        prop_assert_eq!(again.network(), net.network());
    }

    #[test]
    fn user_order_round_trips(p in arb_game_params(1), x in 0.0..5.0f64, y in 0.0..5.0f64) {
        let game = p.build();
        let net = game.network();
        prop_assert_eq!(net.from_user(net.to_user([x, y])), [x, y]);
    }
}

#[test]
fn tabulated_marginal_matches_finite_difference() {
    let marginals: Vec<f64> = (0..=64).map(|i| 0.5 + (i as f64 / 16.0).powi(2)).collect();
    let c = ArcCost::tabulated(1.0, &marginals, 4.0);
    c.validate().unwrap();
    for i in 1..40 {
        let t = 0.1 * i as f64 + 0.013;
        let fd = (c.eval(t + 1e-6).unwrap() - c.eval(t - 1e-6).unwrap()) / 2e-6;
        let exact = c.marginal(t).unwrap();
        assert!((fd - exact).abs() <= 1e-6 * exact.max(1.0), "t = {t}");
    }
}
