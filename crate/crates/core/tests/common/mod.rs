#![allow(dead_code)]

use congestion_core::{
    ArcCost, DecentralizationStrategy, GameInstance, OracleConfig, PlayerProfile,
};
use proptest::prelude::*;
use rand::Rng;

/// Quadratic arc `c(t) = a + b t + q t^2` with `b > 0` and `q >= 0`.
#[derive(Debug, Clone, Copy)]
pub struct ArcParams {
    pub a: f64,
    pub b: f64,
    pub q: f64,
}

impl ArcParams {
    pub fn build(&self, bound: f64) -> ArcCost {
        ArcCost::polynomial(&[self.a, self.b, self.q], bound)
    }
}

#[derive(Debug, Clone)]
pub struct GameParams {
    pub arcs: [ArcParams; 2],
    pub nonatomic: f64,
    pub atomic: Vec<f64>,
}

impl GameParams {
    pub fn mass(&self) -> f64 {
        self.nonatomic + self.atomic.iter().sum::<f64>()
    }

    pub fn build(&self) -> GameInstance {
        let bound = 2.0 * self.mass() + 1.0;
        let profile = PlayerProfile::new(self.nonatomic, &self.atomic).expect("valid profile");
        GameInstance::from_arcs(
            self.arcs[0].build(bound),
            self.arcs[1].build(bound),
            profile,
        )
        .expect("valid game")
    }
}

pub fn random_arc<R: Rng>(rng: &mut R) -> ArcParams {
    ArcParams {
        a: rng.gen_range(0.0..3.0),
        b: rng.gen_range(0.2..4.0),
        q: if rng.gen_bool(0.5) {
            rng.gen_range(0.0..2.0)
        } else {
            0.0
        },
    }
}

/// A game with at least `min_atomic` atomic players.
pub fn random_game_params<R: Rng>(rng: &mut R, min_atomic: usize) -> GameParams {
    let n = rng.gen_range(min_atomic.max(1)..=5);
    GameParams {
        arcs: [random_arc(rng), random_arc(rng)],
        nonatomic: if rng.gen_bool(0.4) {
            0.0
        } else {
            rng.gen_range(0.05..2.0)
        },
        atomic: (0..n).map(|_| rng.gen_range(0.05..2.0)).collect(),
    }
}

pub fn random_game<R: Rng>(rng: &mut R) -> GameInstance {
    random_game_params(rng, 1).build()
}

/// A strategy of up to six atomic deputies and possibly a nonatomic share.
pub fn random_strategy<R: Rng>(rng: &mut R, weight: f64) -> DecentralizationStrategy {
    let n = rng.gen_range(1..=6);
    let mut parts: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let nonatomic_part = if rng.gen_bool(0.5) {
        rng.gen_range(0.0..1.0)
    } else {
        0.0
    };
    let total = parts.iter().sum::<f64>() + nonatomic_part;
    for p in &mut parts {
        *p *= weight / total;
    }
    DecentralizationStrategy::new(nonatomic_part * weight / total, parts).expect("valid strategy")
}

pub fn arb_arc() -> impl Strategy<Value = ArcParams> {
    (
        0.0..3.0f64,
        0.2..4.0f64,
        prop_oneof![Just(0.0), 0.0..2.0f64],
    )
        .prop_map(|(a, b, q)| ArcParams { a, b, q })
}

pub fn arb_game_params(min_atomic: usize) -> impl Strategy<Value = GameParams> {
    (
        arb_arc(),
        arb_arc(),
        prop_oneof![Just(0.0), 0.05..2.0f64],
        prop::collection::vec(0.05..2.0f64, min_atomic.max(1)..=5),
    )
        .prop_map(|(a, b, nonatomic, atomic)| GameParams {
            arcs: [a, b],
            nonatomic,
            atomic,
        })
}

pub fn arb_game() -> impl Strategy<Value = GameInstance> {
    arb_game_params(1).prop_map(|p| p.build())
}

/// Deputy parts as fractions, rescaled to a weight by [`strategy_from_parts`].
pub fn arb_parts() -> impl Strategy<Value = (f64, Vec<f64>)> {
    (
        prop_oneof![Just(0.0), 0.0..1.0f64],
        prop::collection::vec(0.05..1.0f64, 1..=6),
    )
}

pub fn strategy_from_parts(weight: f64, parts: &(f64, Vec<f64>)) -> DecentralizationStrategy {
    let total = parts.0 + parts.1.iter().sum::<f64>();
    let atomic = parts.1.iter().map(|p| p * weight / total).collect();
    DecentralizationStrategy::new(parts.0 * weight / total, atomic).expect("valid strategy")
}

/// Coarser oracle grids for the randomized suites.
pub fn suite_oracle() -> OracleConfig {
    OracleConfig {
        grid_resolution: 1e-3,
        leader_resolution: 1e-3,
        ..OracleConfig::default()
    }
}

pub fn intro_game() -> GameInstance {
    GameInstance::from_arcs(
        ArcCost::affine(10.0, 1.0, 2.0),
        ArcCost::affine(1.0, 10.0, 2.0),
        PlayerProfile::new(0.0, &[0.5, 0.5]).unwrap(),
    )
    .unwrap()
}

/// Arcs `t` and `t + 0.5` with one atomic player of weight 0.4.
pub fn trivial_game() -> GameInstance {
    GameInstance::from_arcs(
        ArcCost::affine(0.0, 1.0, 1.0),
        ArcCost::affine(0.5, 1.0, 1.0),
        PlayerProfile::new(0.0, &[0.4]).unwrap(),
    )
    .unwrap()
}

/// Arcs `t + 1` and `t + 5`, two atomic players of weight 0.5.
pub fn nonatomic_regime_game() -> GameInstance {
    GameInstance::from_arcs(
        ArcCost::affine(1.0, 1.0, 2.0),
        ArcCost::affine(5.0, 1.0, 2.0),
        PlayerProfile::new(0.0, &[0.5, 0.5]).unwrap(),
    )
    .unwrap()
}

/// Games with a single, fairly heavy atomic player, where the trivial regime
/// is common.
pub fn arb_single_player_params() -> impl Strategy<Value = GameParams> {
    (
        arb_arc(),
        arb_arc(),
        prop_oneof![Just(0.0), 0.05..1.0f64],
        0.5..3.0f64,
    )
        .prop_map(|(a, b, nonatomic, w)| GameParams {
            arcs: [a, b],
            nonatomic,
            atomic: vec![w],
        })
}
