#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, TAU};

use quantum_equilibria::quantum_model::{AngularParams, PayCoefficients, StrategyAngles};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_coefficients(rng: &mut impl Rng) -> PayCoefficients {
    PayCoefficients::new([
        rng.gen_range(0.0..5.0),
        rng.gen_range(0.0..5.0),
        rng.gen_range(0.0..5.0),
        rng.gen_range(0.0..5.0),
    ])
    .unwrap()
}

pub fn random_angles(rng: &mut impl Rng) -> AngularParams {
    AngularParams::new(rng.gen_range(0.05..FRAC_PI_2 - 0.05), rng.gen_range(0.05..FRAC_PI_2 - 0.05)).unwrap()
}

pub fn random_strategies(rng: &mut impl Rng) -> StrategyAngles {
    StrategyAngles::new(rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU))
}
