//! Seeded generators and comparison helpers shared by the integration tests.

#![allow(dead_code)]

use eol_core::deformations::{BubbleAsymptotics, Gauge, OrbifoldPointData};
use eol_core::tensor::{self, Mat3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn general(rng: &mut impl Rng) -> Mat3 {
    std::array::from_fn(|_| std::array::from_fn(|_| rng.gen_range(-1.0..1.0)))
}

pub fn symmetric(rng: &mut impl Rng) -> Mat3 {
    let a = general(rng);
    tensor::mat3_scale(&tensor::mat3_add(&a, &tensor::mat3_transpose(&a)), 0.5)
}

pub fn traceless(rng: &mut impl Rng) -> Mat3 {
    tensor::mat3_traceless(&symmetric(rng))
}

pub fn diagonal_traceless(rng: &mut impl Rng) -> Mat3 {
    let mut m = traceless(rng);
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                m[i][j] = 0.0;
            }
        }
    }
    m
}

pub fn orbifold(rng: &mut impl Rng) -> OrbifoldPointData {
    OrbifoldPointData {
        lambda: rng.gen_range(-3.0..3.0),
        w_plus: traceless(rng),
        w_minus: traceless(rng),
    }
}

pub fn weyl_only(rng: &mut impl Rng) -> OrbifoldPointData {
    OrbifoldPointData {
        lambda: 0.0,
        ..orbifold(rng)
    }
}

pub fn cmc_bubble(rng: &mut impl Rng) -> BubbleAsymptotics {
    BubbleAsymptotics {
        h_plus: traceless(rng),
        h_minus: traceless(rng),
        gauge: Gauge::Cmc,
    }
}

/// A volume-gauge bubble with trace sum at most `-0.2`.
pub fn volume_bubble(rng: &mut impl Rng) -> BubbleAsymptotics {
    let mut h_plus = symmetric(rng);
    let h_minus = symmetric(rng);
    let s = tensor::mat3_trace(&h_plus) + tensor::mat3_trace(&h_minus);
    let shift = (s + rng.gen_range(0.2..1.5)) / 3.0;
    for i in 0..3 {
        h_plus[i][i] -= shift;
    }
    BubbleAsymptotics {
        h_plus,
        h_minus,
        gauge: Gauge::Volume,
    }
}

/// `|a − b| / max(|a|, |b|, 1)`.
pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    rel(a, b) <= tol
}
