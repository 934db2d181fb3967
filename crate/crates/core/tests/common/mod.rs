//! Shared corpus for the integration and acceptance tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use ewlab::algebra::Quaternion;
use ewlab::elflow::{el_jet, integrate_el, ELParams, HopfJet, Trajectory};
use ewlab::killing::{integrate_flow, GenusConstants};
use ewlab::seifert::{hopf_differential_from_curve, CurveSampleS3, SeifertType};
use ewlab::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn st(m: u32, n: u32) -> SeifertType {
    SeifertType::new(m, n).unwrap()
}

pub fn constant(q: C64, length: f64, step: f64) -> Trajectory {
    let z = C64::default();
    Trajectory::from_fn(|_| [q, z, z, z, z], length, step)
}

/// Hopf-type genus-2 solution `q = κ/4 + i/2` with nonconstant κ.
pub fn hopf_flow(length: f64, step: f64) -> Trajectory {
    let init = HopfJet {
        q: C64::new(0.3, 0.5),
        dq: C64::new(0.2, 0.0),
        d2q: C64::new(0.1, 0.0),
        ..Default::default()
    };
    integrate_flow(2, &GenusConstants::new(0.1, 0.0, 0.0), &init, length, step).unwrap()
}

pub const ELASTIC: ELParams = ELParams { lambda: C64::new(0.0, 0.0), c: 0.25 };

/// Real nonconstant EL solution.
pub fn real_elastic(length: f64, step: f64) -> Trajectory {
    let init = el_jet(0.0, C64::new(0.5, 0.0), C64::default(), 0.0, &ELASTIC);
    integrate_el(&init, &ELASTIC, length, step).unwrap()
}

/// Bounded random EL jets with real λ, reproducible from `seed`.
pub fn random_el_jets(seed: u64, count: usize) -> Vec<(HopfJet, ELParams)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut u = |a: f64, b: f64| rng.random_range(a..b);
            let params = ELParams::new(C64::new(u(-2.0, 2.0), 0.0), u(-0.5, 0.5));
            let q = C64::new(u(-0.6, 0.6), u(-0.6, 0.6));
            let dq = C64::new(u(-0.5, 0.5), u(-0.5, 0.5));
            let r = u(-0.3, 0.3);
            (el_jet(0.0, q, dq, r, &params), params)
        })
        .collect()
}

/// Horizontal curve on the Clifford torus `|γ₁| = |γ₂|`, a level set of the
/// (m,n) fiber length: `γ = (e^{−iny} + 𝕛e^{−imy})/√2`, closing after 2π.
pub fn level_curve(m: u32, n: u32, samples: usize, length: f64) -> Vec<CurveSampleS3> {
    let (a, b) = (-(n as f64), -(m as f64));
    let s = std::f64::consts::FRAC_1_SQRT_2;
    (0..samples)
        .map(|k| {
            let y = length * k as f64 / samples as f64;
            let g1 = C64::from_polar(s, a * y);
            let g2 = C64::from_polar(s, b * y);
            let d1 = C64::new(0.0, a) * g1;
            let d2 = C64::new(0.0, b) * g2;
            CurveSampleS3 { gamma: Quaternion::from_split(g1, g2), dgamma: Quaternion::from_split(d1, d2), y }
        })
        .collect()
}

/// The constant Hopf differential of [`level_curve`], measured on one period.
pub fn level_curve_q(m: u32, n: u32) -> C64 {
    let curve = level_curve(m, n, 4000, 2.0 * PI);
    let q = hopf_differential_from_curve(&curve, st(m, n), true).unwrap();
    q.iter().sum::<C64>() / q.len() as f64
}

pub fn max_err(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
