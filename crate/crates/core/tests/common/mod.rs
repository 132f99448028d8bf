#![allow(dead_code)]

//! Closed forms of ψ_2, ψ_3, ψ_4 on [0, a+2], obtained by integrating the
//! piecewise definition of ψ_1 by hand. Used only as oracles.

use kolmo_core::{favard, ProblemInstance};
use rand::Rng;

pub fn psi2_closed(a: f64, t: f64) -> f64 {
    if t <= 1.0 {
        0.5 * (t - 1.0).powi(2) - 0.5
    } else if t <= a + 1.0 {
        -0.5
    } else {
        0.5 * (t - a - 1.0).powi(2) - 0.5
    }
}

pub fn psi3_closed(a: f64, t: f64) -> f64 {
    if t <= 1.0 {
        1.0 / 3.0 + a / 4.0 + ((t - 1.0).powi(3) + 1.0) / 6.0 - t / 2.0
    } else if t <= a + 1.0 {
        a / 4.0 - (t - 1.0) / 2.0
    } else {
        let s = t - a - 1.0;
        -a / 4.0 + s.powi(3) / 6.0 - s / 2.0
    }
}

pub fn psi4_closed(a: f64, t: f64) -> f64 {
    if t <= 1.0 {
        (1.0 / 3.0 + a / 4.0) * t + ((t - 1.0).powi(4) - 1.0) / 24.0 + t / 6.0 - t * t / 4.0
    } else if t <= a + 1.0 {
        let s = t - 1.0;
        5.0 / 24.0 + a / 4.0 + a / 4.0 * s - s * s / 4.0
    } else {
        let s = t - a - 1.0;
        5.0 / 24.0 + a / 4.0 - a / 4.0 * s + s.powi(4) / 24.0 - s * s / 4.0
    }
}

/// max over `n` uniform samples of `|f|` on `[0, len]` (endpoints included).
pub fn sampled_max(f: impl Fn(f64) -> f64, len: f64, n: usize) -> f64 {
    (0..=n)
        .map(|i| f(len * i as f64 / n as f64).abs())
        .fold(0.0, f64::max)
}

pub fn n3(a: f64) -> f64 {
    1.0 / 3.0 + a / 4.0
}

pub fn n4(a: f64) -> f64 {
    5.0 / 24.0 + a / 4.0 + a * a / 16.0
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(f64::MIN_POSITIVE)
}

/// Smallest admissible `M_k` for given `(M_{r−2}, M_r)`: equality in the
/// three-norm inequality, solved for `M_k`.
pub fn mk_floor(mrm2: f64, mr: f64, k: usize, r: usize) -> f64 {
    let d = (r - k) as f64;
    let kd = favard(r - k).unwrap();
    let k2 = favard(2).unwrap();
    (mrm2 * kd.powf(2.0 / d) / (k2 * mr.powf((d - 2.0) / d))).powf(d / 2.0)
}

pub fn random_instance(rng: &mut impl Rng, r: usize, k: usize) -> ProblemInstance {
    let mr = rng.gen_range(0.2..5.0);
    let mrm2 = rng.gen_range(0.2..5.0);
    let mk = mk_floor(mrm2, mr, k, r) * rng.gen_range(1.0..4.0);
    ProblemInstance::new(r, k, 1.0, mk, mrm2, mr).unwrap()
}

