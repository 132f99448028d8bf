//! Euler perfect splines `φ_r` and the Favard constants `K_r = ‖φ_r‖`.
//!
//! `φ_r` is the `r`-fold zero-mean periodic antiderivative of `sgn sin t`:
//!
//! ```text
//! φ_r(t) = (4/π) Σ_{ν≥0} sin((2ν+1)t − rπ/2) / (2ν+1)^{r+1}
//! K_r    = (4/π) Σ_{ν≥0} (−1)^{ν(r+1)} / (2ν+1)^{r+1}
//! ```
//!
//! The constant series is summed directly for the first terms and the tail is
//! evaluated by Euler–Maclaurin summation. Summands (or, in the alternating
//! case, consecutive pairs of summands) are completely monotone, so the
//! remainder is bounded by the first omitted correction term.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

/// Largest order in the Favard table.
pub const R_MAX: usize = 16;

/// Terms summed directly before the Euler–Maclaurin tail.
const DIRECT_TERMS: usize = 64;

/// `B_{2j} / (2j)!` for `j = 1..=11`.
const BERNOULLI_OVER_FACTORIAL: [f64; 11] = [
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40320.0,
    5.0 / 66.0 / 3628800.0,
    -691.0 / 2730.0 / 479001600.0,
    7.0 / 6.0 / 87178291200.0,
    -3617.0 / 510.0 / 20922789888000.0,
    43867.0 / 798.0 / 6402373705728000.0,
    -174611.0 / 330.0 / 2432902008176640000.0,
    854513.0 / 138.0 / 1.1240007277776077e21,
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EulerError {
    #[error("order {0} outside 0..={max}", max = R_MAX)]
    OrderOutOfRange(usize),
    #[error("need 0 < k < {bound} with r <= {max}; got k = {k}, r = {r}", max = R_MAX)]
    BadOrderPair { k: usize, r: usize, bound: usize },
    #[error("norm targets must be positive and finite")]
    NonPositiveNorm,
}

/// A series value with a bound on its truncation error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    pub remainder_bound: f64,
}

/// `Σ_{m≥0} (c m + d)^{-s}`-type tails are assembled from these.
#[derive(Clone, Copy)]
struct PowerTerm {
    c: f64,
    d: f64,
}

impl PowerTerm {
    fn at(self, x: f64, s: f64) -> f64 {
        (self.c * x + self.d).powf(-s)
    }

    /// `n`-th derivative of `x ↦ (c x + d)^{-s}`.
    fn derivative(self, x: f64, s: f64, n: usize) -> f64 {
        let mut rising = 1.0;
        for i in 0..n {
            rising *= -(s + i as f64) * self.c;
        }
        rising * (self.c * x + self.d).powf(-s - n as f64)
    }
}

/// Euler–Maclaurin tail `Σ_{m≥N} g(m)` for `g(x) = Σ_i w_i (c_i x + d_i)^{-s}`,
/// given `∫_N^∞ g`.
fn em_tail(terms: &[(f64, PowerTerm)], s: f64, n: f64, integral: f64) -> SeriesValue {
    let g = |x: f64| terms.iter().map(|&(w, t)| w * t.at(x, s)).sum::<f64>();
    let dg = |x: f64, k: usize| {
        terms
            .iter()
            .map(|&(w, t)| w * t.derivative(x, s, k))
            .sum::<f64>()
    };
    let corrections = BERNOULLI_OVER_FACTORIAL.len() - 1;
    let mut value = integral + 0.5 * g(n);
    for (j, b) in BERNOULLI_OVER_FACTORIAL[..corrections].iter().enumerate() {
        value -= b * dg(n, 2 * j + 1);
    }
    let next = BERNOULLI_OVER_FACTORIAL[corrections] * dg(n, 2 * corrections + 1);
    SeriesValue {
        value,
        remainder_bound: next.abs(),
    }
}

/// `Σ_{ν≥0} (−1)^{ν(r+1)} / (2ν+1)^{r+1}`.
pub fn favard_series(r: usize) -> SeriesValue {
    let s = (r + 1) as f64;
    let n = DIRECT_TERMS as f64;
    if (r + 1).is_multiple_of(2) {
        // all terms positive: Σ (2ν+1)^{-s}
        let term = PowerTerm { c: 2.0, d: 1.0 };
        let head: f64 = (0..DIRECT_TERMS).rev().map(|v| term.at(v as f64, s)).sum();
        let integral = (2.0 * n + 1.0).powf(1.0 - s) / (2.0 * (s - 1.0));
        let tail = em_tail(&[(1.0, term)], s, n, integral);
        SeriesValue {
            value: head + tail.value,
            remainder_bound: tail.remainder_bound,
        }
    } else {
        // alternating: pair ν = 2μ and 2μ+1 into (4μ+1)^{-s} − (4μ+3)^{-s}
        let plus = PowerTerm { c: 4.0, d: 1.0 };
        let minus = PowerTerm { c: 4.0, d: 3.0 };
        let head: f64 = (0..DIRECT_TERMS)
            .rev()
            .map(|m| plus.at(m as f64, s) - minus.at(m as f64, s))
            .sum();
        let integral = if r == 0 {
            0.25 * ((4.0 * n + 3.0) / (4.0 * n + 1.0)).ln()
        } else {
            ((4.0 * n + 1.0).powf(1.0 - s) - (4.0 * n + 3.0).powf(1.0 - s)) / (4.0 * (s - 1.0))
        };
        let tail = em_tail(&[(1.0, plus), (-1.0, minus)], s, n, integral);
        SeriesValue {
            value: head + tail.value,
            remainder_bound: tail.remainder_bound,
        }
    }
}

/// Favard constants `K_0..=K_{R_MAX}`, computed once.
#[derive(Debug, Clone, Serialize)]
pub struct FavardTable {
    values: Vec<f64>,
    remainder_bounds: Vec<f64>,
}

impl FavardTable {
    fn compute() -> Self {
        let (values, remainder_bounds) = (0..=R_MAX)
            .map(|r| {
                let s = favard_series(r);
                (4.0 / PI * s.value, 4.0 / PI * s.remainder_bound)
            })
            .unzip();
        Self {
            values,
            remainder_bounds,
        }
    }

    /// The process-wide table.
    pub fn get() -> &'static FavardTable {
        static TABLE: OnceLock<FavardTable> = OnceLock::new();
        TABLE.get_or_init(Self::compute)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Certified truncation bound for each `K_r`.
    pub fn remainder_bounds(&self) -> &[f64] {
        &self.remainder_bounds
    }
}

/// `K_r = ‖φ_r‖`.
pub fn favard(r: usize) -> Result<f64, EulerError> {
    FavardTable::get()
        .values
        .get(r)
        .copied()
        .ok_or(EulerError::OrderOutOfRange(r))
}

/// Partial Fourier sum of `φ_r(t)` with `terms` terms, and the bound
/// `2 Σ_{ν≥terms} (2ν+1)^{-(r+1)}` on the omitted part. Needs `r >= 1`.
pub fn euler_spline_fourier(r: usize, t: f64, terms: usize) -> SeriesValue {
    let phase = r as f64 * PI / 2.0;
    let s = (r + 1) as i32;
    let mut value = 0.0;
    for v in (0..terms).rev() {
        let n = (2 * v + 1) as f64;
        value += (n * t - phase).sin() / n.powi(s);
    }
    // Σ_{ν≥N} (2ν+1)^{-s} ≤ (2N+1)^{-s} + ∫_N^∞ (2x+1)^{-s} dx
    let first = (2 * terms + 1) as f64;
    let tail = if r == 0 {
        f64::INFINITY
    } else {
        first.powi(-s) + first.powi(1 - s) / (2.0 * r as f64)
    };
    SeriesValue {
        value: 4.0 / PI * value,
        remainder_bound: 2.0 * tail,
    }
}

fn check_positive(values: &[f64]) -> Result<(), EulerError> {
    if values.iter().all(|v| v.is_finite() && *v > 0.0) {
        Ok(())
    } else {
        Err(EulerError::NonPositiveNorm)
    }
}

/// Largest admissible `‖x^{(k)}‖` given `‖x‖ = m0` and `‖x^{(r)}‖ = mr`:
/// `K_{r−k} / K_r^{1−k/r} · m0^{1−k/r} · mr^{k/r}`.
pub fn kolmogorov_bound(m0: f64, mr: f64, k: usize, r: usize) -> Result<f64, EulerError> {
    if k == 0 || k >= r || r > R_MAX {
        return Err(EulerError::BadOrderPair { k, r, bound: r });
    }
    check_positive(&[m0, mr])?;
    let theta = k as f64 / r as f64;
    let ratio = favard(r - k)? / favard(r)?.powf(1.0 - theta);
    Ok(ratio * m0.powf(1.0 - theta) * mr.powf(theta))
}

/// Outcome of a feasibility inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Condition {
    pub holds: bool,
    /// `bound − value` in absolute units (signed).
    pub margin: f64,
    /// `margin / bound`.
    pub relative_margin: f64,
    pub bound: f64,
}

impl Condition {
    /// `value <= bound` up to `1e-10 * (1 + bound)`.
    pub fn upper(value: f64, bound: f64) -> Self {
        let margin = bound - value;
        Self {
            holds: margin >= -feasibility_slack(bound),
            margin,
            relative_margin: margin / bound,
            bound,
        }
    }

    /// `value >= bound` up to `1e-10 * (1 + bound)`.
    pub fn lower(value: f64, bound: f64) -> Self {
        let margin = value - bound;
        Self {
            holds: margin >= -feasibility_slack(bound),
            margin,
            relative_margin: margin / bound,
            bound,
        }
    }
}

/// Slack for non-strict inequalities.
pub fn feasibility_slack(bound: f64) -> f64 {
    1e-10 * (1.0 + bound.abs())
}

/// Bound on `M_{r−2}` in terms of `M_k` and `M_r`:
/// `K_2 / K_{r−k}^{2/(r−k)} · mk^{2/(r−k)} · mr^{(r−k−2)/(r−k)}`.
pub fn three_norm_bound(mk: f64, mr: f64, k: usize, r: usize) -> Result<f64, EulerError> {
    if r > R_MAX || k == 0 || k + 2 >= r {
        return Err(EulerError::BadOrderPair {
            k,
            r,
            bound: r.saturating_sub(2),
        });
    }
    check_positive(&[mk, mr])?;
    let d = (r - k) as f64;
    let ratio = favard(2)? / favard(r - k)?.powf(2.0 / d);
    Ok(ratio * mk.powf(2.0 / d) * mr.powf((d - 2.0) / d))
}

/// The three-norm inequality `mrm2 <= three_norm_bound(mk, mr, k, r)`.
pub fn condition_a(mk: f64, mrm2: f64, mr: f64, k: usize, r: usize) -> Result<Condition, EulerError> {
    let bound = three_norm_bound(mk, mr, k, r)?;
    check_positive(&[mrm2])?;
    Ok(Condition::upper(mrm2, bound))
}
