//! Independent numerical oracles.
//!
//! Norms are re-measured from function values alone with finite differences,
//! and the comparison theorem for `Ψ(t) = b·ψ_r(a; λt)` is checked pointwise:
//! if `‖x^{(k)}‖ <= ‖Ψ^{(k)}‖` for `k ∈ {0, r−2, r}` then `|x'(τ)|` is at most
//! the speed `|Ψ'(ξ)|` of `Ψ` at any `ξ` with `Ψ(ξ) = x(τ)`.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::poly;
use crate::ppoly::{PeriodicPiecewisePoly, PpolyError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("finite-difference step {step} must lie in (0, period/100 = {limit})")]
    StepTooLarge { step: f64, limit: f64 },
    #[error("invalid measurement config: {0}")]
    InvalidConfig(String),
    #[error("derivative order {order} exceeds smoothness + 1 = {limit}")]
    DerivativeOrderTooHigh { order: usize, limit: usize },
    #[error("level {level} lies outside [-{sup}, {sup}]")]
    LevelOutOfRange { level: f64, sup: f64 },
    #[error("hypothesis fails at order {order}: ‖x^({order})‖ = {lhs} > ‖Ψ^({order})‖ = {rhs}")]
    HypothesisNotMet { order: usize, lhs: f64, rhs: f64 },
    #[error(transparent)]
    Ppoly(#[from] PpolyError),
}

/// Sampling parameters for the finite-difference oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasurementConfig {
    /// Uniform samples per period.
    pub grid_points: usize,
    /// Step for first derivatives; see [`measure_norm`] for higher orders.
    pub fd_step: f64,
    /// Accuracy order of the central stencil, 2 or 4.
    pub fd_order: usize,
}

impl Default for MeasurementConfig {
    fn default() -> Self {
        Self {
            grid_points: 200_000,
            fd_step: 1e-5,
            fd_order: 4,
        }
    }
}

impl MeasurementConfig {
    pub fn validate(&self, period: f64) -> Result<(), VerifyError> {
        if self.grid_points < 1000 {
            return Err(VerifyError::InvalidConfig(format!(
                "grid_points must be >= 1000, got {}",
                self.grid_points
            )));
        }
        if self.fd_order != 2 && self.fd_order != 4 {
            return Err(VerifyError::InvalidConfig(format!(
                "fd_order must be 2 or 4, got {}",
                self.fd_order
            )));
        }
        let limit = period / 100.0;
        if !(self.fd_step > 0.0 && self.fd_step < limit) {
            return Err(VerifyError::StepTooLarge {
                step: self.fd_step,
                limit,
            });
        }
        Ok(())
    }
}

/// Finite-difference weights for the `m`-th derivative at 0 on nodes `z`
/// (Fornberg's recursion).
fn fornberg_weights(z: &[f64], m: usize) -> Vec<f64> {
    let n = z.len();
    let mut c = vec![vec![0.0; m + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = z[0];
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = z[i];
        for j in 0..i {
            let c3 = z[i] - z[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// Largest node count for which stencils are made exact on the piece degree.
const MAX_EXACT_NODES: usize = 17;

/// Finite-difference estimator of `p^{(k)}` built only from values of `p`.
struct Stencil<'a> {
    p: &'a PeriodicPiecewisePoly,
    k: usize,
    points: usize,
    /// Node count of shifted stencils; off-centre nodes lose one order of
    /// accuracy unless one more node is added.
    shifted_points: usize,
    base_step: f64,
    central: Vec<f64>,
}

impl<'a> Stencil<'a> {
    fn new(p: &'a PeriodicPiecewisePoly, k: usize, cfg: &MeasurementConfig) -> Self {
        // Stencils exact on the piece degree leave only rounding error, and
        // the fewer nodes the smaller the weights; very high degrees fall back
        // to the configured accuracy order.
        let exact = p.degree().max(k) + 1;
        let (points, shifted_points) = if exact <= MAX_EXACT_NODES {
            (exact | 1, exact)
        } else {
            let central = 2 * k.div_ceil(2) - 1 + cfg.fd_order;
            (central, central.max(k + cfg.fd_order))
        };
        let half = (points - 1) as f64 / 2.0;
        let offsets: Vec<f64> = (0..points).map(|i| i as f64 - half).collect();
        let kf = k as f64;
        let base_step = cfg.fd_step.powf(1.0 / kf) * (p.period() / 4.0).powf(1.0 - 1.0 / kf);
        Self {
            p,
            k,
            points,
            shifted_points,
            base_step,
            central: fornberg_weights(&offsets, k),
        }
    }

    /// Estimate at `t`, with the stencil kept inside piece `j`.
    fn estimate(&self, t: f64, j: usize) -> f64 {
        let lo = self.p.breakpoints()[j];
        let hi = self.p.breakpoints()[j + 1];
        let span = (self.points - 1) as f64;
        let h = self.base_step.min((hi - lo) / span);
        let start = t - 0.5 * span * h;
        if start >= lo && start + span * h <= hi {
            return self.apply(&self.central, start, h);
        }
        let span = (self.shifted_points - 1) as f64;
        let h = self.base_step.min((hi - lo) / span);
        let start = (t - 0.5 * span * h).max(lo).min(hi - span * h);
        let offsets: Vec<f64> = (0..self.shifted_points)
            .map(|i| (start - t) / h + i as f64)
            .collect();
        self.apply(&fornberg_weights(&offsets, self.k), start, h)
    }

    fn apply(&self, weights: &[f64], start: f64, h: f64) -> f64 {
        let acc: f64 = weights
            .iter()
            .enumerate()
            .map(|(i, wi)| wi * self.p.evaluate(start + i as f64 * h))
            .sum();
        acc / h.powi(self.k as i32)
    }
}

/// Sup-norm of the `derivative_order`-th derivative estimated from values of
/// `p` only, independent of [`PeriodicPiecewisePoly::derivative`].
///
/// Samples are a uniform grid of `cfg.grid_points` per period plus both
/// one-sided ends of every piece. Derivatives use Fornberg stencils with
/// just enough nodes to be exact on the piece degree, or of accuracy
/// `cfg.fd_order` when the degree exceeds 16; a stencil that would straddle a breakpoint is shifted (and
/// if necessary shrunk) to stay inside its piece, because `p` is only
/// piecewise smooth. The step for order `k` is
/// `fd_step^{1/k} · (period/4)^{1−1/k}`, so first derivatives use `fd_step`
/// and higher orders stay above the rounding floor.
///
/// Error: `O(step^{fd_order})` truncation (zero once the stencil is exact
/// for the piece degree), rounding `O(ε ‖p‖ / step^k)`, and the grid gap,
/// quadratic in `period / grid_points` near interior extrema.
pub fn measure_norm(
    p: &PeriodicPiecewisePoly,
    derivative_order: usize,
    cfg: &MeasurementConfig,
) -> Result<f64, VerifyError> {
    cfg.validate(p.period())?;
    let limit = p.smoothness() + 1;
    if derivative_order > limit {
        return Err(VerifyError::DerivativeOrderTooHigh {
            order: derivative_order,
            limit,
        });
    }
    let n = cfg.grid_points;
    let dt = p.period() / n as f64;
    let ends = p.breakpoints();
    let m = p.piece_count();

    if derivative_order == 0 {
        let grid = (0..n)
            .into_par_iter()
            .map(|i| p.evaluate(i as f64 * dt).abs())
            .reduce(|| 0.0, f64::max);
        let at_ends = ends.iter().map(|&t| p.evaluate(t).abs()).fold(0.0, f64::max);
        return Ok(grid.max(at_ends));
    }

    let stencil = Stencil::new(p, derivative_order, cfg);
    let grid = (0..n)
        .into_par_iter()
        .map(|i| {
            let t = i as f64 * dt;
            let (j, _) = p.locate(t);
            stencil.estimate(t, j).abs()
        })
        .reduce(|| 0.0, f64::max);
    let at_ends = (0..m)
        .flat_map(|j| [(ends[j], j), (ends[j + 1], j)])
        .map(|(t, j)| stencil.estimate(t, j).abs())
        .fold(0.0, f64::max);
    Ok(grid.max(at_ends))
}

/// One monotone piece of a branch, in local coordinates of piece `j`.
#[derive(Debug, Clone)]
struct Segment {
    poly: Vec<f64>,
    dpoly: Vec<f64>,
    u_lo: f64,
    u_hi: f64,
    /// Largest value on the segment.
    v_max: f64,
    rising: bool,
}

/// Which monotone branch of `Ψ` to invert.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// From the minimum to the maximum.
    Rising,
    /// From the maximum to the next minimum.
    Falling,
}

/// `v ↦ |Ψ'(ξ)|` with `Ψ(ξ) = v`, by inverting `Ψ` on a monotone branch.
#[derive(Debug, Clone)]
pub struct LevelSpeed {
    max: f64,
    min: f64,
    sup: f64,
    rising: Vec<Segment>,
    falling: Vec<Segment>,
}

impl LevelSpeed {
    pub fn new(psi: &PeriodicPiecewisePoly) -> Self {
        let ext = psi.extrema();
        let period = psi.period();
        let mut argmax = ext.argmax;
        if argmax <= ext.argmin {
            argmax += period;
        }
        let mut argmin_next = ext.argmin;
        while argmin_next <= argmax {
            argmin_next += period;
        }
        let rising = Self::walk(psi, ext.argmin, argmax - ext.argmin);
        let falling = Self::walk(psi, argmax, argmin_next - argmax);
        Self {
            max: ext.max,
            min: ext.min,
            sup: ext.sup_norm(),
            rising,
            falling,
        }
    }

    /// Segments covering `[start, start + length]`, sorted by value.
    fn walk(psi: &PeriodicPiecewisePoly, start: f64, length: f64) -> Vec<Segment> {
        let (mut j, mut u) = psi.locate(start);
        let mut remaining = length;
        let mut out = Vec::new();
        let m = psi.piece_count();
        while remaining > 0.0 && out.len() <= m + 1 {
            let h = psi.piece_length(j);
            let u_hi = (u + remaining).min(h);
            if u_hi > u {
                let c = &psi.pieces()[j];
                let (v0, v1) = (poly::eval(c, u), poly::eval(c, u_hi));
                // flat pieces sit at an extremal level, which is answered
                // before any lookup; keeping them would shadow the real piece
                if v0 == v1 {
                    remaining -= u_hi - u;
                    j = (j + 1) % m;
                    u = 0.0;
                    continue;
                }
                out.push(Segment {
                    poly: c.clone(),
                    dpoly: poly::derivative(c),
                    u_lo: u,
                    u_hi,
                    v_max: v0.max(v1),
                    rising: v1 >= v0,
                });
            }
            remaining -= u_hi - u;
            j = (j + 1) % m;
            u = 0.0;
        }
        out.sort_by(|a, b| a.v_max.total_cmp(&b.v_max));
        out
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup
    }

    /// Speed at level `v`, on the rising branch.
    pub fn speed(&self, v: f64) -> Result<f64, VerifyError> {
        self.speed_on(v, Branch::Rising)
    }

    pub fn speed_on(&self, v: f64, branch: Branch) -> Result<f64, VerifyError> {
        if !(v.abs() <= self.sup * (1.0 + 1e-12)) {
            return Err(VerifyError::LevelOutOfRange {
                level: v,
                sup: self.sup,
            });
        }
        Ok(self.speed_clamped(v, branch))
    }

    /// Speed at `v` clamped into `[min Ψ, max Ψ]`.
    pub fn speed_clamped(&self, v: f64, branch: Branch) -> f64 {
        if v >= self.max || v <= self.min {
            return 0.0;
        }
        let segments = match branch {
            Branch::Rising => &self.rising,
            Branch::Falling => &self.falling,
        };
        let idx = segments
            .partition_point(|s| s.v_max < v)
            .min(segments.len().saturating_sub(1));
        let Some(seg) = segments.get(idx) else {
            return 0.0;
        };
        let (mut lo, mut hi) = (seg.u_lo, seg.u_hi);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let below = poly::eval(&seg.poly, mid) < v;
            if below == seg.rising {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        poly::eval(&seg.dpoly, 0.5 * (lo + hi)).abs()
    }
}

/// `|Ψ'(ξ)|` at a point where `Ψ(ξ) = v`.
pub fn level_speed(psi: &PeriodicPiecewisePoly, v: f64) -> Result<f64, VerifyError> {
    LevelSpeed::new(psi).speed(v)
}

/// Checks `‖x^{(k)}‖ <= ‖Ψ^{(k)}‖ (1 + 1e-10)` for each `k` in `orders`.
pub fn check_hypothesis(
    x: &PeriodicPiecewisePoly,
    psi: &PeriodicPiecewisePoly,
    orders: &[usize],
) -> Result<(), VerifyError> {
    for &order in orders {
        let lhs = x.nth_derivative(order).sup_norm();
        let rhs = psi.nth_derivative(order).sup_norm();
        if lhs > rhs * (1.0 + 1e-10) {
            return Err(VerifyError::HypothesisNotMet { order, lhs, rhs });
        }
    }
    Ok(())
}

/// Orders `{0, r−2, r}` constrained by the comparison hypothesis.
pub fn hypothesis_orders(r: usize) -> Vec<usize> {
    vec![0, r.saturating_sub(2), r]
}

/// Result of a pointwise comparison run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonOutcome {
    pub ok: bool,
    /// `max_τ (|x'(τ)| − speed(x(τ)))`.
    pub worst_violation: f64,
    pub worst_at: f64,
    pub epsilon: f64,
}

/// Verifies `|x'(τ)| <= |Ψ'(ξ)|` whenever `x(τ) = Ψ(ξ)` on a grid of `τ`.
///
/// `orders` lists the derivative orders whose norms must be dominated by
/// those of `Ψ`; an empty slice means `{0, r−2, r}`.
pub fn comparison_check(
    x: &PeriodicPiecewisePoly,
    psi: &PeriodicPiecewisePoly,
    r: usize,
    orders: &[usize],
    cfg: &MeasurementConfig,
) -> Result<ComparisonOutcome, VerifyError> {
    let default_orders = hypothesis_orders(r);
    let orders = if orders.is_empty() { &default_orders[..] } else { orders };
    check_hypothesis(x, psi, orders)?;
    cfg.validate(x.period())?;

    let dx = x.derivative();
    let speed = LevelSpeed::new(psi);
    let epsilon = 1e-8 * (1.0 + psi.derivative().sup_norm());
    let n = cfg.grid_points;
    let dt = x.period() / n as f64;
    let (worst_violation, worst_at) = (0..n)
        .into_par_iter()
        .map(|i| {
            let tau = i as f64 * dt;
            let level = x.evaluate(tau).clamp(-speed.sup, speed.sup);
            let bound = speed.speed_clamped(level, Branch::Rising);
            (dx.evaluate(tau).abs() - bound, tau)
        })
        .reduce(
            || (f64::NEG_INFINITY, 0.0),
            |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
        );
    Ok(ComparisonOutcome {
        ok: worst_violation <= epsilon,
        worst_violation,
        worst_at,
        epsilon,
    })
}

/// Result of the `k₂`-norm comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundOutcome {
    pub ok: bool,
    pub lhs: f64,
    pub rhs: f64,
}

/// Verifies `‖x^{(k₂)}‖ <= ‖Ψ^{(k₂)}‖` under the hypothesis at `{0, r−2, r}`.
pub fn k2_bound_check(
    x: &PeriodicPiecewisePoly,
    psi: &PeriodicPiecewisePoly,
    k2: usize,
    r: usize,
) -> Result<BoundOutcome, VerifyError> {
    check_hypothesis(x, psi, &hypothesis_orders(r))?;
    let lhs = x.nth_derivative(k2).sup_norm();
    let rhs = psi.nth_derivative(k2).sup_norm();
    Ok(BoundOutcome {
        ok: lhs <= rhs * (1.0 + 1e-10),
        lhs,
        rhs,
    })
}

/// JSON form of a comparison run.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub hypothesis_met: bool,
    pub ok: bool,
    pub worst_violation: Option<f64>,
    pub config: MeasurementConfig,
}

impl VerificationReport {
    pub fn from_result(
        result: &Result<ComparisonOutcome, VerifyError>,
        config: MeasurementConfig,
    ) -> Self {
        match result {
            Ok(o) => Self {
                hypothesis_met: true,
                ok: o.ok,
                worst_violation: Some(o.worst_violation),
                config,
            },
            Err(_) => Self {
                hypothesis_met: false,
                ok: false,
                worst_violation: None,
                config,
            },
        }
    }
}

/// Pieces per period of the sinusoid approximant.
pub const SINUSOID_PIECES: usize = 128;
/// Degree of each sinusoid piece.
pub const SINUSOID_DEGREE: usize = 11;
/// Continuity class asserted for the sinusoid approximant.
pub const SINUSOID_SMOOTHNESS: usize = 8;

/// `t ↦ A sin(ω t)` as degree-11 Taylor pieces, 128 per period.
pub fn sinusoid(amplitude: f64, omega: f64) -> Result<PeriodicPiecewisePoly, VerifyError> {
    let period = 2.0 * std::f64::consts::PI;
    let h = period / SINUSOID_PIECES as f64;
    let breakpoints: Vec<f64> = (0..=SINUSOID_PIECES).map(|j| j as f64 * h).collect();
    let pieces = breakpoints[..SINUSOID_PIECES]
        .iter()
        .map(|&t0| {
            let (s, c) = t0.sin_cos();
            let derivs = [s, c, -s, -c];
            let mut factorial = 1.0;
            (0..=SINUSOID_DEGREE)
                .map(|i| {
                    if i > 0 {
                        factorial *= i as f64;
                    }
                    derivs[i % 4] / factorial
                })
                .collect()
        })
        .collect();
    let base = PeriodicPiecewisePoly::new(period, breakpoints, pieces, SINUSOID_SMOOTHNESS)?;
    Ok(base.scale(amplitude, omega)?)
}

/// Bound on `|p^{(k)} − d^k/dt^k sin|` for the unit sinusoid approximant
/// (Taylor remainder of degree 11 on steps of `2π/128`).
pub fn sinusoid_remainder_bound(k: usize) -> f64 {
    if k > SINUSOID_DEGREE {
        return 1.0;
    }
    let h = 2.0 * std::f64::consts::PI / SINUSOID_PIECES as f64;
    let n = SINUSOID_DEGREE + 1 - k;
    let fact: f64 = (1..=n).map(|i| i as f64).product();
    h.powi(n as i32) / fact
}

/// A sinusoid satisfying the comparison hypothesis against `psi` with
/// relative slack: `A = fill · min(‖Ψ‖, ‖Ψ^{(r−2)}‖/ω^{r−2}, ‖Ψ^{(r)}‖/ω^r)`.
pub fn sinusoid_within_hypothesis(
    psi: &PeriodicPiecewisePoly,
    r: usize,
    omega: f64,
    fill: f64,
) -> Result<PeriodicPiecewisePoly, VerifyError> {
    let caps = hypothesis_orders(r).into_iter().map(|k| {
        psi.nth_derivative(k).sup_norm() / omega.powi(k as i32)
    });
    let amplitude = fill * caps.fold(f64::INFINITY, f64::min);
    sinusoid(amplitude, omega)
}
