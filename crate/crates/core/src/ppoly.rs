//! Periodic piecewise polynomials.
//!
//! A [`PeriodicPiecewisePoly`] stores one period `[0, period)` as a list of
//! polynomial pieces. Piece `j` lives on `[t_j, t_{j+1}]` and is expressed in
//! the local variable `u = t - t_j`, which keeps coefficients well scaled when
//! breakpoints are large.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly;

/// Abscissa tolerance for critical-point isolation.
pub const ROOT_TOL: f64 = 1e-12;

/// Continuity class recorded for constant functions.
const CONSTANT_SMOOTHNESS: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PpolyError {
    #[error("period must be positive and finite, got {0}")]
    InvalidPeriod(f64),
    #[error("breakpoints must start at 0, end at the period and be nondecreasing")]
    InvalidBreakpoints,
    #[error("expected {expected} pieces for the given breakpoints, got {got}")]
    PieceCountMismatch { expected: usize, got: usize },
    #[error("non-finite coefficient in piece {0}")]
    NonFiniteCoefficient(usize),
    #[error("no pieces of positive length")]
    Empty,
    #[error(
        "derivative of order {order} jumps by {gap:e} at breakpoint {index} (tolerance {tolerance:e})"
    )]
    StitchMismatch {
        index: usize,
        order: usize,
        gap: f64,
        tolerance: f64,
    },
    #[error("input has mean {mean:e}; a periodic antiderivative needs |mean| <= {tolerance:e}")]
    NonZeroMeanInput { mean: f64, tolerance: f64 },
    #[error("time scale must be positive and finite, got {0}")]
    NonPositiveScale(f64),
}

/// Location and value of the largest and smallest value over one period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrema {
    pub argmax: f64,
    pub max: f64,
    pub argmin: f64,
    pub min: f64,
}

impl Extrema {
    pub fn sup_norm(&self) -> f64 {
        self.max.abs().max(self.min.abs())
    }

    /// Abscissa where `|p|` attains the sup-norm.
    pub fn arg_sup(&self) -> f64 {
        if self.max.abs() >= self.min.abs() {
            self.argmax
        } else {
            self.argmin
        }
    }
}

/// A `period`-periodic function given by polynomial pieces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPpoly", into = "RawPpoly")]
pub struct PeriodicPiecewisePoly {
    period: f64,
    breakpoints: Vec<f64>,
    pieces: Vec<Vec<f64>>,
    smoothness: usize,
    /// Set when the function was obtained by differentiating a merely
    /// continuous function, so its values at breakpoints are one-sided.
    ae_derivative: bool,
}

/// Wire format: `{"period", "breakpoints", "pieces", "smoothness"}`.
#[derive(Serialize, Deserialize)]
struct RawPpoly {
    period: f64,
    breakpoints: Vec<f64>,
    pieces: Vec<Vec<f64>>,
    smoothness: usize,
}

impl TryFrom<RawPpoly> for PeriodicPiecewisePoly {
    type Error = PpolyError;

    fn try_from(raw: RawPpoly) -> Result<Self, Self::Error> {
        Self::new(raw.period, raw.breakpoints, raw.pieces, raw.smoothness)
    }
}

impl From<PeriodicPiecewisePoly> for RawPpoly {
    fn from(p: PeriodicPiecewisePoly) -> Self {
        RawPpoly {
            period: p.period,
            breakpoints: p.breakpoints,
            pieces: p.pieces,
            smoothness: p.smoothness,
        }
    }
}

impl PeriodicPiecewisePoly {
    /// Builds a function from breakpoints `0 = t_0 <= ... <= t_m = period` and
    /// `m` local-variable coefficient lists.
    ///
    /// Zero-length pieces are dropped. Continuity of derivatives up to
    /// `smoothness` is checked at every breakpoint and at the wrap point,
    /// comparing Taylor coefficients within `1e-10 * (1 + max|coeff|)`.
    pub fn new(
        period: f64,
        breakpoints: Vec<f64>,
        pieces: Vec<Vec<f64>>,
        smoothness: usize,
    ) -> Result<Self, PpolyError> {
        if !(period.is_finite() && period > 0.0) {
            return Err(PpolyError::InvalidPeriod(period));
        }
        if breakpoints.len() < 2 {
            return Err(PpolyError::InvalidBreakpoints);
        }
        if pieces.len() != breakpoints.len() - 1 {
            return Err(PpolyError::PieceCountMismatch {
                expected: breakpoints.len() - 1,
                got: pieces.len(),
            });
        }
        let last = breakpoints[breakpoints.len() - 1];
        if breakpoints[0] != 0.0
            || (last - period).abs() > 1e-12 * period
            || breakpoints.windows(2).any(|w| !(w[1] >= w[0]))
        {
            return Err(PpolyError::InvalidBreakpoints);
        }
        for (j, c) in pieces.iter().enumerate() {
            if c.iter().any(|x| !x.is_finite()) {
                return Err(PpolyError::NonFiniteCoefficient(j));
            }
        }
        let out = Self::assemble(period, &breakpoints, pieces, smoothness);
        if out.pieces.is_empty() {
            return Err(PpolyError::Empty);
        }
        out.check_stitching()?;
        Ok(out)
    }

    /// Drops zero-length pieces and snaps the last breakpoint to `period`.
    /// Performs no stitching check.
    fn assemble(
        period: f64,
        breakpoints: &[f64],
        pieces: Vec<Vec<f64>>,
        smoothness: usize,
    ) -> Self {
        let mut bps = vec![0.0];
        let mut kept = Vec::with_capacity(pieces.len());
        for (j, c) in pieces.into_iter().enumerate() {
            let end = if j + 2 == breakpoints.len() {
                period
            } else {
                breakpoints[j + 1]
            };
            if end > *bps.last().unwrap() {
                bps.push(end);
                kept.push(if c.is_empty() { vec![0.0] } else { c });
            }
        }
        if let Some(last) = bps.last_mut() {
            *last = period;
        }
        Self {
            period,
            breakpoints: bps,
            pieces: kept,
            smoothness,
            ae_derivative: false,
        }
    }

    /// Stitching tolerance `1e-10 * (1 + max|coeff|)`.
    pub fn stitch_tolerance(&self) -> f64 {
        1e-10 * (1.0 + self.max_abs_coefficient())
    }

    fn max_abs_coefficient(&self) -> f64 {
        self.pieces
            .iter()
            .flatten()
            .fold(0.0_f64, |m, &c| m.max(c.abs()))
    }

    fn check_stitching(&self) -> Result<(), PpolyError> {
        let tolerance = self.stitch_tolerance();
        let m = self.pieces.len();
        for j in 0..m {
            let next = (j + 1) % m;
            let h = self.piece_length(j);
            for order in 0..=self.smoothness {
                let left = poly::taylor_coefficient(&self.pieces[j], order, h);
                let right = self.pieces[next].get(order).copied().unwrap_or(0.0);
                let gap = (left - right).abs();
                if !(gap <= tolerance) {
                    return Err(PpolyError::StitchMismatch {
                        index: next,
                        order,
                        gap,
                        tolerance,
                    });
                }
            }
        }
        Ok(())
    }

    /// The constant function `value` with the given period.
    pub fn constant(period: f64, value: f64) -> Result<Self, PpolyError> {
        Self::new(period, vec![0.0, period], vec![vec![value]], CONSTANT_SMOOTHNESS)
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Vec<f64>] {
        &self.pieces
    }

    pub fn smoothness(&self) -> usize {
        self.smoothness
    }

    /// True if this is the almost-everywhere derivative of a function that was
    /// only asserted continuous.
    pub fn is_ae_derivative(&self) -> bool {
        self.ae_derivative
    }

    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    pub fn piece_length(&self, j: usize) -> f64 {
        self.breakpoints[j + 1] - self.breakpoints[j]
    }

    /// Highest polynomial degree over all pieces.
    pub fn degree(&self) -> usize {
        self.pieces.iter().map(|c| poly::degree(c)).max().unwrap_or(0)
    }

    /// Reduces `t` modulo the period and returns `(piece index, local u)`.
    pub fn locate(&self, t: f64) -> (usize, f64) {
        let mut s = t.rem_euclid(self.period);
        if s >= self.period {
            s = 0.0;
        }
        let j = self
            .breakpoints
            .partition_point(|&b| b <= s)
            .saturating_sub(1)
            .min(self.pieces.len() - 1);
        (j, s - self.breakpoints[j])
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        let (j, u) = self.locate(t);
        poly::eval(&self.pieces[j], u)
    }

    /// Piecewise formal derivative. Smoothness drops by one (floor 0); a
    /// derivative of a `C^0` function is flagged as almost-everywhere.
    pub fn derivative(&self) -> Self {
        Self {
            period: self.period,
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(|c| poly::derivative(c)).collect(),
            smoothness: self.smoothness.saturating_sub(1),
            ae_derivative: self.smoothness == 0 || self.ae_derivative,
        }
    }

    /// `k`-fold derivative.
    pub fn nth_derivative(&self, k: usize) -> Self {
        (0..k).fold(self.clone(), |p, _| p.derivative())
    }

    /// Exact integral over one period.
    pub fn integral(&self) -> f64 {
        self.pieces
            .iter()
            .enumerate()
            .map(|(j, c)| poly::definite_integral(c, self.piece_length(j)))
            .sum()
    }

    pub fn mean(&self) -> f64 {
        self.integral() / self.period
    }

    /// Mean tolerance `1e-12 * period * (1 + sup|p|)`.
    pub fn mean_tolerance(&self) -> f64 {
        1e-12 * self.period * (1.0 + self.sup_norm())
    }

    /// The periodic antiderivative with zero mean over the period.
    pub fn antiderivative_zero_mean(&self) -> Result<Self, PpolyError> {
        let mean = self.mean();
        let tolerance = self.mean_tolerance();
        if !(mean.abs() <= tolerance) {
            return Err(PpolyError::NonZeroMeanInput { mean, tolerance });
        }
        let mut constant = 0.0;
        let mut pieces = Vec::with_capacity(self.pieces.len());
        for (j, c) in self.pieces.iter().enumerate() {
            let q = poly::integrate(c, constant);
            constant = poly::eval(&q, self.piece_length(j));
            pieces.push(q);
        }
        let mut out = Self {
            period: self.period,
            breakpoints: self.breakpoints.clone(),
            pieces,
            smoothness: self.smoothness + 1,
            ae_derivative: false,
        };
        let shift = out.mean();
        for q in &mut out.pieces {
            q[0] -= shift;
        }
        Ok(out)
    }

    /// Largest and smallest values over one period, from piece endpoints and
    /// sign changes of each piece's derivative.
    pub fn extrema(&self) -> Extrema {
        let mut ext = Extrema {
            argmax: 0.0,
            max: f64::NEG_INFINITY,
            argmin: 0.0,
            min: f64::INFINITY,
        };
        let mut visit = |t: f64, v: f64| {
            if v > ext.max {
                ext.max = v;
                ext.argmax = t;
            }
            if v < ext.min {
                ext.min = v;
                ext.argmin = t;
            }
        };
        for (j, c) in self.pieces.iter().enumerate() {
            let t0 = self.breakpoints[j];
            let h = self.piece_length(j);
            visit(t0, poly::eval(c, 0.0));
            visit(t0 + h, poly::eval(c, h));
            if poly::degree(c) >= 2 {
                for u in poly::sign_change_roots(&poly::derivative(c), h, ROOT_TOL) {
                    visit(t0 + u, poly::eval(c, u));
                }
            }
        }
        ext
    }

    /// `max |p(t)|` over one period.
    pub fn sup_norm(&self) -> f64 {
        self.extrema().sup_norm()
    }

    /// `t ↦ b · p(λ t)`.
    pub fn scale(&self, b: f64, lambda: f64) -> Result<Self, PpolyError> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(PpolyError::NonPositiveScale(lambda));
        }
        let pieces = self
            .pieces
            .iter()
            .map(|c| {
                let mut w = b;
                c.iter()
                    .map(|&ci| {
                        let out = w * ci;
                        w *= lambda;
                        out
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            period: self.period / lambda,
            breakpoints: self.breakpoints.iter().map(|t| t / lambda).collect(),
            pieces,
            smoothness: self.smoothness,
            ae_derivative: self.ae_derivative,
        })
    }

    pub fn add_constant(&self, c: f64) -> Self {
        let mut out = self.clone();
        for q in &mut out.pieces {
            q[0] += c;
        }
        out
    }

    /// `t ↦ p(t + s)`, re-laid out on `[0, period)`.
    pub fn translate(&self, s: f64) -> Self {
        let (j0, u0) = self.locate(s);
        let m = self.pieces.len();
        let mut lengths = Vec::with_capacity(m + 1);
        let mut pieces = Vec::with_capacity(m + 1);
        let h0 = self.piece_length(j0);
        if h0 - u0 > 0.0 {
            lengths.push(h0 - u0);
            pieces.push(poly::taylor_shift(&self.pieces[j0], u0));
        }
        for k in 1..m {
            let j = (j0 + k) % m;
            lengths.push(self.piece_length(j));
            pieces.push(self.pieces[j].clone());
        }
        if u0 > 0.0 {
            lengths.push(u0);
            pieces.push(self.pieces[j0].clone());
        }
        let mut bps = Vec::with_capacity(lengths.len() + 1);
        bps.push(0.0);
        let mut acc = 0.0;
        for l in &lengths {
            acc += l;
            bps.push(acc);
        }
        let mut out = Self::assemble(self.period, &bps, pieces, self.smoothness);
        out.ae_derivative = self.ae_derivative;
        out
    }
}
