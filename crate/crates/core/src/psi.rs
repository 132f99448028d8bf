//! The comparison family `ψ_r(a; ·)`.
//!
//! `ψ_1(a; ·)` rises linearly from `-1` to `0` on `[0, 1]`, stays at `0` on the
//! plateau `[1, a + 1]`, rises to `1` on `[a + 1, a + 2]`, and is continued
//! evenly and then `(4 + 2a)`-periodically. `ψ_r` is its `(r - 1)`-fold
//! zero-mean periodic antiderivative, so `ψ_r' = ψ_{r-1}`. At `a = 0` the
//! family is a rescaled Euler perfect spline.

use std::sync::OnceLock;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::ppoly::{PeriodicPiecewisePoly, PpolyError};

/// Largest supported order. Beyond this, repeated integration in binary64
/// no longer keeps the stitching invariant.
pub const MAX_ORDER: usize = 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PsiError {
    #[error("plateau parameter must be finite and >= 0, got {0}")]
    NegativePlateau(f64),
    #[error("order must lie in 1..={max}, got {0}", max = MAX_ORDER)]
    OrderOutOfRange(usize),
    #[error("landmarks need order >= 2, got {0}")]
    OrderTooLow(usize),
    #[error(transparent)]
    Ppoly(#[from] PpolyError),
}

/// Period `4 + 2a` of `ψ_r(a; ·)`.
pub fn period(a: f64) -> f64 {
    4.0 + 2.0 * a
}

/// `ψ_1(a; ·)` laid out on `[0, 4 + 2a)` with the mirrored half built
/// explicitly. For `a = 0` the plateau pieces are dropped.
pub fn build_psi1(a: f64) -> Result<PeriodicPiecewisePoly, PsiError> {
    if !(a.is_finite() && a >= 0.0) {
        return Err(PsiError::NegativePlateau(a));
    }
    let breakpoints = vec![
        0.0,
        1.0,
        a + 1.0,
        a + 2.0,
        a + 3.0,
        2.0 * a + 3.0,
        2.0 * a + 4.0,
    ];
    let pieces = vec![
        vec![-1.0, 1.0],
        vec![0.0],
        vec![0.0, 1.0],
        vec![1.0, -1.0],
        vec![0.0],
        vec![0.0, -1.0],
    ];
    Ok(PeriodicPiecewisePoly::new(period(a), breakpoints, pieces, 0)?)
}

/// `ψ_r(a; ·)` together with its derivative chain `ψ_{r-1}, …, ψ_1`.
#[derive(Debug, Clone)]
pub struct PsiSpline {
    a: f64,
    r: usize,
    /// `chain[s - 1]` is `ψ_s(a; ·)`.
    chain: Vec<PeriodicPiecewisePoly>,
    norm_cache: Vec<OnceLock<f64>>,
}

impl Serialize for PsiSpline {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("PsiSpline", 3)?;
        st.serialize_field("a", &self.a)?;
        st.serialize_field("r", &self.r)?;
        st.serialize_field("f", self.f())?;
        st.end()
    }
}

/// Builds `ψ_r(a; ·)` by `r - 1` zero-mean integrations of `ψ_1(a; ·)`.
pub fn build_psi(a: f64, r: usize) -> Result<PsiSpline, PsiError> {
    if r == 0 || r > MAX_ORDER {
        return Err(PsiError::OrderOutOfRange(r));
    }
    let mut chain = Vec::with_capacity(r);
    chain.push(build_psi1(a)?);
    for _ in 1..r {
        let next = chain.last().unwrap().antiderivative_zero_mean()?;
        chain.push(next);
    }
    Ok(PsiSpline {
        a,
        r,
        chain,
        norm_cache: (0..r).map(|_| OnceLock::new()).collect(),
    })
}

/// `N_s(a) = ‖ψ_s(a; ·)‖`.
pub fn psi_norm(a: f64, s: usize) -> Result<f64, PsiError> {
    Ok(build_psi(a, s)?.norm())
}

impl PsiSpline {
    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn order(&self) -> usize {
        self.r
    }

    pub fn period(&self) -> f64 {
        period(self.a)
    }

    /// The function `ψ_r(a; ·)` itself.
    pub fn f(&self) -> &PeriodicPiecewisePoly {
        &self.chain[self.r - 1]
    }

    /// `ψ_r^{(s)} = ψ_{r-s}` for `s < r`.
    ///
    /// # Panics
    /// If `s >= r`.
    pub fn derivative(&self, s: usize) -> &PeriodicPiecewisePoly {
        assert!(s < self.r, "derivative order {s} out of range for r = {}", self.r);
        &self.chain[self.r - 1 - s]
    }

    /// `‖ψ_{r-s}(a; ·)‖`, cached per `s`.
    pub fn derivative_norm(&self, s: usize) -> f64 {
        *self.norm_cache[s].get_or_init(|| self.derivative(s).sup_norm())
    }

    /// `‖ψ_r(a; ·)‖`.
    pub fn norm(&self) -> f64 {
        self.derivative_norm(0)
    }

    /// The two zeros of `ψ_r` on `[0, 4 + 2a)`.
    pub fn zeros(&self) -> [f64; 2] {
        zero_abscissae(self.a, self.r)
    }

    /// Zeros and extrema of `ψ_r` on one period.
    pub fn landmarks(&self) -> Result<Landmarks, PsiError> {
        if self.r < 2 {
            return Err(PsiError::OrderTooLow(self.r));
        }
        let extrema = zero_abscissae(self.a, self.r - 1).map(|t| (t, self.f().evaluate(t)));
        Ok(Landmarks {
            zeros: self.zeros().to_vec(),
            extrema: extrema.to_vec(),
        })
    }
}

/// Zeros of `ψ_r(a; ·)` for `r >= 2`; for `r = 1` the midpoints of the two
/// plateaus, where `ψ_2` has its extrema.
fn zero_abscissae(a: f64, r: usize) -> [f64; 2] {
    if r.is_multiple_of(2) {
        [0.0, a + 2.0]
    } else {
        [1.0 + a / 2.0, 3.0 + 1.5 * a]
    }
}

/// Structural landmarks of `ψ_r(a; ·)` on `[0, 4 + 2a)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Landmarks {
    pub zeros: Vec<f64>,
    /// `(abscissa, value)` at the zeros of `ψ_{r-1}`.
    pub extrema: Vec<(f64, f64)>,
}

/// Free-function form of [`PsiSpline::landmarks`].
pub fn landmarks(psi: &PsiSpline) -> Result<Landmarks, PsiError> {
    psi.landmarks()
}
