//! Feasibility and construction for the four-norm problem
//! `‖x‖ = M_0, ‖x^{(k₂)}‖ = M_{k₂}, ‖x^{(r−2)}‖ = M_{r−2}, ‖x^{(r)}‖ = M_r`.
//!
//! For a triple `(M_k, M_{r−2}, M_r)` the comparison function is
//! `Ψ(t) = b·ψ_r(a; λt)` with `λ = √(M_r / (2 M_{r−2}))` and `b = M_r / λ^r`.
//! These two choices fix `‖Ψ^{(r)}‖ = M_r` and `‖Ψ^{(r−2)}‖ = M_{r−2}` for every
//! plateau `a`; `a` is then the unique root of
//! `g(a) = b·λ^k·N_{r−k}(a) − M_k`, which is increasing in `a`.

use serde::Serialize;
use thiserror::Error;

use crate::euler::{self, Condition, EulerError};
use crate::ppoly::{PeriodicPiecewisePoly, PpolyError};
use crate::psi::{self, PsiError, PsiSpline};

/// Iteration cap for the plateau bisection.
pub const MAX_BISECTION_STEPS: usize = 200;

/// Upper limit for the bracket expansion in `a`.
const MAX_PLATEAU: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("triple violates the three-norm inequality (margin {margin:e})")]
    InfeasibleTriple { margin: f64 },
    #[error("plateau bisection did not converge: bracket [{lo}, {hi}] after {steps} steps")]
    NoConvergence { lo: f64, hi: f64, steps: usize },
    #[error("norm of the k-th derivative is not monotone in a near a = {a}")]
    NonMonotone { a: f64 },
    #[error("report is not feasible")]
    NotFeasible,
    #[error(transparent)]
    Euler(#[from] EulerError),
    #[error(transparent)]
    Psi(#[from] PsiError),
    #[error(transparent)]
    Ppoly(#[from] PpolyError),
}

/// Input to the four-norm problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProblemInstance {
    pub r: usize,
    pub k2: usize,
    pub m0: f64,
    pub mk2: f64,
    pub mrm2: f64,
    pub mr: f64,
}

impl ProblemInstance {
    pub fn new(r: usize, k2: usize, m0: f64, mk2: f64, mrm2: f64, mr: f64) -> Result<Self, SolverError> {
        let inst = Self {
            r,
            k2,
            m0,
            mk2,
            mrm2,
            mr,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        validate_orders(self.k2, self.r)?;
        for (name, v) in [
            ("m0", self.m0),
            ("mk2", self.mk2),
            ("mrm2", self.mrm2),
            ("mr", self.mr),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(SolverError::InvalidInstance(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// All four targets multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            m0: c * self.m0,
            mk2: c * self.mk2,
            mrm2: c * self.mrm2,
            mr: c * self.mr,
            ..*self
        }
    }

    pub fn targets(&self) -> [f64; 4] {
        [self.m0, self.mk2, self.mrm2, self.mr]
    }
}

fn validate_orders(k: usize, r: usize) -> Result<(), SolverError> {
    if !(4..=psi::MAX_ORDER).contains(&r) {
        return Err(SolverError::InvalidInstance(format!(
            "r must lie in 4..={}, got {r}",
            psi::MAX_ORDER
        )));
    }
    if k == 0 || k + 2 >= r {
        return Err(SolverError::InvalidInstance(format!(
            "k2 must satisfy 0 < k2 < r - 2 = {}, got {k}",
            r - 2
        )));
    }
    Ok(())
}

/// Parameters of `Ψ(t) = b·ψ_r(a; λt)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolvedParameters {
    pub a: f64,
    pub b: f64,
    #[serde(rename = "lambda")]
    pub lambda: f64,
    /// `‖Ψ‖ = b·N_r(a)`.
    #[serde(skip)]
    pub psi_norm_value: f64,
}

/// `λ = √(M_r / (2 M_{r−2}))`, `b = M_r / λ^r`.
pub fn scale_parameters(mrm2: f64, mr: f64, r: usize) -> (f64, f64) {
    let lambda = (mr / (2.0 * mrm2)).sqrt();
    let b = mr / lambda.powi(r as i32);
    (b, lambda)
}

/// The comparison function `b·ψ_r(a; λ·)`.
pub fn comparison_function(a: f64, b: f64, lambda: f64, r: usize) -> Result<PeriodicPiecewisePoly, SolverError> {
    let psi = psi::build_psi(a, r)?;
    Ok(psi.f().scale(b, lambda)?)
}

/// Finds `(a, b, λ)` such that `b·ψ_r(a; λ·)` has derivative norms
/// `mk, mrm2, mr` at orders `k, r−2, r`.
pub fn solve_parameters(mk: f64, mrm2: f64, mr: f64, k: usize, r: usize) -> Result<SolvedParameters, SolverError> {
    validate_orders(k, r)?;
    let cond = euler::condition_a(mk, mrm2, mr, k, r)?;
    if !cond.holds {
        return Err(SolverError::InfeasibleTriple { margin: cond.margin });
    }
    let (b, lambda) = scale_parameters(mrm2, mr, r);
    let amplitude = b * lambda.powi(k as i32);
    let g = |a: f64| -> Result<(f64, PsiSpline), SolverError> {
        let psi = psi::build_psi(a, r)?;
        Ok((amplitude * psi.derivative_norm(k) - mk, psi))
    };
    let (g0, psi0) = g(0.0)?;
    let tol0 = 1e-12 * (1.0 + mk);
    if g0 >= -tol0 {
        // equality in the three-norm inequality
        return Ok(finish(0.0, b, lambda, &psi0));
    }

    let mut lo = 0.0;
    let mut g_lo = g0;
    let mut hi = 1.0;
    let (mut g_hi, mut psi_hi) = g(hi)?;
    while g_hi < 0.0 {
        if g_hi < g_lo {
            return Err(SolverError::NonMonotone { a: hi });
        }
        lo = hi;
        g_lo = g_hi;
        hi *= 2.0;
        if hi > MAX_PLATEAU {
            return Err(SolverError::NoConvergence { lo, hi, steps: 0 });
        }
        (g_hi, psi_hi) = g(hi)?;
    }
    if g_hi == 0.0 {
        return Ok(finish(hi, b, lambda, &psi_hi));
    }

    for _ in 0..MAX_BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-12 * (1.0 + mid) {
            let (_, psi) = g(mid)?;
            return Ok(finish(mid, b, lambda, &psi));
        }
        let (g_mid, _) = g(mid)?;
        if g_mid < g_lo || g_mid > g_hi {
            return Err(SolverError::NonMonotone { a: mid });
        }
        if g_mid < 0.0 {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
            g_hi = g_mid;
        }
    }
    Err(SolverError::NoConvergence {
        lo,
        hi,
        steps: MAX_BISECTION_STEPS,
    })
}

fn finish(a: f64, b: f64, lambda: f64, psi: &PsiSpline) -> SolvedParameters {
    SolvedParameters {
        a,
        b,
        lambda,
        psi_norm_value: b * psi.norm(),
    }
}

/// `‖Ψ_r(M_k, M_{r−2}, M_r)‖ = b·N_r(a)` for the solved parameters.
pub fn psi_cap(mk: f64, mrm2: f64, mr: f64, k: usize, r: usize) -> Result<f64, SolverError> {
    Ok(solve_parameters(mk, mrm2, mr, k, r)?.psi_norm_value)
}

/// Verdict for one instance.
#[derive(Debug, Clone)]
pub struct FeasibilityReport {
    pub instance: ProblemInstance,
    pub condition_a: Condition,
    /// When condition a) fails this is computed with `a = 0` and is only
    /// diagnostic.
    pub condition_b: Condition,
    pub feasible: bool,
    pub params: Option<SolvedParameters>,
    /// `‖Ψ_r(M_{k₂}, M_{r−2}, M_r)‖`, or its `a = 0` value when condition a) fails.
    pub psi_cap: f64,
    pub extremal: Option<PeriodicPiecewisePoly>,
    pub diagnostics: Vec<String>,
}

#[derive(Serialize)]
struct ConditionJson {
    holds: bool,
    margin: f64,
}

#[derive(Serialize)]
struct ReportJson {
    feasible: bool,
    condition_a: ConditionJson,
    condition_b: ConditionJson,
    params: Option<SolvedParameters>,
    psi_cap: Option<f64>,
}

impl Serialize for FeasibilityReport {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ReportJson {
            feasible: self.feasible,
            condition_a: ConditionJson {
                holds: self.condition_a.holds,
                margin: self.condition_a.margin,
            },
            condition_b: ConditionJson {
                holds: self.condition_b.holds,
                margin: self.condition_b.margin,
            },
            params: self.params,
            psi_cap: self.params.map(|p| p.psi_norm_value),
        }
        .serialize(serializer)
    }
}

/// Decides whether some function realizes all four norms and, if so, builds
/// `x(t) = Ψ(t) + M_0 − ‖Ψ‖`.
pub fn decide(inst: &ProblemInstance) -> Result<FeasibilityReport, SolverError> {
    inst.validate()?;
    let (r, k) = (inst.r, inst.k2);
    let condition_a = euler::condition_a(inst.mk2, inst.mrm2, inst.mr, k, r)?;
    let mut diagnostics = Vec::new();

    let params = if condition_a.holds {
        Some(solve_parameters(inst.mk2, inst.mrm2, inst.mr, k, r)?)
    } else {
        None
    };
    let psi_cap = match params {
        Some(p) => p.psi_norm_value,
        None => {
            let (b, _) = scale_parameters(inst.mrm2, inst.mr, r);
            diagnostics.push(
                "condition a) fails; condition b) evaluated with plateau a = 0 for diagnostics only"
                    .to_string(),
            );
            b * psi::psi_norm(0.0, r)?
        }
    };
    let condition_b = Condition::lower(inst.m0, psi_cap);
    let feasible = condition_a.holds && condition_b.holds;

    let extremal = match params {
        Some(p) if feasible => {
            let psi = comparison_function(p.a, p.b, p.lambda, r)?;
            Some(psi.add_constant(inst.m0 - psi_cap))
        }
        _ => None,
    };
    Ok(FeasibilityReport {
        instance: *inst,
        condition_a,
        condition_b,
        feasible,
        params,
        psi_cap,
        extremal,
        diagnostics,
    })
}

/// `(‖x‖, ‖x^{(k₂)}‖, ‖x^{(r−2)}‖, ‖x^{(r)}‖)` of the extremal function.
pub fn extremal_norms(report: &FeasibilityReport) -> Result<[f64; 4], SolverError> {
    let x = match (&report.extremal, report.feasible) {
        (Some(x), true) => x,
        _ => return Err(SolverError::NotFeasible),
    };
    let inst = &report.instance;
    let mut norms = [0.0; 4];
    let mut current = x.clone();
    let mut order = 0;
    for (slot, target) in [0, inst.k2, inst.r - 2, inst.r].into_iter().enumerate() {
        while order < target {
            current = current.derivative();
            order += 1;
        }
        norms[slot] = current.sup_norm();
    }
    Ok(norms)
}
