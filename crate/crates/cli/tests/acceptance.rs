//! Acceptance suite: one PASS/FAIL line per criterion, each with its
//! tolerance and runtime limit. Exits non-zero if any criterion fails.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use kolmo_core::euler::{condition_a, euler_spline_fourier};
use kolmo_core::psi::{build_psi, build_psi1, psi_norm};
use kolmo_core::solver::{comparison_function, solve_parameters};
use kolmo_core::verify::{
    comparison_check, k2_bound_check, measure_norm, sinusoid_within_hypothesis, MeasurementConfig,
};
use kolmo_core::{decide, extremal_norms, favard, PeriodicPiecewisePoly, ProblemInstance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    title: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs()
}

// Hand-integrated closed forms of ψ_3, ψ_4 on [0, a+2].

fn psi3_closed(a: f64, t: f64) -> f64 {
    if t <= 1.0 {
        1.0 / 3.0 + a / 4.0 + ((t - 1.0).powi(3) + 1.0) / 6.0 - t / 2.0
    } else if t <= a + 1.0 {
        a / 4.0 - (t - 1.0) / 2.0
    } else {
        let s = t - a - 1.0;
        -a / 4.0 + s.powi(3) / 6.0 - s / 2.0
    }
}

fn psi4_closed(a: f64, t: f64) -> f64 {
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

fn n3(a: f64) -> f64 {
    1.0 / 3.0 + a / 4.0
}

fn n4(a: f64) -> f64 {
    5.0 / 24.0 + a / 4.0 + a * a / 16.0
}

/// `K_2 / K_d^{2/d} · M_k^{2/d} · M_r^{(d−2)/d}` with `d = r − k`.
fn three_norm_bound(mk: f64, mr: f64, k: usize, r: usize) -> f64 {
    let d = (r - k) as f64;
    favard(2).unwrap() / favard(r - k).unwrap().powf(2.0 / d)
        * mk.powf(2.0 / d)
        * mr.powf((d - 2.0) / d)
}

fn random_triple(rng: &mut impl Rng, k: usize, r: usize) -> (f64, f64, f64) {
    let mr: f64 = rng.gen_range(0.2..5.0);
    let mrm2: f64 = rng.gen_range(0.2..5.0);
    let d = (r - k) as f64;
    let floor = (mrm2 * favard(r - k).unwrap().powf(2.0 / d)
        / (favard(2).unwrap() * mr.powf((d - 2.0) / d)))
    .powf(d / 2.0);
    (floor * rng.gen_range(1.0..4.0), mrm2, mr)
}

fn psi2_norm() -> Outcome {
    let mut worst: f64 = 0.0;
    for a in [0.0, 0.25, 1.0, 3.0, 10.0] {
        let n = build_psi(a, 2).map_err(|e| e.to_string())?.norm();
        worst = worst.max((n - 0.5).abs());
    }
    ensure(worst <= 1e-12, || format!("max |N_2 - 1/2| = {worst:e}"))?;
    Ok(format!("max deviation {worst:e} <= 1e-12"))
}

fn psi1_slope() -> Outcome {
    let mut worst: f64 = 0.0;
    for a in [0.0, 0.25, 1.0, 3.0, 10.0] {
        let d = build_psi1(a).map_err(|e| e.to_string())?.derivative();
        worst = worst.max((d.sup_norm() - 1.0).abs());
    }
    ensure(worst <= 1e-12, || format!("max |‖ψ1'‖ - 1| = {worst:e}"))?;
    Ok(format!("max deviation {worst:e} <= 1e-12"))
}

fn zero_landmarks() -> Outcome {
    let mut worst: f64 = 0.0;
    for r in 2..=8 {
        for a in [0.0, 1.0, 5.0] {
            let psi = build_psi(a, r).map_err(|e| e.to_string())?;
            let zeros = if r % 2 == 0 {
                [0.0, a + 2.0]
            } else {
                [1.0 + a / 2.0, 3.0 + 1.5 * a]
            };
            for z in zeros {
                worst = worst.max(psi.f().evaluate(z).abs());
            }
        }
    }
    ensure(worst <= 1e-10, || format!("max |ψ_r(z)| = {worst:e}"))?;
    Ok(format!("max |ψ_r(a; z)| = {worst:e} <= 1e-10"))
}

fn euler_degeneration() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut worst_bound: f64 = 0.0;
    for r in 2..=5 {
        let psi = build_psi(0.0, r).map_err(|e| e.to_string())?;
        let scale = (PI / 2.0).powi(-(r as i32));
        for i in 0..400 {
            let t = 4.0 * i as f64 / 400.0;
            let phi = euler_spline_fourier(r, PI * t / 2.0, 100_000);
            worst = worst.max((psi.f().evaluate(t) - scale * phi.value).abs());
            worst_bound = worst_bound.max(scale * phi.remainder_bound);
        }
    }
    ensure(worst <= 1e-8, || format!("deviation {worst:e}"))?;
    ensure(worst_bound <= 1e-8, || format!("certified remainder {worst_bound:e}"))?;
    Ok(format!("deviation {worst:e}, certified remainder {worst_bound:e}, both <= 1e-8"))
}

fn closed_form_norms() -> Outcome {
    let mut worst: f64 = 0.0;
    let n = 1_000_000;
    for a in [0.0, 0.5, 1.0, 2.0, 4.0] {
        let len = a + 2.0;
        let mut m3: f64 = 0.0;
        let mut m4: f64 = 0.0;
        for i in 0..=n {
            let t = len * i as f64 / n as f64;
            m3 = m3.max(psi3_closed(a, t).abs());
            m4 = m4.max(psi4_closed(a, t).abs());
        }
        let (c3, c4) = (psi_norm(a, 3).unwrap(), psi_norm(a, 4).unwrap());
        for d in [c3 - n3(a), c4 - n4(a), m3 - n3(a), m4 - n4(a)] {
            worst = worst.max(d.abs());
        }
    }
    ensure(worst <= 1e-10, || format!("max deviation {worst:e}"))?;
    Ok(format!("N_3, N_4 vs closed forms and 10^6-point sampling: {worst:e} <= 1e-10"))
}

fn solver_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (r, k) in [(4, 1), (5, 1), (5, 2), (6, 2), (6, 3)] {
        for _ in 0..100 {
            let (mk, mrm2, mr) = random_triple(&mut rng, k, r);
            let p = solve_parameters(mk, mrm2, mr, k, r).map_err(|e| format!("({mk}, {mrm2}, {mr}): {e}"))?;
            let psi = comparison_function(p.a, p.b, p.lambda, r).map_err(|e| e.to_string())?;
            for (order, target) in [(k, mk), (r - 2, mrm2), (r, mr)] {
                let got = psi.nth_derivative(order).sup_norm();
                worst = worst.max(rel(got, target));
            }
            count += 1;
        }
    }
    ensure(worst <= 1e-8, || format!("worst relative error {worst:e}"))?;
    Ok(format!("{count} triples, worst relative error {worst:e} <= 1e-8"))
}

fn feasibility_end_to_end() -> Outcome {
    let worked = ProblemInstance::new(4, 1, 1.0, 7.0 / 12.0, 0.5, 1.0).map_err(|e| e.to_string())?;
    let report = decide(&worked).map_err(|e| e.to_string())?;
    ensure(report.feasible, || "worked instance not feasible".into())?;
    let p = report.params.ok_or("missing parameters")?;
    ensure((p.a - 1.0).abs() <= 1e-10 && p.b == 1.0 && p.lambda == 1.0, || {
        format!("(a, b, λ) = ({}, {}, {})", p.a, p.b, p.lambda)
    })?;
    ensure((report.psi_cap - 25.0 / 48.0).abs() <= 1e-10, || format!("psi_cap = {}", report.psi_cap))?;
    let norms = extremal_norms(&report).map_err(|e| e.to_string())?;
    let worst = norms
        .iter()
        .zip(worked.targets())
        .map(|(g, t)| rel(*g, t))
        .fold(0.0, f64::max);
    ensure(worst <= 1e-8, || format!("extremal norms {norms:?}"))?;

    let edge = solve_parameters(1.0 / 3.0, 0.5, 1.0, 1, 4).map_err(|e| e.to_string())?;
    ensure(edge.a <= 1e-8, || format!("boundary a = {}", edge.a))?;

    let low_m0 = decide(&ProblemInstance { m0: 0.4, ..worked }).map_err(|e| e.to_string())?;
    let want_b = 0.4 - n4(1.0);
    ensure(
        !low_m0.feasible && low_m0.condition_a.holds && !low_m0.condition_b.holds
            && (low_m0.condition_b.margin - want_b).abs() <= 1e-10,
        || format!("M0 = 0.4: margin b = {}", low_m0.condition_b.margin),
    )?;

    let low_mk = decide(&ProblemInstance { mk2: 0.2, ..worked }).map_err(|e| e.to_string())?;
    let want_a = three_norm_bound(0.2, 1.0, 1, 4) - 0.5;
    ensure(
        !low_mk.feasible && !low_mk.condition_a.holds
            && (low_mk.condition_a.margin - want_a).abs() <= 1e-10,
        || format!("Mk2 = 0.2: margin a = {} vs {want_a}", low_mk.condition_a.margin),
    )?;
    let ca = condition_a(7.0 / 12.0, 0.5, 1.0, 1, 4).map_err(|e| e.to_string())?;
    ensure((ca.bound - three_norm_bound(7.0 / 12.0, 1.0, 1, 4)).abs() <= 1e-12, || {
        format!("three-norm bound {}", ca.bound)
    })?;
    Ok(format!(
        "worked (1, 1, 1), psi_cap 25/48, norms within {worst:e}; boundary a = {:e}; margins {:.6}, {:.6}",
        edge.a, low_m0.condition_b.margin, low_mk.condition_a.margin
    ))
}

fn comparison_suite() -> Outcome {
    let cfg = MeasurementConfig {
        grid_points: 4000,
        ..MeasurementConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut sinusoids = 0;
    let mut copies = 0;
    let mut worst = f64::NEG_INFINITY;
    for r in 4..=6 {
        let mut comparison = Vec::new();
        for _ in 0..4 {
            let k = rng.gen_range(1..r - 2);
            let (mk, mrm2, mr) = random_triple(&mut rng, k, r);
            let p = solve_parameters(mk, mrm2, mr, k, r).map_err(|e| e.to_string())?;
            comparison.push(comparison_function(p.a, p.b, p.lambda, r).map_err(|e| e.to_string())?);
        }
        let check = |x: &PeriodicPiecewisePoly, psi: &PeriodicPiecewisePoly| -> Result<f64, String> {
            let out = comparison_check(x, psi, r, &[], &cfg).map_err(|e| e.to_string())?;
            ensure(out.ok, || format!("r = {r}: violation {:e} at {}", out.worst_violation, out.worst_at))?;
            for k2 in 1..r - 2 {
                let b = k2_bound_check(x, psi, k2, r).map_err(|e| e.to_string())?;
                ensure(b.ok, || format!("r = {r}, k2 = {k2}: {} > {}", b.lhs, b.rhs))?;
            }
            Ok(out.worst_violation)
        };
        for i in 0..100 {
            let psi = &comparison[i % comparison.len()];
            let rate = psi.derivative().sup_norm() / psi.sup_norm();
            let omega = rate * rng.gen_range(0.2..3.0);
            let x = sinusoid_within_hypothesis(psi, r, omega, rng.gen_range(0.3..0.999))
                .map_err(|e| e.to_string())?;
            worst = worst.max(check(&x, psi)?);
            sinusoids += 1;
        }
        for psi in &comparison {
            for c in [0.25, 0.5, 0.9, 1.0] {
                worst = worst.max(check(&psi.scale(c, 1.0).map_err(|e| e.to_string())?, psi)?);
                copies += 1;
            }
            for _ in 0..4 {
                let shifted = psi.translate(rng.gen_range(0.0..psi.period()));
                worst = worst.max(check(&shifted, psi)?);
                copies += 1;
            }
        }
    }
    Ok(format!(
        "{sinusoids} sinusoids, {copies} scaled/shifted copies, worst violation {worst:e} (<= ε_cmp)"
    ))
}

fn cross_oracle() -> Outcome {
    let cfg = MeasurementConfig::default();
    let mut worst: f64 = 0.0;
    for r in [3, 4] {
        for a in [0.0, 0.5, 1.0, 2.0, 4.0] {
            let psi = build_psi(a, r).map_err(|e| e.to_string())?;
            for k in 0..=r {
                let exact = psi.f().nth_derivative(k).sup_norm();
                let measured = measure_norm(psi.f(), k, &cfg).map_err(|e| e.to_string())?;
                worst = worst.max((measured - exact).abs() / (1.0 + exact));
            }
        }
    }
    ensure(worst <= 1e-5, || format!("worst scaled gap {worst:e}"))?;
    Ok(format!("worst |measured - analytic| / (1 + norm) = {worst:e} <= 1e-5"))
}

fn cli_contract() -> Outcome {
    let schema = schema();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("extremal.json");
    let p = path.to_str().ok_or("temp path")?;
    let low_m0 = worked_with("--m0", "0.4");
    let low_mk = worked_with("--mk2", "0.2");
    let low_m0: Vec<&str> = low_m0.iter().map(String::as_str).collect();
    let low_mk: Vec<&str> = low_mk.iter().map(String::as_str).collect();

    let cases: Vec<(Vec<&str>, i32, bool)> = vec![
        ([&["check"], &WORKED[..]].concat(), 0, true),
        ([&["solve"], &WORKED[..], &["--emit-extremal", p]].concat(), 0, true),
        (vec!["eval", "--input", p, "--from", "0", "--to", "6", "--points", "7", "--json"], 0, true),
        (vec!["eval", "--input", p, "--from", "0", "--to", "6", "--points", "7"], 0, false),
        (vec!["norms", "--r", "4", "--a-grid", "0,1"], 0, true),
        (vec!["norms", "--r", "4", "--a-grid", "0,1", "--csv"], 0, false),
        (vec!["favard", "--max-r", "16"], 0, true),
        (vec!["favard", "--max-r", "3", "--csv"], 0, false),
        ([&["check"], &low_m0[..]].concat(), 2, true),
        ([&["check"], &low_mk[..]].concat(), 2, true),
        ([&["solve"], &low_m0[..]].concat(), 2, true),
        ([&["solve"], &low_mk[..]].concat(), 2, true),
        (vec!["check", "--r", "3", "--k2", "1", "--m0", "1", "--mk2", "1", "--mrm2", "1", "--mr", "1"], 1, true),
        (vec!["favard"], 1, true),
    ];
    for (argv, code, is_json) in &cases {
        let first = kolmo(argv);
        let second = kolmo(argv);
        ensure(first.code == *code, || format!("{argv:?}: exit {} != {code}", first.code))?;
        ensure(first.stdout == second.stdout && first.code == second.code, || {
            format!("{argv:?}: output differs between runs")
        })?;
        if *is_json {
            let errors = schema_errors(&schema, &first.json());
            ensure(errors.is_empty(), || format!("{argv:?}: {errors:?}"))?;
        }
    }
    Ok(format!("{} invocations deterministic, schema-valid, exit codes as specified", cases.len()))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, title: "‖ψ2(a;·)‖ = 1/2", limit: Duration::from_secs(1), run: psi2_norm },
        Criterion { id: 2, title: "‖ψ1'(a;·)‖ = 1", limit: Duration::from_secs(1), run: psi1_slope },
        Criterion { id: 3, title: "zero landmarks of ψ_r", limit: Duration::from_secs(5), run: zero_landmarks },
        Criterion { id: 4, title: "ψ_r(0;·) is the rescaled Euler spline", limit: Duration::from_secs(10), run: euler_degeneration },
        Criterion { id: 5, title: "closed forms of N_3 and N_4", limit: Duration::from_secs(5), run: closed_form_norms },
        Criterion { id: 6, title: "three-norm solver round trip", limit: Duration::from_secs(60), run: solver_round_trip },
        Criterion { id: 7, title: "four-norm feasibility end to end", limit: Duration::from_secs(5), run: feasibility_end_to_end },
        Criterion { id: 8, title: "comparison and k2-bound property suite", limit: Duration::from_secs(120), run: comparison_suite },
        Criterion { id: 9, title: "finite-difference vs analytic norms", limit: Duration::from_secs(30), run: cross_oracle },
        Criterion { id: 10, title: "CLI determinism, schema and exit codes", limit: Duration::from_secs(5), run: cli_contract },
    ];

    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let (status, detail) = match outcome {
            Ok(detail) if elapsed <= c.limit => ("PASS", detail),
            Ok(detail) => ("FAIL", format!("{detail}; too slow, limit {:?}", c.limit)),
            Err(reason) => ("FAIL", reason),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!(
            "[{status}] criterion {:>2}: {} | {detail} | {:.3} s",
            c.id,
            c.title,
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
