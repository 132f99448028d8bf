//! `kolmo`: feasibility checks, parameter solving, extremal sampling, norm
//! tables and Favard constants for the four-norm Kolmogorov problem.
//!
//! Every run prints one JSON envelope `{command, inputs, result, diagnostics}`
//! on stdout, unless `--csv` (or `eval` without `--json`) asks for a table.
//! Exit codes: 0 success, 2 infeasible instance (`check`, `solve`), 1 usage
//! or domain error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kolmo_core::euler::{FavardTable, R_MAX};
use kolmo_core::psi::{psi_norm, MAX_ORDER};
use kolmo_core::verify::{measure_norm, MeasurementConfig};
use kolmo_core::{decide, extremal_norms, FeasibilityReport, PeriodicPiecewisePoly, ProblemInstance};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

const EXIT_OK: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "kolmo", version, about = "Four-norm Kolmogorov problem toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide whether some function realizes the four norms.
    Check(InstanceArgs),
    /// Solve for the comparison function and the extremal function.
    Solve(SolveArgs),
    /// Sample a piecewise polynomial (or one of its derivatives).
    Eval(EvalArgs),
    /// Tabulate sup-norms of the plateau splines.
    Norms(NormsArgs),
    /// Tabulate Favard constants.
    Favard(FavardArgs),
}

#[derive(Debug, Clone, Copy, Default, Args)]
#[group(multiple = false)]
struct Format {
    /// Print the JSON envelope (default).
    #[arg(long)]
    json: bool,
    /// Print a CSV table instead of the envelope.
    #[arg(long)]
    csv: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
struct InstanceArgs {
    /// Highest derivative order (4..=16).
    #[arg(long = "r")]
    r: usize,
    /// Middle derivative order, 0 < k2 < r - 2.
    #[arg(long)]
    k2: usize,
    /// Target sup-norm of x
    #[arg(long, allow_hyphen_values = true)]
    m0: f64,
    /// Target sup-norm of x^(k2)
    #[arg(long, allow_hyphen_values = true)]
    mk2: f64,
    /// Target sup-norm of x^(r-2)
    #[arg(long, allow_hyphen_values = true)]
    mrm2: f64,
    /// Target sup-norm of x^(r)
    #[arg(long, allow_hyphen_values = true)]
    mr: f64,
    #[command(flatten)]
    #[serde(skip)]
    format: Format,
}

#[derive(Debug, Clone, Args, Serialize)]
struct SolveArgs {
    #[command(flatten)]
    #[serde(flatten)]
    instance: InstanceArgs,
    /// Write the extremal function as piecewise-polynomial JSON.
    #[arg(long, value_name = "PATH")]
    emit_extremal: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
struct EvalArgs {
    /// Piecewise-polynomial JSON file.
    #[arg(long, value_name = "PATH")]
    input: PathBuf,
    /// Left end of the sampling interval
    #[arg(long, allow_hyphen_values = true)]
    from: f64,
    /// Right end of the sampling interval (included)
    #[arg(long, allow_hyphen_values = true)]
    to: f64,
    /// Number of uniform samples; 1 samples `--from` only.
    #[arg(long)]
    points: usize,
    /// Derivative order to sample.
    #[arg(long, default_value_t = 0)]
    derivative: usize,
    /// Print the JSON envelope instead of CSV.
    #[arg(long)]
    #[serde(skip)]
    json: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
struct NormsArgs {
    /// Largest order in the table (1..=16).
    #[arg(long = "r")]
    r: usize,
    /// Comma-separated plateau lengths.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    a_grid: Vec<f64>,
    /// Comma-separated orders (default 1..=r).
    #[arg(long, value_delimiter = ',')]
    s_list: Option<Vec<usize>>,
    #[command(flatten)]
    #[serde(skip)]
    format: Format,
}

#[derive(Debug, Clone, Args, Serialize)]
struct FavardArgs {
    /// Largest order (0..=16).
    #[arg(long)]
    max_r: usize,
    #[command(flatten)]
    #[serde(skip)]
    format: Format,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid piecewise polynomial in {path}: {message}")]
    Parse { path: PathBuf, message: String },
}

#[derive(Debug, Serialize)]
struct Envelope {
    command: String,
    inputs: Value,
    result: Value,
    diagnostics: Vec<String>,
}

/// What a successful command prints.
struct Output {
    result: Value,
    diagnostics: Vec<String>,
    /// Replaces the envelope on stdout when present.
    table: Option<String>,
    code: u8,
}

impl Output {
    fn envelope(result: Value, diagnostics: Vec<String>, code: u8) -> Self {
        Self {
            result,
            diagnostics,
            table: None,
            code,
        }
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::from(EXIT_OK);
            }
            let command = argv
                .get(1)
                .filter(|c| ["check", "solve", "eval", "norms", "favard"].contains(&c.as_str()))
                .cloned()
                .unwrap_or_else(|| "kolmo".to_string());
            let message = e.render().to_string();
            emit(&Envelope {
                command,
                inputs: json!({ "argv": &argv[1..] }),
                result: Value::Null,
                diagnostics: vec![message.trim_end().to_string()],
            });
            return ExitCode::from(EXIT_ERROR);
        }
    };

    let (name, inputs) = describe(&cli.command);
    match run(&cli.command) {
        Ok(out) => {
            match out.table {
                Some(table) => print!("{table}"),
                None => emit(&Envelope {
                    command: name.to_string(),
                    inputs,
                    result: out.result,
                    diagnostics: out.diagnostics,
                }),
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            emit(&Envelope {
                command: name.to_string(),
                inputs,
                result: Value::Null,
                diagnostics: vec![e.to_string()],
            });
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn emit(envelope: &Envelope) {
    let text = serde_json::to_string_pretty(envelope).expect("envelope serializes");
    println!("{text}");
}

fn describe(command: &Command) -> (&'static str, Value) {
    let to_value = |v: Result<Value, serde_json::Error>| v.expect("inputs serialize");
    match command {
        Command::Check(a) => ("check", to_value(serde_json::to_value(a))),
        Command::Solve(a) => ("solve", to_value(serde_json::to_value(a))),
        Command::Eval(a) => ("eval", to_value(serde_json::to_value(a))),
        Command::Norms(a) => ("norms", to_value(serde_json::to_value(a))),
        Command::Favard(a) => ("favard", to_value(serde_json::to_value(a))),
    }
}

fn run(command: &Command) -> Result<Output, CliError> {
    match command {
        Command::Check(a) => cmd_check(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Norms(a) => cmd_norms(a),
        Command::Favard(a) => cmd_favard(a),
    }
}

fn instance(a: &InstanceArgs) -> Result<ProblemInstance, CliError> {
    ProblemInstance::new(a.r, a.k2, a.m0, a.mk2, a.mrm2, a.mr)
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn exit_for(report: &FeasibilityReport) -> u8 {
    if report.feasible {
        EXIT_OK
    } else {
        EXIT_INFEASIBLE
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

const REPORT_HEADER: &str =
    "feasible,condition_a_holds,condition_a_margin,condition_b_holds,condition_b_margin,a,b,lambda,psi_cap";

fn report_row(report: &FeasibilityReport) -> String {
    let p = report.params;
    format!(
        "{},{},{},{},{},{},{},{},{}",
        report.feasible,
        report.condition_a.holds,
        report.condition_a.margin,
        report.condition_b.holds,
        report.condition_b.margin,
        opt(p.map(|p| p.a)),
        opt(p.map(|p| p.b)),
        opt(p.map(|p| p.lambda)),
        opt(p.map(|p| p.psi_norm_value)),
    )
}

fn cmd_check(a: &InstanceArgs) -> Result<Output, CliError> {
    let report = decide(&instance(a)?).map_err(|e| CliError::Domain(e.to_string()))?;
    let code = exit_for(&report);
    if a.format.csv {
        return Ok(Output {
            result: Value::Null,
            diagnostics: Vec::new(),
            table: Some(format!("{REPORT_HEADER}\n{}\n", report_row(&report))),
            code,
        });
    }
    let result = serde_json::to_value(&report).expect("report serializes");
    Ok(Output::envelope(result, report.diagnostics.clone(), code))
}

fn cmd_solve(a: &SolveArgs) -> Result<Output, CliError> {
    let inst = instance(&a.instance)?;
    let report = decide(&inst).map_err(|e| CliError::Domain(e.to_string()))?;
    let code = exit_for(&report);
    let mut diagnostics = report.diagnostics.clone();

    let (norms, sampled) = match &report.extremal {
        Some(x) => {
            let norms = extremal_norms(&report).map_err(|e| CliError::Domain(e.to_string()))?;
            let cfg = MeasurementConfig::default();
            let sampled = [0, inst.k2, inst.r - 2, inst.r]
                .into_iter()
                .map(|k| measure_norm(x, k, &cfg))
                .collect::<Result<Vec<f64>, _>>()
                .map_err(|e| CliError::Domain(e.to_string()))?;
            (Some(norms.to_vec()), Some(sampled))
        }
        None => (None, None),
    };

    let mut written = None;
    if let Some(path) = &a.emit_extremal {
        match &report.extremal {
            Some(x) => {
                let text = serde_json::to_string_pretty(x).expect("ppoly serializes");
                fs::write(path, text + "\n").map_err(|source| CliError::Write {
                    path: path.clone(),
                    source,
                })?;
                written = Some(path.display().to_string());
            }
            None => diagnostics.push("no extremal function written: instance is infeasible".into()),
        }
    }

    if a.instance.format.csv {
        let mut header = REPORT_HEADER.to_string();
        let mut row = report_row(&report);
        for (label, values) in [("norm", &norms), ("sampled_norm", &sampled)] {
            for (i, k) in [0, inst.k2, inst.r - 2, inst.r].into_iter().enumerate() {
                header.push_str(&format!(",{label}_{k}"));
                row.push(',');
                row.push_str(&opt(values.as_ref().map(|v| v[i])));
            }
        }
        return Ok(Output {
            result: Value::Null,
            diagnostics,
            table: Some(format!("{header}\n{row}\n")),
            code,
        });
    }

    let mut result = serde_json::to_value(&report).expect("report serializes");
    let obj = result.as_object_mut().expect("report is an object");
    obj.insert("norms".into(), json!(norms));
    obj.insert("sampled_norms".into(), json!(sampled));
    obj.insert("extremal_path".into(), json!(written));
    Ok(Output::envelope(result, diagnostics, code))
}

fn cmd_eval(a: &EvalArgs) -> Result<Output, CliError> {
    let text = fs::read_to_string(&a.input).map_err(|source| CliError::Read {
        path: a.input.clone(),
        source,
    })?;
    let p: PeriodicPiecewisePoly = serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: a.input.clone(),
        message: e.to_string(),
    })?;
    if a.points == 0 {
        return Err(CliError::Usage("--points must be at least 1".into()));
    }
    if !(a.from.is_finite() && a.to.is_finite()) {
        return Err(CliError::Usage("--from and --to must be finite".into()));
    }
    let limit = p.smoothness() + 1;
    if a.derivative > limit {
        return Err(CliError::Usage(format!(
            "--derivative {} exceeds smoothness + 1 = {limit}",
            a.derivative
        )));
    }
    let d = p.nth_derivative(a.derivative);
    let step = if a.points > 1 {
        (a.to - a.from) / (a.points - 1) as f64
    } else {
        0.0
    };
    let rows: Vec<(f64, f64)> = (0..a.points)
        .map(|i| {
            let t = if i + 1 == a.points && a.points > 1 {
                a.to
            } else {
                a.from + i as f64 * step
            };
            (t, d.evaluate(t))
        })
        .collect();

    if a.json {
        let (t, value): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();
        return Ok(Output::envelope(
            json!({ "derivative": a.derivative, "t": t, "value": value }),
            Vec::new(),
            EXIT_OK,
        ));
    }
    let mut table = String::from("t,value\n");
    for (t, v) in rows {
        table.push_str(&format!("{t},{v}\n"));
    }
    Ok(Output {
        result: Value::Null,
        diagnostics: Vec::new(),
        table: Some(table),
        code: EXIT_OK,
    })
}

fn cmd_norms(a: &NormsArgs) -> Result<Output, CliError> {
    if a.r == 0 || a.r > MAX_ORDER {
        return Err(CliError::Usage(format!("--r must lie in 1..={MAX_ORDER}, got {}", a.r)));
    }
    if let Some(bad) = a.a_grid.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(CliError::Usage(format!("--a-grid entries must be finite and >= 0, got {bad}")));
    }
    let orders: Vec<usize> = a.s_list.clone().unwrap_or_else(|| (1..=a.r).collect());
    if let Some(bad) = orders.iter().find(|&&s| s == 0 || s > a.r) {
        return Err(CliError::Usage(format!("--s-list entries must lie in 1..={}, got {bad}", a.r)));
    }
    let mut rows = Vec::with_capacity(orders.len());
    for &s in &orders {
        let norms = a
            .a_grid
            .iter()
            .map(|&x| psi_norm(x, s))
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| CliError::Domain(e.to_string()))?;
        rows.push((s, norms));
    }

    if a.format.csv {
        let mut table = String::from("s,a,norm\n");
        for (s, norms) in &rows {
            for (x, n) in a.a_grid.iter().zip(norms) {
                table.push_str(&format!("{s},{x},{n}\n"));
            }
        }
        return Ok(Output {
            result: Value::Null,
            diagnostics: Vec::new(),
            table: Some(table),
            code: EXIT_OK,
        });
    }
    let rows: Vec<Value> = rows
        .into_iter()
        .map(|(s, norms)| json!({ "s": s, "norms": norms }))
        .collect();
    Ok(Output::envelope(
        json!({ "a_grid": a.a_grid, "rows": rows }),
        Vec::new(),
        EXIT_OK,
    ))
}

fn cmd_favard(a: &FavardArgs) -> Result<Output, CliError> {
    if a.max_r > R_MAX {
        return Err(CliError::Usage(format!("--max-r must be at most {R_MAX}, got {}", a.max_r)));
    }
    let table = FavardTable::get();
    let values = &table.values()[..=a.max_r];
    let bounds = &table.remainder_bounds()[..=a.max_r];

    if a.format.csv {
        let mut text = String::from("r,favard\n");
        for (r, k) in values.iter().enumerate() {
            text.push_str(&format!("{r},{k}\n"));
        }
        return Ok(Output {
            result: Value::Null,
            diagnostics: Vec::new(),
            table: Some(text),
            code: EXIT_OK,
        });
    }
    let rows: Vec<Value> = values
        .iter()
        .zip(bounds)
        .enumerate()
        .map(|(r, (k, b))| json!({ "r": r, "favard": k, "remainder_bound": b }))
        .collect();
    Ok(Output::envelope(json!({ "rows": rows }), Vec::new(), EXIT_OK))
}
