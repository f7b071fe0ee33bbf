//! Command-line front end for the jpvi library.
//!
//! Subcommands expose the verification suites and computations over a
//! single t or a t-grid, with deterministic JSON or CSV output. Exit
//! code 0 means every residual met the tolerance, 1 means at least one
//! exceeded it, 2 means a usage or domain error.

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use jpvi::gap::{asymptotic_check, asymptotic_constant, gap_gram, gap_hankel};
use jpvi::identities::run_suite;
use jpvi::moments::{moment, WeightParams};
use jpvi::numerics::{self, real, real_from_str, Real, DEFAULT_PREC};
use jpvi::painleve::{pvi_integrate, sigma_trace, wn_from_pipeline, PviSystem};
use jpvi::specfun::SpecFunConfig;

#[derive(Parser)]
#[command(
    name = "jpvi",
    version,
    about = "Hankel determinants, orthogonal polynomials and Painlevé VI residuals \
             for the jump-perturbed Jacobi weight"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sigma-form residual of the shifted Hankel log-derivative
    SigmaCheck {
        #[command(flatten)]
        weight: WeightArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Ladder-operator and Toda identity suite, one record per equation tag
    Identities {
        #[command(flatten)]
        weight: WeightArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Gap probability by two independent routes
    Gap {
        #[command(flatten)]
        jacobi: JacobiArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Independent PVI integration against the pipeline trajectory
    PviCompare {
        #[command(flatten)]
        weight: WeightArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Closed-form t -> 1 constant against numerical extrapolation
    Asymptotics {
        #[command(flatten)]
        jacobi: JacobiArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Moment values of the jump-perturbed weight
    Moments {
        #[command(flatten)]
        weight: WeightArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args, Clone)]
struct WeightArgs {
    /// Matrix dimension / polynomial degree
    #[arg(long)]
    n: usize,
    /// Exponent of x (decimal string)
    #[arg(long)]
    alpha: String,
    /// Exponent of 1-x (decimal string)
    #[arg(long)]
    beta: String,
    /// Weight factor left of the jump
    #[arg(long = "A", default_value = "1", allow_hyphen_values = true)]
    a: String,
    /// Jump height at x = t
    #[arg(long = "B", default_value = "1", allow_hyphen_values = true)]
    b: String,
}

#[derive(Args, Clone)]
struct JacobiArgs {
    /// Matrix dimension / polynomial degree
    #[arg(long)]
    n: usize,
    /// Exponent of x (decimal string)
    #[arg(long)]
    alpha: String,
    /// Exponent of 1-x (decimal string)
    #[arg(long)]
    beta: String,
}

#[derive(Args, Clone)]
struct GridArgs {
    /// Single evaluation point in (0,1)
    #[arg(long, conflicts_with = "t_grid")]
    t: Option<String>,
    /// Evenly spaced grid start:stop:count with endpoints in (0,1)
    #[arg(long = "t-grid")]
    t_grid: Option<String>,
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Working precision in bits (default from JPVI_PREC_BITS or 256)
    #[arg(long)]
    prec: Option<u32>,
    /// Pass/fail threshold on the worst residual (decimal string)
    #[arg(long, default_value = "1e-18")]
    tol: String,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Output path (default standard output)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy)]
enum Format {
    Json,
    Csv,
}

struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, UsageError>;

/// One column is either numeric (rendered bare in JSON) or text.
#[derive(Clone, Copy)]
enum Col {
    Num,
    Text,
}

struct Report {
    params: Vec<(&'static str, String, Col)>,
    header: Vec<(&'static str, Col)>,
    rows: Vec<Vec<String>>,
    worst: Real,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(pass) => {
            if pass {
                ExitCode::from(0)
            } else {
                ExitCode::from(1)
            }
        }
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> CliResult<bool> {
    let (report, output) = match cli.cmd {
        Cmd::SigmaCheck {
            weight,
            grid,
            output,
        } => (cmd_sigma(&weight, &grid, &output)?, output),
        Cmd::Identities {
            weight,
            grid,
            output,
        } => (cmd_identities(&weight, &grid, &output)?, output),
        Cmd::Gap {
            jacobi,
            grid,
            output,
        } => (cmd_gap(&jacobi, &grid, &output)?, output),
        Cmd::PviCompare {
            weight,
            grid,
            output,
        } => (cmd_pvi(&weight, &grid, &output)?, output),
        Cmd::Asymptotics { jacobi, output } => (cmd_asymptotics(&jacobi, &output)?, output),
        Cmd::Moments {
            weight,
            grid,
            output,
        } => (cmd_moments(&weight, &grid, &output)?, output),
    };

    let prec = resolve_prec(&output)?;
    let tol = parse_real(&output.tol, prec)?;
    let rendered = match output.format {
        Format::Json => render_json(&report, prec),
        Format::Csv => render_csv(&report),
    };
    match &output.out {
        Some(path) => {
            let mut f = std::fs::File::create(path)?;
            f.write_all(rendered.as_bytes())?;
        }
        None => {
            print!("{rendered}");
        }
    }
    Ok(report.worst <= tol)
}

fn resolve_prec(output: &OutputArgs) -> CliResult<u32> {
    let prec = match output.prec {
        Some(p) => p,
        None => match std::env::var("JPVI_PREC_BITS") {
            Ok(s) => s
                .parse::<u32>()
                .map_err(|_| UsageError(format!("JPVI_PREC_BITS is not an integer: {s}")))?,
            Err(_) => DEFAULT_PREC,
        },
    };
    if prec < 64 {
        return Err(UsageError(format!("precision must be at least 64 bits, got {prec}")));
    }
    Ok(prec)
}

fn parse_real(s: &str, prec: u32) -> CliResult<Real> {
    real_from_str(prec, s).ok_or_else(|| UsageError(format!("not a decimal number: {s}")))
}

fn parse_grid(grid: &GridArgs, prec: u32) -> CliResult<Vec<Real>> {
    if let Some(t) = &grid.t {
        let v = parse_real(t, prec)?;
        check_unit_interval(&v)?;
        return Ok(vec![v]);
    }
    let spec = grid
        .t_grid
        .as_ref()
        .ok_or_else(|| UsageError("either --t or --t-grid is required".into()))?;
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(UsageError(format!("grid must be start:stop:count, got {spec}")));
    }
    let start = parse_real(parts[0], prec)?;
    let stop = parse_real(parts[1], prec)?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| UsageError(format!("grid count is not an integer: {}", parts[2])))?;
    check_unit_interval(&start)?;
    check_unit_interval(&stop)?;
    if count < 1 {
        return Err(UsageError("grid count must be at least 1".into()));
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    let step = (real(prec, &stop) - &start) / real(prec, (count - 1) as u32);
    Ok((0..count)
        .map(|i| real(prec, &start) + real(prec, i as u32) * &step)
        .collect())
}

fn check_unit_interval(t: &Real) -> CliResult<()> {
    if *t <= 0 || *t >= 1 {
        return Err(UsageError(format!("t must lie in (0,1), got {t}")));
    }
    Ok(())
}

fn weight_params(w: &WeightArgs, prec: u32) -> CliResult<WeightParams> {
    let alpha = parse_real(&w.alpha, prec)?;
    let beta = parse_real(&w.beta, prec)?;
    let a = parse_real(&w.a, prec)?;
    let b = parse_real(&w.b, prec)?;
    Ok(WeightParams::new(alpha, beta, a, b)?)
}

fn fmt(x: &Real, prec: u32) -> String {
    let digits = ((prec as f64) * std::f64::consts::LOG10_2).ceil() as usize;
    format!("{:.*e}", digits.saturating_sub(1).max(1), x)
}

fn weight_param_fields(w: &WeightArgs, prec: u32) -> Vec<(&'static str, String, Col)> {
    vec![
        ("n", w.n.to_string(), Col::Num),
        ("alpha", w.alpha.clone(), Col::Num),
        ("beta", w.beta.clone(), Col::Num),
        ("A", w.a.clone(), Col::Num),
        ("B", w.b.clone(), Col::Num),
        ("prec_bits", prec.to_string(), Col::Num),
    ]
}

fn jacobi_param_fields(j: &JacobiArgs, prec: u32) -> Vec<(&'static str, String, Col)> {
    vec![
        ("n", j.n.to_string(), Col::Num),
        ("alpha", j.alpha.clone(), Col::Num),
        ("beta", j.beta.clone(), Col::Num),
        ("prec_bits", prec.to_string(), Col::Num),
    ]
}

/// Run `f` over the grid in parallel; records stay in grid order and
/// the worst residual is folded across all points.
fn over_grid<F>(ts: &[Real], prec: u32, f: F) -> CliResult<(Vec<Vec<String>>, Real)>
where
    F: Fn(&Real) -> CliResult<(Vec<Vec<String>>, Real)> + Sync,
{
    let results: Vec<std::result::Result<(Vec<Vec<String>>, Real), String>> = ts
        .par_iter()
        .map(|t| f(t).map_err(|UsageError(m)| m))
        .collect();
    let mut rows = Vec::new();
    let mut worst = real(prec, 0);
    for r in results {
        let (chunk, w) = r.map_err(UsageError)?;
        if w > worst {
            worst = w;
        }
        rows.extend(chunk);
    }
    Ok((rows, worst))
}

fn cmd_sigma(weight: &WeightArgs, grid: &GridArgs, output: &OutputArgs) -> CliResult<Report> {
    let prec = resolve_prec(output)?;
    let params = weight_params(weight, prec)?;
    let ts = parse_grid(grid, prec)?;
    if weight.n < 1 {
        return Err(UsageError("sigma-check requires n >= 1".into()));
    }
    let (rows, worst) = over_grid(&ts, prec, |t| {
        let st = sigma_trace(weight.n, &params, t, prec)?;
        let row = vec![
            fmt(t, prec),
            fmt(&st.sigma, prec),
            fmt(&st.sigma1, prec),
            fmt(&st.sigma2, prec),
            fmt(&st.residual, prec),
        ];
        Ok((vec![row], st.residual))
    })?;
    Ok(Report {
        params: weight_param_fields(weight, prec),
        header: vec![
            ("t", Col::Num),
            ("sigma", Col::Num),
            ("sigma_prime", Col::Num),
            ("sigma_second", Col::Num),
            ("residual", Col::Num),
        ],
        rows,
        worst,
    })
}

fn cmd_identities(weight: &WeightArgs, grid: &GridArgs, output: &OutputArgs) -> CliResult<Report> {
    let prec = resolve_prec(output)?;
    let params = weight_params(weight, prec)?;
    let ts = parse_grid(grid, prec)?;
    if weight.n < 2 {
        return Err(UsageError("identities requires n >= 2".into()));
    }
    let fd_step = real(prec, 1e-8f64);
    let (rows, worst) = over_grid(&ts, prec, |t| {
        let report = run_suite(weight.n, &params, t, &fd_step, prec)?;
        let mut rows = Vec::new();
        for e in &report.entries {
            rows.push(vec![
                fmt(t, prec),
                e.tag.to_string(),
                fmt(&e.lhs, prec),
                fmt(&e.rhs, prec),
                fmt(&e.rel_residual, prec),
            ]);
        }
        Ok((rows, report.worst.1.clone()))
    })?;
    Ok(Report {
        params: weight_param_fields(weight, prec),
        header: vec![
            ("t", Col::Num),
            ("tag", Col::Text),
            ("lhs", Col::Num),
            ("rhs", Col::Num),
            ("residual", Col::Num),
        ],
        rows,
        worst,
    })
}

fn cmd_gap(jacobi: &JacobiArgs, grid: &GridArgs, output: &OutputArgs) -> CliResult<Report> {
    let prec = resolve_prec(output)?;
    let alpha = parse_real(&jacobi.alpha, prec)?;
    let beta = parse_real(&jacobi.beta, prec)?;
    let ts = parse_grid(grid, prec)?;
    if jacobi.n < 1 {
        return Err(UsageError("gap requires n >= 1".into()));
    }
    let (rows, worst) = over_grid(&ts, prec, |t| {
        let ph = gap_hankel(jacobi.n, &alpha, &beta, t, prec)?;
        let pg = gap_gram(jacobi.n, &alpha, &beta, t, prec)?;
        let dev = numerics::rel_residual(&ph, &pg);
        let row = vec![fmt(t, prec), fmt(&ph, prec), fmt(&pg, prec), fmt(&dev, prec)];
        Ok((vec![row], dev))
    })?;
    Ok(Report {
        params: jacobi_param_fields(jacobi, prec),
        header: vec![
            ("t", Col::Num),
            ("prob", Col::Num),
            ("prob_gram", Col::Num),
            ("residual", Col::Num),
        ],
        rows,
        worst,
    })
}

fn cmd_pvi(weight: &WeightArgs, grid: &GridArgs, output: &OutputArgs) -> CliResult<Report> {
    let prec = resolve_prec(output)?;
    let params = weight_params(weight, prec)?;
    let ts = parse_grid(grid, prec)?;
    if weight.n < 1 {
        return Err(UsageError("pvi-compare requires n >= 1".into()));
    }
    let sys = PviSystem::new(weight.n, &params.alpha, &params.beta, prec);
    let fd_step = real(prec, 1e-8f64);
    let t0 = ts[0].clone();
    let (w0, w10) = wn_from_pipeline(weight.n, &params, &t0, &fd_step, prec)?;
    let (rows, worst) = over_grid(&ts, prec, |t| {
        let (w_pipe, _) = wn_from_pipeline(weight.n, &params, t, &fd_step, prec)?;
        let traj = pvi_integrate(&sys, &t0, t, (&w0, &w10), 1e-20, prec)?;
        if !traj.completed {
            return Err(UsageError(format!("integration stopped before t = {t}")));
        }
        let w_ode = &traj.states.last().unwrap().w;
        let dev = (real(prec, w_ode) - &w_pipe).abs();
        let row = vec![
            fmt(t, prec),
            fmt(&w_pipe, prec),
            fmt(w_ode, prec),
            fmt(&dev, prec),
        ];
        Ok((vec![row], dev))
    })?;
    Ok(Report {
        params: weight_param_fields(weight, prec),
        header: vec![
            ("t", Col::Num),
            ("w_pipeline", Col::Num),
            ("w_integrated", Col::Num),
            ("residual", Col::Num),
        ],
        rows,
        worst,
    })
}

fn cmd_asymptotics(jacobi: &JacobiArgs, output: &OutputArgs) -> CliResult<Report> {
    let prec = resolve_prec(output)?;
    let alpha = parse_real(&jacobi.alpha, prec)?;
    let beta = parse_real(&jacobi.beta, prec)?;
    if jacobi.n < 1 {
        return Err(UsageError("asymptotics requires n >= 1".into()));
    }
    let ac = asymptotic_constant(jacobi.n, &alpha, &beta, prec).map_err(UsageError::from)?;
    let (c_num, dev) = asymptotic_check(jacobi.n, &alpha, &beta, prec).map_err(UsageError::from)?;
    let rows = vec![vec![
        fmt(&ac.c, prec),
        fmt(&ac.exponent, prec),
        fmt(&c_num, prec),
        fmt(&dev, prec),
    ]];
    Ok(Report {
        params: jacobi_param_fields(jacobi, prec),
        header: vec![
            ("c_closed_form", Col::Num),
            ("exponent", Col::Num),
            ("c_extrapolated", Col::Num),
            ("residual", Col::Num),
        ],
        rows,
        worst: dev,
    })
}

fn cmd_moments(weight: &WeightArgs, grid: &GridArgs, output: &OutputArgs) -> CliResult<Report> {
    let prec = resolve_prec(output)?;
    let params = weight_params(weight, prec)?;
    let ts = parse_grid(grid, prec)?;
    if weight.n < 1 {
        return Err(UsageError("moments requires n >= 1".into()));
    }
    let cfg = SpecFunConfig::new(prec);
    let (rows, _) = over_grid(&ts, prec, |t| {
        let mut rows = Vec::new();
        for k in 0..(2 * weight.n - 1) {
            let mu = moment(k, &params, t, &cfg)?;
            rows.push(vec![fmt(t, prec), k.to_string(), fmt(&mu, prec)]);
        }
        Ok((rows, real(prec, 0)))
    })?;
    Ok(Report {
        params: weight_param_fields(weight, prec),
        header: vec![("t", Col::Num), ("k", Col::Num), ("mu", Col::Num)],
        rows,
        worst: real(prec, 0),
    })
}

fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

fn json_value(raw: &str, col: Col) -> String {
    match col {
        Col::Num => raw.to_string(),
        Col::Text => format!("\"{}\"", json_escape(raw)),
    }
}

fn render_json(report: &Report, prec: u32) -> String {
    let mut out = String::new();
    out.push_str("{\n  \"params\": {");
    let params: Vec<String> = report
        .params
        .iter()
        .map(|(k, v, c)| format!("\"{}\": {}", k, json_value(v, *c)))
        .collect();
    out.push_str(&params.join(", "));
    out.push_str("},\n  \"records\": [\n");
    let records: Vec<String> = report
        .rows
        .iter()
        .map(|row| {
            let fields: Vec<String> = report
                .header
                .iter()
                .zip(row)
                .map(|((k, c), v)| format!("\"{}\": {}", k, json_value(v, *c)))
                .collect();
            format!("    {{{}}}", fields.join(", "))
        })
        .collect();
    out.push_str(&records.join(",\n"));
    out.push_str(&format!(
        "\n  ],\n  \"worst\": {}\n}}\n",
        fmt(&report.worst, prec)
    ));
    out
}

fn render_csv(report: &Report) -> String {
    let mut out = String::new();
    let header: Vec<&str> = report.header.iter().map(|(k, _)| *k).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in &report.rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
