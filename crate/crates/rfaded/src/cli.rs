//! Command-line front end: weights, solve, analytic, stability, and table
//! subcommands with CSV outputs and JSON sidecars.
//!
//! Every float is printed with 17 significant digits so the files round-trip
//! exactly; each CSV gets a `<name>.meta.json` sidecar holding the full run
//! configuration (flat key-value) plus the tool version, and reruns of the
//! same configuration are byte-identical. Exit codes: 0 success, 1
//! computation failure, 2 argument errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::analytic::{analytic_profile, SeriesTruncation};
use crate::discretization::{assemble, check_diagonal_dominance, h_threshold, Mesh};
use crate::error::Error;
use crate::experiments::{convergence_table, ManufacturedProblem};
use crate::problem::ProblemSpec;
use crate::solver::{solve, SolveOptions};
use crate::stability::{boundary_locus, enclosed_area, locus_shift};
use crate::weights::{fbdf2_weights, grunwald_weights, wsgd_weights};

#[derive(Parser)]
#[command(name = "rfaded", version, about = "Riesz space-fractional advection-dispersion solver with constant delay")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Grunwald,
    Fbdf2,
    Wsgd,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a convolution-weight sequence as CSV rows `k,value`.
    Weights {
        #[arg(long)]
        kind: KindArg,
        #[arg(long)]
        order: f64,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value = "weights.csv")]
        out: PathBuf,
    },
    /// Solve a bundled manufactured problem; writes `t,x,value` CSV.
    Solve {
        /// Bundled problem id (1 or 2).
        #[arg(long)]
        example: u8,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        /// Space intervals.
        #[arg(long, default_value_t = 64)]
        m: usize,
        /// Time steps.
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, default_value = "solution.csv")]
        out: PathBuf,
        /// Dump an assembled matrix (A, B or D) as `i,j,value` CSV:
        /// `--dump-matrix D d.csv`.
        #[arg(long, num_args = 2, value_names = ["MATRIX", "PATH"])]
        dump_matrix: Option<Vec<String>>,
        /// Evaluate the first step's data at t = 0 exactly instead of the
        /// guarded offset t = kappa/1000.
        #[arg(long)]
        no_t0_offset: bool,
    },
    /// Evaluate the series solution of the built-in single-mode problem
    /// (history sin(mode*pi*x/L)*(1+t), zero forcing); writes `x,t,value`.
    Analytic {
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 1.0)]
        k_alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        k_beta: f64,
        /// Sine mode of the built-in history.
        #[arg(long, default_value_t = 1)]
        mode: usize,
        #[arg(long, default_value_t = 9)]
        nx: usize,
        #[arg(long, default_value_t = 5)]
        nt: usize,
        #[arg(long, default_value_t = 0.5)]
        t_max: f64,
        #[arg(long, default_value_t = 50)]
        n_max: usize,
        #[arg(long, default_value_t = 60)]
        k_max: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, default_value = "analytic.csv")]
        out: PathBuf,
    },
    /// Emit boundary-locus CSV `theta,re,im`, one file per alpha.
    Stability {
        #[arg(long = "alpha", required = true)]
        alphas: Vec<f64>,
        /// Truncation length of the weight sum.
        #[arg(long, default_value_t = 500)]
        locus_n: usize,
        #[arg(long, default_value_t = 1024)]
        n_theta: usize,
        /// Output prefix; files are `<prefix>_alpha<a>.csv`.
        #[arg(long, default_value = "locus")]
        out: String,
    },
    /// Convergence table over grids with kappa = h; writes `h,error,order`.
    Table {
        #[arg(long)]
        example: u8,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        grids: Vec<usize>,
        #[arg(long, default_value = "table.csv")]
        out: PathBuf,
        #[arg(long)]
        no_t0_offset: bool,
    },
}

enum CliError {
    Args(String),
    Compute(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Compute(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Compute(format!("io: {e}"))
    }
}

/// Round-trip-exact float formatting (17 significant digits).
fn fmt_f(v: f64) -> String {
    format!("{v:.16e}")
}

fn sidecar_path(csv: &Path) -> PathBuf {
    let mut p = csv.as_os_str().to_owned();
    p.push(".meta.json");
    PathBuf::from(p)
}

fn write_sidecar(csv: &Path, mut entries: BTreeMap<String, Value>) -> Result<(), CliError> {
    entries.insert("tool_version".into(), json!(env!("CARGO_PKG_VERSION")));
    let body = serde_json::to_string_pretty(&entries).expect("serializable sidecar");
    fs::write(sidecar_path(csv), body + "\n")?;
    Ok(())
}

fn require(ok: bool, msg: &str) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Args(msg.to_string()))
    }
}

/// Parse `argv` and run the requested subcommand.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(CliError::Args(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CliError::Compute(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

fn dispatch(cmd: Command) -> Result<String, CliError> {
    match cmd {
        Command::Weights {
            kind,
            order,
            count,
            out,
        } => cmd_weights(kind, order, count, &out),
        Command::Solve {
            example,
            gamma,
            alpha,
            beta,
            m,
            n,
            out,
            dump_matrix,
            no_t0_offset,
        } => cmd_solve(
            example,
            gamma,
            alpha,
            beta,
            m,
            n,
            &out,
            dump_matrix.as_deref(),
            no_t0_offset,
        ),
        Command::Analytic {
            gamma,
            alpha,
            beta,
            k_alpha,
            k_beta,
            mode,
            nx,
            nt,
            t_max,
            n_max,
            k_max,
            tol,
            out,
        } => cmd_analytic(
            gamma, alpha, beta, k_alpha, k_beta, mode, nx, nt, t_max, n_max, k_max, tol, &out,
        ),
        Command::Stability {
            alphas,
            locus_n,
            n_theta,
            out,
        } => cmd_stability(&alphas, locus_n, n_theta, &out),
        Command::Table {
            example,
            gamma,
            alpha,
            beta,
            grids,
            out,
            no_t0_offset,
        } => cmd_table(example, gamma, alpha, beta, &grids, &out, no_t0_offset),
    }
}

fn cmd_weights(kind: KindArg, order: f64, count: usize, out: &Path) -> Result<String, CliError> {
    let seq = match kind {
        KindArg::Grunwald => grunwald_weights(order, count),
        KindArg::Fbdf2 => fbdf2_weights(order, count),
        KindArg::Wsgd => wsgd_weights(order, count),
    }
    .map_err(|e| CliError::Args(e.to_string()))?;
    let mut csv = String::from("k,value\n");
    for (k, v) in seq.coeffs().iter().enumerate() {
        let _ = writeln!(csv, "{k},{}", fmt_f(*v));
    }
    fs::write(out, csv)?;
    write_sidecar(
        out,
        BTreeMap::from([
            ("subcommand".into(), json!("weights")),
            ("kind".into(), json!(format!("{kind:?}").to_lowercase())),
            ("order".into(), json!(order)),
            ("count".into(), json!(count)),
            ("out".into(), json!(out.display().to_string())),
        ]),
    )?;
    Ok(format!(
        "wrote {count} {} weights of order {order} to {}",
        format!("{kind:?}").to_lowercase(),
        out.display()
    ))
}

fn validate_orders(gamma: f64, alpha: f64, beta: f64) -> Result<(), CliError> {
    require(gamma > 0.0 && gamma < 1.0, "gamma must lie in (0, 1)")?;
    require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)")?;
    require(beta > 1.0 && beta <= 2.0, "beta must lie in (1, 2]")?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_solve(
    example: u8,
    gamma: f64,
    alpha: f64,
    beta: f64,
    m: usize,
    n: usize,
    out: &Path,
    dump_matrix: Option<&[String]>,
    no_t0_offset: bool,
) -> Result<String, CliError> {
    validate_orders(gamma, alpha, beta)?;
    require(example == 1 || example == 2, "example must be 1 or 2")?;
    require(m >= 3, "m must be at least 3")?;
    require(n >= 1, "n must be at least 1")?;
    let prob = ManufacturedProblem::example(example, gamma, alpha, beta)?;
    let spec = prob.to_problem_spec();
    let mesh = Mesh::new(m, n, spec.l, spec.t_end)?;
    let opts = SolveOptions {
        t0_offset: !no_t0_offset,
    };
    let sys = assemble(&spec, &mesh)?;
    let dominance = check_diagonal_dominance(&sys);
    let field = solve(&spec, &mesh, &opts)?;

    let mut csv = String::from("t,x,value\n");
    for j in 0..=n {
        let t = mesh.time(j);
        for i in 0..=m {
            let _ = writeln!(csv, "{},{},{}", fmt_f(t), fmt_f(mesh.x(i)), fmt_f(field.value(j, i)));
        }
    }
    fs::write(out, csv)?;

    if let Some(dump) = dump_matrix {
        let matrix = match dump[0].as_str() {
            "A" | "a" => &sys.a,
            "B" | "b" => &sys.b,
            "D" | "d" => &sys.d,
            other => {
                return Err(CliError::Args(format!(
                    "unknown matrix {other:?}; expected A, B or D"
                )))
            }
        };
        let mut mcsv = String::from("i,j,value\n");
        for i in 0..matrix.nrows() {
            for jj in 0..matrix.ncols() {
                let _ = writeln!(mcsv, "{i},{jj},{}", fmt_f(matrix[(i, jj)]));
            }
        }
        fs::write(&dump[1], mcsv)?;
    }

    let threshold = h_threshold(alpha, beta)?;
    let max_err = field.max_row_error(n, |x| prob.exact(x, mesh.t_end));
    write_sidecar(
        out,
        BTreeMap::from([
            ("subcommand".into(), json!("solve")),
            ("example".into(), json!(example)),
            ("gamma".into(), json!(gamma)),
            ("alpha".into(), json!(alpha)),
            ("beta".into(), json!(beta)),
            ("k_alpha".into(), json!(1.0)),
            ("k_beta".into(), json!(1.0)),
            ("tau".into(), json!(spec.tau)),
            ("l".into(), json!(spec.l)),
            ("t_end".into(), json!(spec.t_end)),
            ("m".into(), json!(m)),
            ("n".into(), json!(n)),
            ("t0_offset".into(), json!(!no_t0_offset)),
            ("dominant".into(), json!(dominance.dominant)),
            ("dominance_margin".into(), json!(dominance.worst_row_margin)),
            (
                "h_threshold".into(),
                if threshold.is_finite() {
                    json!(threshold)
                } else {
                    json!("inf")
                },
            ),
            ("eta_alpha".into(), json!(sys.eta_alpha)),
            ("eta_beta".into(), json!(sys.eta_beta)),
            ("out".into(), json!(out.display().to_string())),
        ]),
    )?;
    Ok(format!(
        "solved example {example} on {m}x{n}: max |error| at T = {max_err:.4e} (dominance margin {:.3e})",
        dominance.worst_row_margin
    ))
}

#[allow(clippy::too_many_arguments)]
fn cmd_analytic(
    gamma: f64,
    alpha: f64,
    beta: f64,
    k_alpha: f64,
    k_beta: f64,
    mode: usize,
    nx: usize,
    nt: usize,
    t_max: f64,
    n_max: usize,
    k_max: usize,
    tol: f64,
    out: &Path,
) -> Result<String, CliError> {
    validate_orders(gamma, alpha, beta)?;
    require(k_alpha >= 0.0 && k_beta >= 0.0, "diffusivities must be nonnegative")?;
    require(mode >= 1, "mode must be at least 1")?;
    require(nx >= 2 && nt >= 1, "need nx >= 2 grid columns and nt >= 1 times")?;
    require(t_max > 0.0 && t_max <= 1.0, "t_max must lie in (0, 1] (tau = 1)")?;
    let freq = mode as f64 * std::f64::consts::PI;
    let spec = ProblemSpec {
        gamma,
        alpha,
        beta,
        k_alpha,
        k_beta,
        tau: 1.0,
        l: 1.0,
        t_end: t_max,
        history: Box::new(move |x, t| (freq * x).sin() * (1.0 + t)),
        mu1: Box::new(|_| 0.0),
        mu2: Box::new(|_| 0.0),
        forcing: Box::new(|_, _| 0.0),
        delayed_term: Box::new(move |x, t| {
            // Caputo derivative of the shifted linear-in-time history
            (freq * x).sin() * t.powf(1.0 - gamma) * crate::specialfn::recip_gamma(2.0 - gamma)
        }),
    };
    let trunc = SeriesTruncation { n_max, k_max, tol };
    let xs: Vec<f64> = (0..nx).map(|i| i as f64 / (nx - 1) as f64).collect();
    let ts: Vec<f64> = (1..=nt).map(|j| t_max * j as f64 / nt as f64).collect();
    let mut grid = Vec::with_capacity(nt);
    for &t in &ts {
        grid.push(analytic_profile(&spec, &trunc, t, &xs)?);
    }
    let mut csv = String::from("x,t,value\n");
    for (i, &x) in xs.iter().enumerate() {
        for (jt, &t) in ts.iter().enumerate() {
            let _ = writeln!(csv, "{},{},{}", fmt_f(x), fmt_f(t), fmt_f(grid[jt][i]));
        }
    }
    fs::write(out, csv)?;
    write_sidecar(
        out,
        BTreeMap::from([
            ("subcommand".into(), json!("analytic")),
            ("gamma".into(), json!(gamma)),
            ("alpha".into(), json!(alpha)),
            ("beta".into(), json!(beta)),
            ("k_alpha".into(), json!(k_alpha)),
            ("k_beta".into(), json!(k_beta)),
            ("mode".into(), json!(mode)),
            ("nx".into(), json!(nx)),
            ("nt".into(), json!(nt)),
            ("t_max".into(), json!(t_max)),
            ("n_max".into(), json!(n_max)),
            ("k_max".into(), json!(k_max)),
            ("tol".into(), json!(tol)),
            ("out".into(), json!(out.display().to_string())),
        ]),
    )?;
    Ok(format!(
        "wrote {} series values ({nx} x-columns, {nt} times) to {}",
        nx * nt,
        out.display()
    ))
}

fn cmd_stability(alphas: &[f64], locus_n: usize, n_theta: usize, prefix: &str) -> Result<String, CliError> {
    require(!alphas.is_empty(), "at least one --alpha is required")?;
    require(locus_n >= 8, "locus n must be at least 8")?;
    require(n_theta >= 64, "n_theta must be at least 64")?;
    let mut written = Vec::new();
    for &alpha in alphas {
        require(alpha > 0.0 && alpha <= 1.0, "locus alpha must lie in (0, 1]")?;
        let locus = boundary_locus(alpha, locus_n, n_theta)?;
        let coarse = boundary_locus(alpha, (locus_n / 2).max(8), n_theta)?;
        let shift = locus_shift(&locus, &coarse)?;
        if shift > 1e-2 {
            eprintln!(
                "warning: alpha = {alpha}: halving the truncation moves locus points by {shift:.3e} \
                 (the n^-alpha endpoint correction dominates at small alpha)"
            );
        }
        let area = enclosed_area(&locus);
        let path = PathBuf::from(format!("{prefix}_alpha{alpha}.csv"));
        let mut csv = String::from("theta,re,im\n");
        for &(theta, re, im) in &locus.points {
            let _ = writeln!(csv, "{},{},{}", fmt_f(theta), fmt_f(re), fmt_f(im));
        }
        fs::write(&path, csv)?;
        write_sidecar(
            &path,
            BTreeMap::from([
                ("subcommand".into(), json!("stability")),
                ("alpha".into(), json!(alpha)),
                ("locus_n".into(), json!(locus_n)),
                ("n_theta".into(), json!(n_theta)),
                ("enclosed_area".into(), json!(area)),
                ("truncation_shift_vs_half_n".into(), json!(shift)),
                ("out".into(), json!(path.display().to_string())),
            ]),
        )?;
        written.push(format!("{} (lobe area {:.4})", path.display(), area));
    }
    Ok(format!(
        "wrote {} loci with {} points each: {}",
        written.len(),
        n_theta + 1,
        written.join(", ")
    ))
}

fn cmd_table(
    example: u8,
    gamma: f64,
    alpha: f64,
    beta: f64,
    grids: &[usize],
    out: &Path,
    no_t0_offset: bool,
) -> Result<String, CliError> {
    validate_orders(gamma, alpha, beta)?;
    require(example == 1 || example == 2, "example must be 1 or 2")?;
    let prob = ManufacturedProblem::example(example, gamma, alpha, beta)?;
    let opts = SolveOptions {
        t0_offset: !no_t0_offset,
    };
    let rows = convergence_table(&prob, grids, &opts)?;
    let mut csv = String::from("h,error,order\n");
    for r in &rows {
        let order = r.observed_order.map(fmt_f).unwrap_or_default();
        let _ = writeln!(csv, "{},{},{order}", fmt_f(r.h), fmt_f(r.max_abs_error));
    }
    fs::write(out, csv)?;
    write_sidecar(
        out,
        BTreeMap::from([
            ("subcommand".into(), json!("table")),
            ("example".into(), json!(example)),
            ("gamma".into(), json!(gamma)),
            ("alpha".into(), json!(alpha)),
            ("beta".into(), json!(beta)),
            ("grids".into(), json!(grids)),
            ("t0_offset".into(), json!(!no_t0_offset)),
            ("out".into(), json!(out.display().to_string())),
        ]),
    )?;
    let last = rows.last().expect("validated nonempty");
    Ok(format!(
        "table with {} rows: final error {:.4e}, final order {}",
        rows.len(),
        last.max_abs_error,
        last.observed_order
            .map(|o| format!("{o:.2}"))
            .unwrap_or_else(|| "-".into())
    ))
}
