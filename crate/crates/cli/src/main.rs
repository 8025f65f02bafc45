//! `stabgrad` — command-line harness around the stabilized gradient
//! method: problem export, single solves, experiment tables and analysis
//! sweeps.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use stabgrad_cli::output::{fmt_float, log_grid, write_csv, write_json};
use stabgrad_cli::problems_cli::{build_problem, is_grid_problem, ProblemParams};
use stabgrad_cli::report::{exit_code, write_solve_outputs, ReportJson};
use stabgrad_cli::tables::{run_table, TableId};
use stabgrad_core::analysis::{
    error_bound, filter_factors, stabilized_iteration_matrix, BoundParameters,
};
use stabgrad_core::dense::{market, spectral_radius_estimate, svd, PowerConfig, Vector};
use stabgrad_core::problems::grid::{stabilized_solve_grid, BandedSpd, ReactionDiffusionGrid};
use stabgrad_core::solvers::{
    gradient_solve, stabilized_solve, StepsizeStrategy, StopRule, SystemForm,
};

#[derive(Parser)]
#[command(
    name = "stabgrad",
    version,
    about = "Stabilized gradient method for linear systems: problems, solves, tables, sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a named test problem and write matrix/vectors/metadata
    Problem(ProblemCmd),
    /// Run one solver configuration and write a report
    Solve(SolveCmd),
    /// Rerun a named experiment table and write its CSV
    Table(TableCmd),
    /// Emit analysis data: filter factors, spectral radii, error bounds
    Analyze(AnalyzeCmd),
}

#[derive(Args)]
struct ProblemSelect {
    /// Size of the discretized integral-equation problems
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Conduction coefficient of the heat problem / reaction coefficient
    #[arg(long, default_value_t = 1.0)]
    kappa: f64,
    /// Diagonal parameter of the beck quadratic
    #[arg(long = "a-param", default_value_t = 2.0)]
    a_param: f64,
    /// Refinement level of the reaction-diffusion grid (dense export is
    /// quadratic in (2^level - 1)²; levels above 6 are multi-GiB)
    #[arg(long, default_value_t = 6)]
    level: u32,
}

impl ProblemSelect {
    fn params(&self, name: &str) -> ProblemParams {
        ProblemParams {
            name: name.to_string(),
            n: self.n,
            kappa: self.kappa,
            a_param: self.a_param,
            level: self.level,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Matrixmarket,
}

#[derive(Args)]
struct ProblemCmd {
    /// Problem name: a1, a2, shaw, heat, gravity, beck, rd
    name: String,
    #[command(flatten)]
    select: ProblemSelect,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
    /// Vector export format (the matrix is always Matrix Market)
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Compute the spectral condition number into the metadata
    #[arg(long)]
    with_cond: bool,
    /// Compute the numerical rank into the metadata
    #[arg(long)]
    with_rank: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Gradient,
    Stabilized,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum StepsizeArg {
    Constant,
    Exact,
    Backtracking,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum StopArg {
    RelResidual,
    RelError,
    GradNorm,
    AbsResidual,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Linear,
    Beck,
}

#[derive(Args)]
struct SolveCmd {
    /// Problem name: a1, a2, shaw, heat, gravity, beck, rd
    #[arg(long)]
    problem: String,
    #[command(flatten)]
    select: ProblemSelect,
    #[arg(long, value_enum, default_value_t = MethodArg::Stabilized)]
    method: MethodArg,
    #[arg(long, value_enum, default_value_t = StepsizeArg::Constant)]
    stepsize: StepsizeArg,
    /// Constant stepsize value
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Backtracking initial step
    #[arg(long = "bt-s", default_value_t = 2.0)]
    bt_s: f64,
    /// Backtracking sufficient-decrease coefficient
    #[arg(long = "bt-slope", default_value_t = 0.25)]
    bt_slope: f64,
    /// Backtracking shrink factor
    #[arg(long = "bt-shrink", default_value_t = 0.5)]
    bt_shrink: f64,
    /// Stabilization weight (stabilized method only)
    #[arg(long, default_value_t = 1e10)]
    gamma: f64,
    #[arg(long, value_enum, default_value_t = StopArg::RelResidual)]
    stop: StopArg,
    /// Stop tolerance
    #[arg(long, default_value_t = 1e-5)]
    eps: f64,
    /// Iteration cap; defaults to the problem size
    #[arg(long)]
    kmax: Option<usize>,
    /// Gradient direction: linear system residual or quadratic gradient
    #[arg(long, value_enum, default_value_t = ModeArg::Linear)]
    mode: ModeArg,
    /// Initial iterate as comma-separated values (default: zeros)
    #[arg(long)]
    x0: Option<String>,
    /// Output directory for report.json and history.csv
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TableCmd {
    /// Table id: wellc1, wellc2, tab461, tab481, tab491, shaw1, heat1,
    /// gravity1, tabef0, tabef1
    id: String,
    /// Problem-size override for shaw1/heat1/gravity1
    #[arg(long)]
    n: Option<usize>,
    /// Mesh-sweep cap for tabef1
    #[arg(long)]
    max_level: Option<u32>,
    /// Output CSV path (default: `<id>.csv`)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum AnalyzeKind {
    FilterFactors,
    SpectralRadius,
    ErrorBound,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum SweepArg {
    Gamma,
    Alpha,
}

#[derive(Args)]
struct AnalyzeCmd {
    kind: AnalyzeKind,
    /// Problem for spectral-radius / error-bound sweeps
    #[arg(long, default_value = "a1")]
    problem: String,
    #[command(flatten)]
    select: ProblemSelect,
    /// Stepsizes (comma separated)
    #[arg(long, value_delimiter = ',', default_value = "1.0")]
    alpha: Vec<f64>,
    /// Stabilization weights (comma separated)
    #[arg(long, value_delimiter = ',', default_value = "1e6")]
    gamma: Vec<f64>,
    /// Iterate index for filter factors
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Iteration cap for error-bound curves
    #[arg(long, default_value_t = 10)]
    kmax: usize,
    /// Sweep variable for spectral-radius
    #[arg(long, value_enum, default_value_t = SweepArg::Gamma)]
    sweep: SweepArg,
    #[arg(long = "sigma-min", default_value_t = 1e-6)]
    sigma_min: f64,
    #[arg(long = "sigma-max", default_value_t = 1.0)]
    sigma_max: f64,
    #[arg(long = "gamma-min", default_value_t = 1.0)]
    gamma_min: f64,
    #[arg(long = "gamma-max", default_value_t = 1e15)]
    gamma_max: f64,
    #[arg(long = "alpha-min", default_value_t = 1e-5)]
    alpha_min: f64,
    #[arg(long = "alpha-max", default_value_t = 1e5)]
    alpha_max: f64,
    /// Grid points of the sweep variable
    #[arg(long, default_value_t = 40)]
    points: usize,
    /// Seed for the power-iteration restarts
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output CSV path (default: `<kind>.csv`)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(u8::try_from(code).unwrap_or(1)),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Problem(cmd) => cmd_problem(cmd),
        Command::Solve(cmd) => cmd_solve(cmd),
        Command::Table(cmd) => cmd_table(cmd),
        Command::Analyze(cmd) => cmd_analyze(cmd),
    }
}

fn cmd_problem(cmd: ProblemCmd) -> Result<i32> {
    let p = build_problem(&cmd.select.params(&cmd.name))?;
    std::fs::create_dir_all(&cmd.out).with_context(|| format!("creating {}", cmd.out.display()))?;

    let stem = p.name.replace('-', "_");
    market::write_matrix_file(&cmd.out.join(format!("{stem}.mtx")), &p.a)?;

    match cmd.format {
        FormatArg::Csv => {
            let mut rows = Vec::with_capacity(p.n());
            for i in 0..p.n() {
                let mut row = vec![i.to_string(), fmt_float(p.b[i])];
                if let Some(xs) = &p.x_star {
                    row.push(fmt_float(xs[i]));
                }
                rows.push(row);
            }
            let headers: &[&str] = if p.x_star.is_some() {
                &["index", "b", "x_star"]
            } else {
                &["index", "b"]
            };
            write_csv(&cmd.out.join(format!("{stem}_vectors.csv")), headers, &rows)?;
        }
        FormatArg::Matrixmarket => {
            market::write_vector_file(&cmd.out.join(format!("{stem}_b.mtx")), &p.b)?;
            if let Some(xs) = &p.x_star {
                market::write_vector_file(&cmd.out.join(format!("{stem}_x_star.mtx")), xs)?;
            }
        }
        FormatArg::Json => {
            let mut doc = serde_json::Map::new();
            doc.insert("b".into(), serde_json::json!(p.b.as_slice()));
            if let Some(xs) = &p.x_star {
                doc.insert("x_star".into(), serde_json::json!(xs.as_slice()));
            }
            write_json(&cmd.out.join(format!("{stem}_vectors.json")), &doc)?;
        }
    }

    let mut meta: BTreeMap<String, serde_json::Value> = BTreeMap::new();
    for (k, v) in &p.metadata {
        meta.insert(k.clone(), serde_json::json!(v));
    }
    meta.insert("name".into(), serde_json::json!(p.name));
    meta.insert("n".into(), serde_json::json!(p.n()));
    if cmd.with_cond || cmd.with_rank {
        let f = svd(&p.a)?;
        if cmd.with_rank {
            meta.insert("rank".into(), serde_json::json!(f.numerical_rank_default()));
        }
        if cmd.with_cond {
            meta.insert("cond".into(), serde_json::json!(f.condition_number()?));
        }
    }
    write_json(&cmd.out.join(format!("{stem}_meta.json")), &meta)?;
    println!("wrote {} problem files to {}", p.name, cmd.out.display());
    Ok(0)
}

fn parse_x0(text: Option<&str>, n: usize) -> Result<Vector<f64>> {
    match text {
        None => Ok(Vector::zeros(n)),
        Some(t) => {
            let vals: Vec<f64> = t
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .with_context(|| format!("bad x0 entry '{s}'"))
                })
                .collect::<Result<_>>()?;
            anyhow::ensure!(
                vals.len() == n,
                "x0 has {} entries, problem needs {n}",
                vals.len()
            );
            Ok(Vector::new(vals)?)
        }
    }
}

fn cmd_solve(cmd: SolveCmd) -> Result<i32> {
    let step = match cmd.stepsize {
        StepsizeArg::Constant => StepsizeStrategy::Constant(cmd.alpha),
        StepsizeArg::Exact => StepsizeStrategy::ExactLineSearch,
        StepsizeArg::Backtracking => StepsizeStrategy::Backtracking {
            s: cmd.bt_s,
            slope_coeff: cmd.bt_slope,
            shrink: cmd.bt_shrink,
        },
    };

    let stop_name = match cmd.stop {
        StopArg::RelResidual => "rel-residual",
        StopArg::RelError => "rel-error",
        StopArg::GradNorm => "grad-norm",
        StopArg::AbsResidual => "abs-residual",
    };
    let mut params: BTreeMap<String, String> = BTreeMap::new();
    params.insert("stop".into(), stop_name.to_string());
    params.insert("eps".into(), fmt_float(cmd.eps));

    let (report, problem_name) =
        if is_grid_problem(&cmd.problem) && cmd.method == MethodArg::Stabilized {
            anyhow::ensure!(cmd.x0.is_none(), "the grid path starts at x0 = 0");
            let grid = ReactionDiffusionGrid::<f64>::new(cmd.select.level, cmd.select.kappa)?;
            let k_max = cmd.kmax.unwrap_or(grid.n());
            let stop = stop_rule_for_grid(&cmd, &grid)?;
            anyhow::ensure!(
                matches!(step, StepsizeStrategy::Constant(_)),
                "the grid path supports the constant stepsize"
            );
            params.insert("gamma".into(), fmt_float(cmd.gamma));
            params.insert("alpha".into(), fmt_float(cmd.alpha));
            params.insert("level".into(), cmd.select.level.to_string());
            (
                stabilized_solve_grid(&grid, cmd.gamma, cmd.alpha, &stop, k_max)?,
                "reaction-diffusion".to_string(),
            )
        } else {
            let p = build_problem(&cmd.select.params(&cmd.problem))?;
            let x0 = parse_x0(cmd.x0.as_deref(), p.n())?;
            let k_max = cmd.kmax.unwrap_or(p.n());
            let stop = stop_rule(&cmd, p.x_star.clone())?;
            params.insert("alpha".into(), fmt_float(cmd.alpha));
            let report = match cmd.method {
                MethodArg::Gradient => {
                    let mode = match cmd.mode {
                        ModeArg::Linear => SystemForm::LinearSystem,
                        ModeArg::Beck => SystemForm::BeckQuadratic,
                    };
                    gradient_solve(&p.a, &p.b, &x0, &step, &stop, k_max, mode)?
                }
                MethodArg::Stabilized => {
                    params.insert("gamma".into(), fmt_float(cmd.gamma));
                    stabilized_solve(&p.a, &p.b, &x0, cmd.gamma, &step, &stop, k_max)?
                }
            };
            (report, p.name)
        };

    let method = match cmd.method {
        MethodArg::Gradient => "gradient",
        MethodArg::Stabilized => "stabilized",
    };
    let json = ReportJson::from_report(&problem_name, method, params, &report);
    if let Some(dir) = &cmd.out {
        write_solve_outputs(dir, &json)?;
    }
    println!(
        "problem={} method={} iterations={} stop_reason={} final_residual={}{}",
        json.problem,
        json.method,
        json.iterations,
        json.stop_reason,
        fmt_float(json.final_residual),
        json.final_error
            .map(|e| format!(" final_error={}", fmt_float(e)))
            .unwrap_or_default(),
    );
    Ok(exit_code(report.stop_reason))
}

fn stop_rule(cmd: &SolveCmd, x_star: Option<Vector<f64>>) -> Result<StopRule<f64>> {
    Ok(match cmd.stop {
        StopArg::RelResidual => StopRule::RelativeResidual(cmd.eps),
        StopArg::GradNorm => StopRule::GradientNorm(cmd.eps),
        StopArg::AbsResidual => StopRule::AbsoluteResidual(cmd.eps),
        StopArg::RelError => StopRule::RelativeError {
            eps: cmd.eps,
            x_star: x_star.context("rel-error stop needs a problem with an exact solution")?,
        },
    })
}

fn stop_rule_for_grid(cmd: &SolveCmd, grid: &ReactionDiffusionGrid<f64>) -> Result<StopRule<f64>> {
    Ok(match cmd.stop {
        StopArg::RelResidual => StopRule::RelativeResidual(cmd.eps),
        StopArg::GradNorm => StopRule::GradientNorm(cmd.eps),
        StopArg::AbsResidual => StopRule::AbsoluteResidual(cmd.eps),
        StopArg::RelError => StopRule::RelativeError {
            eps: cmd.eps,
            x_star: grid.exact_solution_vector(),
        },
    })
}

fn cmd_table(cmd: TableCmd) -> Result<i32> {
    let id: TableId = cmd.id.parse()?;
    let report = run_table(id, cmd.n, cmd.max_level)?;
    for row in &report.rows {
        eprintln!(
            "table {} {}={} iterations={} relative_error={}",
            id.name(),
            report.param_name,
            fmt_float(row.param),
            row.iterations,
            fmt_float(row.relative_error),
        );
    }
    let out = cmd
        .out
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", id.name())));
    write_csv(&out, &report.headers(), &report.csv_rows())?;
    println!("wrote {}", out.display());
    Ok(0)
}

fn cmd_analyze(cmd: AnalyzeCmd) -> Result<i32> {
    let out = cmd.out.clone().unwrap_or_else(|| {
        let kind = match cmd.kind {
            AnalyzeKind::FilterFactors => "filter-factors",
            AnalyzeKind::SpectralRadius => "spectral-radius",
            AnalyzeKind::ErrorBound => "error-bound",
        };
        PathBuf::from(format!("{kind}.csv"))
    });
    match cmd.kind {
        AnalyzeKind::FilterFactors => analyze_filter_factors(&cmd, &out),
        AnalyzeKind::SpectralRadius => analyze_spectral_radius(&cmd, &out),
        AnalyzeKind::ErrorBound => analyze_error_bound(&cmd, &out),
    }?;
    println!("wrote {}", out.display());
    Ok(0)
}

fn analyze_filter_factors(cmd: &AnalyzeCmd, out: &Path) -> Result<()> {
    let alpha = *cmd.alpha.first().context("one stepsize required")?;
    let sigma_grid = log_grid(cmd.sigma_min, cmd.sigma_max, cmd.points.max(2))?;
    let sigma = Vector::new(sigma_grid.clone())?;
    let mut headers = vec!["sigma".to_string()];
    let mut columns = Vec::new();
    for &g in &cmd.gamma {
        headers.push(format!("phi_gamma_{g:e}"));
        let t = filter_factors(&sigma, alpha, g, cmd.k)?;
        columns.push(t.phi);
    }
    let rows: Vec<Vec<String>> = (0..sigma_grid.len())
        .map(|i| {
            let mut row = vec![fmt_float(sigma_grid[i])];
            row.extend(columns.iter().map(|c| fmt_float(c[i])));
            row
        })
        .collect();
    let header_refs: Vec<&str> = headers.iter().map(String::as_str).collect();
    write_csv(out, &header_refs, &rows)
}

fn analyze_spectral_radius(cmd: &AnalyzeCmd, out: &Path) -> Result<()> {
    let cfg = PowerConfig::<f64> {
        seed: cmd.seed,
        ..PowerConfig::default()
    };
    match cmd.sweep {
        SweepArg::Gamma => {
            let gammas = log_grid(cmd.gamma_min, cmd.gamma_max, cmd.points.max(2))?;
            let mut headers = vec!["gamma".to_string()];
            for &a in &cmd.alpha {
                headers.push(format!("rho_alpha_{a:e}"));
            }
            let grid_problem = is_grid_problem(&cmd.problem);
            let maybe_grid = grid_problem
                .then(|| ReactionDiffusionGrid::<f64>::new(cmd.select.level, cmd.select.kappa))
                .transpose()?;
            let maybe_dense = (!grid_problem)
                .then(|| build_problem(&cmd.select.params(&cmd.problem)))
                .transpose()?;
            let mut rows = Vec::new();
            for &g in &gammas {
                let mut row = vec![fmt_float(g)];
                for &a in &cmd.alpha {
                    let rho = if let Some(grid) = &maybe_grid {
                        let chol = BandedSpd::<f64>::stabilized_operator(grid, g).cholesky()?;
                        let est = spectral_radius_estimate(
                            |x| {
                                let ax = grid.apply_operator(x);
                                chol.solve(&x.axpy(-a, &ax)).expect("fixed dims")
                            },
                            grid.n(),
                            &cfg,
                        );
                        est.value
                    } else {
                        let p = maybe_dense.as_ref().expect("dense problem built");
                        let op = stabilized_iteration_matrix(&p.a, a, g)?;
                        let est = spectral_radius_estimate(|x| op.apply(x), p.n(), &cfg);
                        if !est.converged {
                            eprintln!(
                                "warning: power iteration stalled at gamma={g:e} alpha={a:e}"
                            );
                        }
                        est.value
                    };
                    row.push(fmt_float(rho));
                }
                rows.push(row);
            }
            let header_refs: Vec<&str> = headers.iter().map(String::as_str).collect();
            write_csv(out, &header_refs, &rows)
        }
        SweepArg::Alpha => {
            let p = build_problem(&cmd.select.params(&cmd.problem))?;
            let alphas = log_grid(cmd.alpha_min, cmd.alpha_max, cmd.points.max(2))?;
            let mut rows = Vec::new();
            for &a in &alphas {
                let m = p.a.identity_minus_scaled(a)?;
                let est = spectral_radius_estimate(|x| m.matvec(x).expect("square"), p.n(), &cfg);
                rows.push(vec![fmt_float(a), fmt_float(est.value)]);
            }
            write_csv(out, &["alpha", "rho"], &rows)
        }
    }
}

fn analyze_error_bound(cmd: &AnalyzeCmd, out: &Path) -> Result<()> {
    let p = build_problem(&cmd.select.params(&cmd.problem))?;
    let x_star = p
        .x_star
        .clone()
        .context("error bound needs an exact solution")?;
    let alpha = *cmd.alpha.first().context("one stepsize required")?;
    anyhow::ensure!(cmd.kmax >= 1, "--kmax must be >= 1");
    let x0 = Vector::zeros(p.n());
    let mut headers = vec!["k".to_string()];
    for &g in &cmd.gamma {
        headers.push(format!("bound_gamma_{g:e}"));
    }
    let mut rows = Vec::new();
    for k in 1..=cmd.kmax {
        let params = BoundParameters::from_constant_step(&p.a, alpha, k, &x0, &x_star)?;
        let mut row = vec![k.to_string()];
        for &g in &cmd.gamma {
            row.push(fmt_float(error_bound(&params, g, k)));
        }
        rows.push(row);
    }
    let header_refs: Vec<&str> = headers.iter().map(String::as_str).collect();
    write_csv(out, &header_refs, &rows)
}
