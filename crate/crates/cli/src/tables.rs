//! Experiment tables: each id reruns one parameter grid and yields rows of
//! (gamma-or-h, residual, relative residual, error, relative error,
//! iterations). Cells are independent pure solves and may run in parallel.

use std::str::FromStr;

use anyhow::{bail, Context, Result};
use stabgrad_core::dense::Vector;
use stabgrad_core::problems::grid::{stabilized_solve_grid, ReactionDiffusionGrid};
use stabgrad_core::problems::{beck_quadratic, gravity, heat, matrix_a1, matrix_a2, shaw, Problem};
use stabgrad_core::solvers::{stabilized_solve, SolveReport, StepsizeStrategy, StopRule};

use crate::output::fmt_float;
use crate::parallel;

/// Identifiers of the reproducible tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableId {
    WellC1,
    WellC2,
    Tab461,
    Tab481,
    Tab491,
    Shaw1,
    Heat1,
    Gravity1,
    TabEf0,
    TabEf1,
}

impl TableId {
    pub const ALL: [TableId; 10] = [
        TableId::WellC1,
        TableId::WellC2,
        TableId::Tab461,
        TableId::Tab481,
        TableId::Tab491,
        TableId::Shaw1,
        TableId::Heat1,
        TableId::Gravity1,
        TableId::TabEf0,
        TableId::TabEf1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TableId::WellC1 => "wellc1",
            TableId::WellC2 => "wellc2",
            TableId::Tab461 => "tab461",
            TableId::Tab481 => "tab481",
            TableId::Tab491 => "tab491",
            TableId::Shaw1 => "shaw1",
            TableId::Heat1 => "heat1",
            TableId::Gravity1 => "gravity1",
            TableId::TabEf0 => "tabef0",
            TableId::TabEf1 => "tabef1",
        }
    }
}

impl FromStr for TableId {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        TableId::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .with_context(|| {
                let names: Vec<&str> = TableId::ALL.iter().map(|t| t.name()).collect();
                format!("unknown table '{s}' (expected one of {})", names.join(", "))
            })
    }
}

/// One table cell.
#[derive(Debug, Clone)]
pub struct TableRow {
    /// Stabilization weight gamma, or the mesh size h for level sweeps.
    pub param: f64,
    pub residual: f64,
    pub relative_residual: f64,
    pub error: f64,
    pub relative_error: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct TableReport {
    pub id: TableId,
    /// Name of the first column: `gamma` or `h`.
    pub param_name: &'static str,
    pub rows: Vec<TableRow>,
}

pub const TABLE_COLUMNS: [&str; 6] = [
    "", // replaced by param_name
    "residual",
    "relative_residual",
    "error",
    "relative_error",
    "iterations",
];

impl TableReport {
    pub fn headers(&self) -> Vec<&str> {
        let mut h: Vec<&str> = TABLE_COLUMNS.to_vec();
        h[0] = self.param_name;
        h
    }

    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    fmt_float(r.param),
                    fmt_float(r.residual),
                    fmt_float(r.relative_residual),
                    fmt_float(r.error),
                    fmt_float(r.relative_error),
                    r.iterations.to_string(),
                ]
            })
            .collect()
    }
}

fn row_from_report(
    param: f64,
    p: &Problem<f64>,
    x_star: &Vector<f64>,
    x0: &Vector<f64>,
    report: &SolveReport<f64>,
) -> TableRow {
    let residual = report.final_residual();
    let r0 = p.a.matvec(x0).expect("dims").sub(&p.b).norm();
    let error = x_star.sub(&report.final_x).norm();
    let xs_norm = x_star.norm();
    TableRow {
        param,
        residual,
        relative_residual: if r0 > 0.0 { residual / r0 } else { 0.0 },
        error,
        // zero exact solution (the quadratic testbeds): absolute error
        relative_error: if xs_norm > 0.0 {
            error / xs_norm
        } else {
            error
        },
        iterations: report.iterations,
    }
}

struct StabilizedGrid {
    problem: Problem<f64>,
    x0: Vector<f64>,
    gammas: Vec<f64>,
    step: StepsizeStrategy<f64>,
    stop: StopRule<f64>,
    k_max: usize,
}

impl StabilizedGrid {
    fn run(&self, threads: usize) -> Result<Vec<TableRow>> {
        let x_star = self
            .problem
            .x_star
            .clone()
            .context("table problems carry exact solutions")?;
        let rows = parallel::run_cells(self.gammas.len(), threads, |i| {
            let gamma = self.gammas[i];
            let report = stabilized_solve(
                &self.problem.a,
                &self.problem.b,
                &self.x0,
                gamma,
                &self.step,
                &self.stop,
                self.k_max,
            )?;
            Ok(row_from_report(
                gamma,
                &self.problem,
                &x_star,
                &self.x0,
                &report,
            ))
        });
        rows.into_iter().collect()
    }
}

const WELLC_GAMMAS: [f64; 6] = [1e3, 1e4, 1e5, 1e6, 1e10, 1e12];
const BECK_GAMMAS: [f64; 6] = [1.0, 10.0, 1e2, 1e5, 1e7, 1e10];
const EF0_GAMMAS: [f64; 6] = [1e4, 1e6, 1e8, 1e10, 1e15, 1e20];

fn wellc_table(problem: Problem<f64>) -> Result<StabilizedGrid> {
    let x_star = problem.x_star.clone().context("x_star")?;
    Ok(StabilizedGrid {
        x0: Vector::zeros(problem.n()),
        problem,
        gammas: WELLC_GAMMAS.to_vec(),
        step: StepsizeStrategy::Constant(1.0),
        stop: StopRule::RelativeError { eps: 1e-5, x_star },
        k_max: 100,
    })
}

fn beck_table(
    a_param: f64,
    x0: Vec<f64>,
    step: StepsizeStrategy<f64>,
    k_max: usize,
) -> Result<StabilizedGrid> {
    let problem = beck_quadratic(a_param)?;
    Ok(StabilizedGrid {
        problem,
        x0: Vector::new(x0)?,
        gammas: BECK_GAMMAS.to_vec(),
        step,
        stop: StopRule::GradientNorm(1e-5),
        k_max,
    })
}

fn fredholm_table(problem: Problem<f64>, gammas: Vec<f64>) -> StabilizedGrid {
    let n = problem.n();
    StabilizedGrid {
        x0: Vector::zeros(n),
        problem,
        gammas,
        step: StepsizeStrategy::Constant(1.0),
        stop: StopRule::RelativeResidual(1e-5),
        k_max: n,
    }
}

/// Reaction-diffusion cells run through the banded grid path; `param` is
/// gamma for the fixed-mesh table and the longest edge h for the sweep.
fn grid_row(level: u32, gamma: f64, param: f64) -> Result<TableRow> {
    let grid = ReactionDiffusionGrid::<f64>::new(level, 1.0)?;
    let u_star = grid.exact_solution_vector();
    let stop = StopRule::RelativeError {
        eps: grid.longest_edge(),
        x_star: u_star.clone(),
    };
    let report = stabilized_solve_grid(&grid, gamma, 1.0, &stop, 100)?;
    let b = grid.forcing_vector();
    let r0 = b.norm(); // x0 = 0
    let error = u_star.sub(&report.final_x).norm();
    Ok(TableRow {
        param,
        residual: report.final_residual(),
        relative_residual: if r0 > 0.0 {
            report.final_residual() / r0
        } else {
            0.0
        },
        error,
        relative_error: error / u_star.norm(),
        iterations: report.iterations,
    })
}

/// Runs a table. `n` overrides the problem size of the shaw/heat/gravity
/// tables; `max_level` caps the mesh sweep of `tabef1`.
pub fn run_table(id: TableId, n: Option<usize>, max_level: Option<u32>) -> Result<TableReport> {
    let threads = parallel::thread_cap();
    if n.is_some() && !matches!(id, TableId::Shaw1 | TableId::Heat1 | TableId::Gravity1) {
        bail!("--n only applies to the shaw1, heat1 and gravity1 tables");
    }
    if max_level.is_some() && id != TableId::TabEf1 {
        bail!("--max-level only applies to the tabef1 table");
    }
    let rows = match id {
        TableId::WellC1 => wellc_table(matrix_a1())?.run(threads)?,
        TableId::WellC2 => wellc_table(matrix_a2())?.run(threads)?,
        TableId::Tab461 => {
            beck_table(2.0, vec![2.0, 1.0], StepsizeStrategy::ExactLineSearch, 100)?.run(threads)?
        }
        TableId::Tab481 => {
            beck_table(2.0, vec![2.0, 1.0], StepsizeStrategy::Constant(0.1), 100)?.run(threads)?
        }
        TableId::Tab491 => beck_table(
            0.01,
            vec![0.01, 1.0],
            StepsizeStrategy::Backtracking {
                s: 2.0,
                slope_coeff: 0.25,
                shrink: 0.5,
            },
            1000,
        )?
        .run(threads)?,
        TableId::Shaw1 => {
            let n = n.unwrap_or(1000);
            fredholm_table(shaw(n)?, vec![1e3, 1e4, 1e5, 1e6, 1e10, 1e12, 1e14]).run(threads)?
        }
        TableId::Heat1 => {
            let n = n.unwrap_or(1000);
            fredholm_table(heat(n, 1.0)?, vec![1e3, 1e4, 1e5, 1e6, 1e10, 1e12, 1e16])
                .run(threads)?
        }
        TableId::Gravity1 => {
            let n = n.unwrap_or(1000);
            fredholm_table(gravity(n)?, vec![1e3, 1e4, 1e5, 1e6, 1e10, 1e12, 1e15]).run(threads)?
        }
        TableId::TabEf0 => {
            let cells: Vec<Result<TableRow>> =
                parallel::run_cells(EF0_GAMMAS.len(), threads, |i| {
                    grid_row(6, EF0_GAMMAS[i], EF0_GAMMAS[i])
                });
            cells.into_iter().collect::<Result<Vec<_>>>()?
        }
        TableId::TabEf1 => {
            let hi = max_level.unwrap_or(8);
            anyhow::ensure!((4..=12).contains(&hi), "--max-level must be in 4..=12");
            let levels: Vec<u32> = (4..=hi).collect();
            let cells: Vec<Result<TableRow>> = parallel::run_cells(levels.len(), threads, |i| {
                let level = levels[i];
                let h = std::f64::consts::SQRT_2 * 2.0 / (1u64 << level) as f64;
                grid_row(level, 1e15, h)
            });
            cells.into_iter().collect::<Result<Vec<_>>>()?
        }
    };
    Ok(TableReport {
        id,
        param_name: if id == TableId::TabEf1 { "h" } else { "gamma" },
        rows,
    })
}
