//! JSON report schema for `stabgrad solve`.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::Result;
use serde::Serialize;
use stabgrad_core::solvers::{SolveReport, StopReason};

use crate::output;

#[derive(Debug, Serialize)]
pub struct Histories {
    pub residual: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<Vec<f64>>,
}

/// Serialized form of a solve: configuration echo plus outcome.
#[derive(Debug, Serialize)]
pub struct ReportJson {
    pub problem: String,
    pub method: String,
    pub params: BTreeMap<String, String>,
    pub iterations: usize,
    pub stop_reason: String,
    pub final_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_error: Option<f64>,
    pub histories: Histories,
}

pub fn stop_reason_name(r: StopReason) -> &'static str {
    match r {
        StopReason::Converged => "converged",
        StopReason::MaxIterations => "max_iterations",
        StopReason::Diverged => "diverged",
    }
}

/// Process exit code contract: 0 converged, 2 max-iterations, 3 diverged.
pub fn exit_code(r: StopReason) -> i32 {
    match r {
        StopReason::Converged => 0,
        StopReason::MaxIterations => 2,
        StopReason::Diverged => 3,
    }
}

impl ReportJson {
    pub fn from_report(
        problem: &str,
        method: &str,
        params: BTreeMap<String, String>,
        report: &SolveReport<f64>,
    ) -> Self {
        Self {
            problem: problem.to_string(),
            method: method.to_string(),
            params,
            iterations: report.iterations,
            stop_reason: stop_reason_name(report.stop_reason).to_string(),
            final_residual: report.final_residual(),
            final_error: report.final_error(),
            histories: Histories {
                residual: report.residual_history.clone(),
                error: report.error_history.clone(),
            },
        }
    }
}

/// Writes `report.json` and `history.csv` into `dir`.
pub fn write_solve_outputs(dir: &Path, json: &ReportJson) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    output::write_json(&dir.join("report.json"), json)?;
    let mut rows = Vec::with_capacity(json.histories.residual.len());
    for (k, &r) in json.histories.residual.iter().enumerate() {
        let mut row = vec![k.to_string(), output::fmt_float(r)];
        if let Some(err) = &json.histories.error {
            row.push(output::fmt_float(err[k]));
        }
        rows.push(row);
    }
    let headers: &[&str] = if json.histories.error.is_some() {
        &["k", "residual", "error"]
    } else {
        &["k", "residual"]
    };
    output::write_csv(&dir.join("history.csv"), headers, &rows)
}
