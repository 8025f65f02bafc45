//! End-to-end tests of the `stabgrad` binary: file outputs, exit codes
//! and output determinism.

use std::path::Path;
use std::process::{Command, Output};

use stabgrad_core::dense::market;

fn stabgrad(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stabgrad"))
        .args(args)
        .current_dir(dir)
        .env("STABGRAD_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("reading {}: {e}", path.display()))
}

#[test]
fn problem_a1_writes_three_files_with_exact_entries() {
    let dir = tempfile::tempdir().unwrap();
    let out = stabgrad(&["problem", "a1", "--out", "p"], dir.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let p = dir.path().join("p");
    let mut files: Vec<String> = std::fs::read_dir(&p)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    files.sort();
    assert_eq!(files, vec!["a1.mtx", "a1_meta.json", "a1_vectors.csv"]);

    let a = market::read_matrix_file::<f64>(&p.join("a1.mtx")).unwrap();
    assert_eq!(a.row(0), &[1.0, 2.0, 3.0, 4.0]);
    assert_eq!(a.row(1), &[4.0, 5.0, 6.0, 7.0]);
    assert_eq!(a.row(2), &[4.0, 3.0, 2.0, 0.0]);
    assert_eq!(a.row(3), &[0.0, 2.0, 3.0, 4.0]);

    let vectors = read(&p.join("a1_vectors.csv"));
    assert!(vectors.starts_with("index,b,x_star\n"));
}

#[test]
fn problem_shaw_respects_n() {
    let dir = tempfile::tempdir().unwrap();
    let out = stabgrad(&["problem", "shaw", "--n", "10", "--out", "p"], dir.path());
    assert!(out.status.success());
    let a = market::read_matrix_file::<f64>(&dir.path().join("p/shaw.mtx")).unwrap();
    assert_eq!((a.rows(), a.cols()), (10, 10));
}

#[test]
fn problem_gravity_reports_rank_in_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let out = stabgrad(
        &[
            "problem",
            "gravity",
            "--n",
            "100",
            "--with-rank",
            "--out",
            "p",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let meta: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("p/gravity_meta.json"))).unwrap();
    let rank = meta["rank"].as_u64().unwrap();
    assert!((14..=16).contains(&rank), "rank(gravity(100)) = {rank}");
}

#[test]
fn unknown_problem_exits_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = stabgrad(&["problem", "nope", "--out", "p"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn solve_stabilized_a1_converges_in_one_iteration() {
    let dir = tempfile::tempdir().unwrap();
    let out = stabgrad(
        &[
            "solve",
            "--problem",
            "a1",
            "--method",
            "stabilized",
            "--gamma",
            "1e10",
            "--alpha",
            "1",
            "--stop",
            "rel-error",
            "--eps",
            "1e-5",
            "--kmax",
            "100",
            "--out",
            "s",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("s/report.json"))).unwrap();
    assert_eq!(report["iterations"], 1);
    assert_eq!(report["stop_reason"], "converged");
    let history = read(&dir.path().join("s/history.csv"));
    assert!(history.starts_with("k,residual,error\n"));
    assert_eq!(history.lines().count(), 3); // header + x0 + one iterate
}

#[test]
fn solve_beck_constant_counts_58_iterations() {
    let dir = tempfile::tempdir().unwrap();
    let out = stabgrad(
        &[
            "solve",
            "--problem",
            "beck",
            "--a-param",
            "2",
            "--method",
            "gradient",
            "--mode",
            "beck",
            "--stepsize",
            "constant",
            "--alpha",
            "0.1",
            "--stop",
            "grad-norm",
            "--eps",
            "1e-5",
            "--kmax",
            "1000",
            "--x0",
            "2,1",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("iterations=58"), "stdout: {stdout}");
}

#[test]
fn solve_exit_codes_follow_the_contract() {
    let dir = tempfile::tempdir().unwrap();
    // divergence: gradient on a1 with alpha = 1
    let out = stabgrad(
        &[
            "solve",
            "--problem",
            "a1",
            "--method",
            "gradient",
            "--stepsize",
            "constant",
            "--alpha",
            "1",
            "--stop",
            "rel-residual",
            "--eps",
            "1e-5",
            "--kmax",
            "1000",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
    // iteration cap: one step short of convergence
    let out = stabgrad(
        &[
            "solve",
            "--problem",
            "beck",
            "--method",
            "gradient",
            "--mode",
            "beck",
            "--stepsize",
            "constant",
            "--alpha",
            "0.1",
            "--stop",
            "grad-norm",
            "--eps",
            "1e-5",
            "--kmax",
            "5",
            "--x0",
            "2,1",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    // config error: bad stepsize name
    let out = stabgrad(
        &["solve", "--problem", "a1", "--stepsize", "zigzag"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn table_wellc1_counts_and_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = stabgrad(&["table", "wellc1", "--out", "w.csv"], dir.path());
    assert!(out.status.success());
    let text = read(&dir.path().join("w.csv"));
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "gamma,residual,relative_residual,error,relative_error,iterations"
    );
    let iters: Vec<&str> = lines.map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(iters, vec!["7", "4", "2", "2", "1", "1"]);
}

#[test]
fn table_tab481_iteration_counts() {
    let dir = tempfile::tempdir().unwrap();
    let out = stabgrad(&["table", "tab481", "--out", "t.csv"], dir.path());
    assert!(out.status.success());
    let text = read(&dir.path().join("t.csv"));
    let iters: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap())
        .collect();
    assert_eq!(iters, vec!["17", "6", "3", "2", "1", "1"]);
}

#[test]
fn table_shaw1_small_n_keeps_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = stabgrad(
        &["table", "shaw1", "--n", "50", "--out", "s.csv"],
        dir.path(),
    );
    assert!(out.status.success());
    let text = read(&dir.path().join("s.csv"));
    assert!(text.starts_with("gamma,residual,relative_residual,error,relative_error,iterations\n"));
    assert_eq!(text.lines().count(), 8); // header + 7 gamma rows
}

#[test]
fn every_table_id_shares_the_documented_schema() {
    // schema check only; cheap sizes where the id allows an override
    let dir = tempfile::tempdir().unwrap();
    for (id, extra) in [
        ("wellc1", vec![]),
        ("tab461", vec![]),
        ("tab491", vec![]),
        ("gravity1", vec!["--n", "30"]),
        ("heat1", vec!["--n", "30"]),
        ("tabef0", vec![]),
        ("tabef1", vec!["--max-level", "5"]),
    ] {
        let mut args = vec!["table", id, "--out", "x.csv"];
        args.extend(extra);
        let out = stabgrad(&args, dir.path());
        assert!(out.status.success(), "table {id} failed");
        let text = read(&dir.path().join("x.csv"));
        let header = text.lines().next().unwrap();
        let expected = if id == "tabef1" {
            "h,residual,relative_residual,error,relative_error,iterations"
        } else {
            "gamma,residual,relative_residual,error,relative_error,iterations"
        };
        assert_eq!(header, expected, "table {id}");
    }
}

#[test]
fn unknown_table_id_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = stabgrad(&["table", "unknown"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn analyze_filter_factors_saturate_at_huge_gamma() {
    let dir = tempfile::tempdir().unwrap();
    let out = stabgrad(
        &[
            "analyze",
            "filter-factors",
            "--alpha",
            "1",
            "--gamma",
            "1e30",
            "--k",
            "1",
            "--points",
            "50",
            "--out",
            "ff.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let text = read(&dir.path().join("ff.csv"));
    for line in text.lines().skip(1) {
        let phi: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((phi - 1.0).abs() <= 1e-10, "phi = {phi}");
    }
}

#[test]
fn analyze_spectral_radius_sweep_brackets_the_gradient_limit() {
    let dir = tempfile::tempdir().unwrap();
    let out = stabgrad(
        &[
            "analyze",
            "spectral-radius",
            "--problem",
            "a1",
            "--alpha",
            "1",
            "--gamma-min",
            "1e-12",
            "--gamma-max",
            "1e15",
            "--points",
            "10",
            "--out",
            "sr.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let text = read(&dir.path().join("sr.csv"));
    let rows: Vec<(f64, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let mut it = l.split(',');
            (
                it.next().unwrap().parse().unwrap(),
                it.next().unwrap().parse().unwrap(),
            )
        })
        .collect();
    // the vanishing-stabilization endpoint recovers the gradient radius
    assert!(
        (rows[0].1 - 11.3527).abs() <= 1e-3,
        "endpoint {}",
        rows[0].1
    );
    // convergent regime past gamma = 100
    for &(g, rho) in &rows {
        if g >= 100.0 {
            assert!(rho < 1.0, "rho({g}) = {rho}");
        }
    }
}

#[test]
fn analyze_rejects_invalid_sweep_ranges() {
    let dir = tempfile::tempdir().unwrap();
    let out = stabgrad(
        &[
            "analyze", "spectral-radius", "--problem", "a1", "--gamma-min", "100",
            "--gamma-max", "1", "--out", "bad.csv",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    let out = stabgrad(
        &["analyze", "filter-factors", "--sigma-min", "0", "--out", "bad.csv"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn table_output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = stabgrad(&["table", "wellc1", "--out", "one.csv"], dir.path());
    let b = stabgrad(&["table", "wellc1", "--out", "two.csv"], dir.path());
    assert!(a.status.success() && b.status.success());
    let one = std::fs::read(dir.path().join("one.csv")).unwrap();
    let two = std::fs::read(dir.path().join("two.csv")).unwrap();
    assert_eq!(one, two);
}
