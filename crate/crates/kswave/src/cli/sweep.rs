//! Parameter sweeps: the cross product of `mu`, `beta`, `D`, and
//! sensitivity axes, one empirical threshold bisection per cell, written
//! as a fixed-schema CSV plus an error heatmap.
//!
//! Axes are sorted and deduplicated before enumeration, and rows are
//! emitted in lexicographic `(mu, beta, D, chi)` order, so the CSV is
//! byte-stable under reruns and independent of worker scheduling. A row
//! that fails (inadmissible cell, invalid bracket) records the error in
//! its `outcome_counts` column; remaining rows still run, and the command
//! exits nonzero only at the end.

use std::fmt::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::heteroclinic::{find_min_speed_empirical, OutcomeCounts, ShootConfig};
use crate::model::ModelParams;
use crate::spectra::min_wave_speed;

use super::commands::CommandReport;
use super::config::parse_chi_spec;
use super::manifest::RunDir;
use super::svg;
use super::CliError;

/// Fixed column header of `sweep.csv`; schema version 1.
pub const SWEEP_CSV_HEADER: &str =
    "mu,beta,D,chi_id,c_star_closed,c_star_empirical,abs_err,outcome_counts";

fn default_diff_axis() -> Vec<f64> {
    vec![0.0]
}

fn default_tol() -> f64 {
    1e-3
}

fn default_cap() -> usize {
    10_000
}

/// Declarative sweep request, loadable from JSON or assembled from flags.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub mu: Vec<f64>,
    pub beta: Vec<f64>,
    #[serde(rename = "D", default = "default_diff_axis")]
    pub diff: Vec<f64>,
    /// Sensitivity specs in the `const:`/`affine:`/`table:` grammar.
    pub chi: Vec<String>,
    /// Bisection tolerance shared by every cell.
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Hard ceiling on the number of cells.
    #[serde(default = "default_cap")]
    pub cap: usize,
    /// Worker threads; 0 picks the available parallelism.
    #[serde(default, skip_serializing)]
    pub threads: usize,
}

/// One cell of the cross product, in row order.
#[derive(Debug, Clone)]
struct Case {
    mu: f64,
    beta: f64,
    diff: f64,
    chi_id: String,
}

struct RowResult {
    c_star_closed: f64,
    outcome: Result<(f64, f64, OutcomeCounts), String>,
}

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| a.partial_cmp(b).expect("axis values must be comparable"));
    v.dedup();
    v
}

impl SweepSpec {
    /// Sorts the axes and expands the cross product, enforcing the cap.
    fn cases(&self) -> Result<Vec<Case>, CliError> {
        for (name, axis) in [("mu", &self.mu), ("beta", &self.beta), ("D", &self.diff)] {
            if axis.is_empty() {
                return Err(CliError::Config(format!("sweep axis `{name}` is empty")));
            }
            if axis.iter().any(|x| !x.is_finite()) {
                return Err(CliError::Config(format!("sweep axis `{name}` has a non-finite value")));
            }
        }
        if self.chi.is_empty() {
            return Err(CliError::Config("sweep axis `chi` is empty".into()));
        }
        if !(self.tol > 0.0) {
            return Err(CliError::Config(format!("tolerance must be positive, got {}", self.tol)));
        }
        let mu = sorted_unique(self.mu.clone());
        let beta = sorted_unique(self.beta.clone());
        let diff = sorted_unique(self.diff.clone());
        let mut chi = self.chi.clone();
        chi.sort();
        chi.dedup();

        let n = mu.len() * beta.len() * diff.len() * chi.len();
        if n > self.cap {
            return Err(CliError::Config(format!(
                "sweep would run {n} cells, above the cap of {}",
                self.cap
            )));
        }
        let mut cases = Vec::with_capacity(n);
        for &m in &mu {
            for &b in &beta {
                for &d in &diff {
                    for ci in &chi {
                        cases.push(Case { mu: m, beta: b, diff: d, chi_id: ci.clone() });
                    }
                }
            }
        }
        Ok(cases)
    }
}

fn run_case(case: &Case, tol: f64) -> RowResult {
    let attempt = || -> Result<(f64, f64, f64, OutcomeCounts), String> {
        let (chi, _) = parse_chi_spec(&case.chi_id).map_err(|e| e.to_string())?;
        let p = ModelParams::new(case.mu, case.beta, case.diff, chi).map_err(|e| e.to_string())?;
        let closed = min_wave_speed(&p).c_star;
        let emp = find_min_speed_empirical(
            &p,
            [0.4 * closed, 2.5 * closed],
            tol,
            &ShootConfig::default(),
        )
        .map_err(|e| e.to_string())?;
        Ok((closed, emp.c_min, (emp.c_min - closed).abs(), emp.counts))
    };
    match attempt() {
        Ok((closed, emp, err, counts)) => {
            RowResult { c_star_closed: closed, outcome: Ok((emp, err, counts)) }
        }
        Err(msg) => {
            // The closed form needs no admissibility, so report it even for
            // failed rows when the inputs are at least finite.
            let closed = 2.0 * case.mu.sqrt().max((case.diff * case.beta).sqrt());
            RowResult { c_star_closed: closed, outcome: Err(msg) }
        }
    }
}

/// Flattens an error message into a single CSV-safe token.
fn csv_safe(msg: &str) -> String {
    msg.chars().map(|ch| if ch == ',' || ch == '\n' || ch == '\r' { ';' } else { ch }).collect()
}

/// Runs the sweep and writes `sweep.csv`, an error heatmap, and the
/// manifest. Returns a numerical-failure error if any row failed, after
/// all artifacts are on disk.
pub fn cmd_sweep(spec: &SweepSpec, out_root: &std::path::Path) -> Result<CommandReport, CliError> {
    let cases = spec.cases()?;
    let n = cases.len();

    // Identity of the run: the scientific request, not execution knobs.
    let mut chi_axis = spec.chi.clone();
    chi_axis.sort();
    chi_axis.dedup();
    let run_config = json!({
        "mu": sorted_unique(spec.mu.clone()),
        "beta": sorted_unique(spec.beta.clone()),
        "D": sorted_unique(spec.diff.clone()),
        "chi": chi_axis,
        "tol": spec.tol,
        "cap": spec.cap,
    });
    let mut run = RunDir::create(out_root, "sweep", &run_config)?;
    for case in &cases {
        if let Ok((_, inputs)) = parse_chi_spec(&case.chi_id) {
            run.note_inputs(&inputs);
        }
    }

    let threads = if spec.threads == 0 {
        std::thread::available_parallelism().map(|p| p.get()).unwrap_or(1).min(n.max(1))
    } else {
        spec.threads.min(n.max(1))
    };
    let results: Mutex<Vec<Option<RowResult>>> = Mutex::new((0..n).map(|_| None).collect());
    let cursor = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let idx = cursor.fetch_add(1, Ordering::Relaxed);
                if idx >= n {
                    break;
                }
                let row = run_case(&cases[idx], spec.tol);
                results.lock().expect("no panics hold this lock")[idx] = Some(row);
            });
        }
    });
    let results = results.into_inner().expect("workers joined");

    let mut csv = String::from(SWEEP_CSV_HEADER);
    csv.push('\n');
    let mut failed = 0usize;
    let mut worst_abs = 0.0f64;
    for (case, row) in cases.iter().zip(&results) {
        let row = row.as_ref().expect("every slot filled");
        let _ = write!(
            csv,
            "{},{},{},{},{}",
            case.mu, case.beta, case.diff, case.chi_id, row.c_star_closed
        );
        match &row.outcome {
            Ok((emp, abs_err, counts)) => {
                let _ = writeln!(csv, ",{emp},{abs_err},{counts}");
                worst_abs = worst_abs.max(*abs_err);
            }
            Err(msg) => {
                failed += 1;
                let _ = writeln!(csv, ",,,error:{}", csv_safe(msg));
            }
        }
    }
    run.write("sweep.csv", csv.as_bytes())?;

    // Heatmap: worst absolute threshold error per (mu, beta), maximizing
    // over the remaining axes. Cells whose rows all failed stay gray.
    let mu_axis = sorted_unique(spec.mu.clone());
    let beta_axis = sorted_unique(spec.beta.clone());
    let mut cells = vec![vec![None::<f64>; beta_axis.len()]; mu_axis.len()];
    for (case, row) in cases.iter().zip(&results) {
        let row = row.as_ref().expect("every slot filled");
        if let Ok((_, abs_err, _)) = &row.outcome {
            let r = mu_axis.iter().position(|&m| m == case.mu).expect("axis member");
            let c = beta_axis.iter().position(|&b| b == case.beta).expect("axis member");
            let cur = cells[r][c].get_or_insert(0.0);
            *cur = cur.max(*abs_err);
        }
    }
    let fmt_axis = |v: &[f64]| v.iter().map(|x| format!("{x}")).collect::<Vec<_>>();
    run.write(
        "heatmap.svg",
        svg::heatmap(
            "worst |empirical - closed| threshold error",
            "beta",
            "mu",
            &fmt_axis(&beta_axis),
            &fmt_axis(&mu_axis),
            &cells,
        )
        .as_bytes(),
    )?;

    let result = json!({
        "cells": n,
        "failed": failed,
        "tol": spec.tol,
        "worst_abs_err": worst_abs,
    });
    let json = serde_json::to_string_pretty(&result)?;
    run.write("result.json", json.as_bytes())?;
    let (_, dir) = run.finish()?;

    if failed > 0 {
        return Err(CliError::Numerical(format!(
            "{failed} of {n} sweep rows failed; per-row errors recorded in {}",
            dir.join("sweep.csv").display()
        )));
    }
    let summary = format!(
        "swept {n} cells at bisection tolerance {}; worst |empirical - closed| = {worst_abs:.3e}",
        spec.tol
    );
    Ok(CommandReport { summary, json, run_dir: dir })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_spec() -> SweepSpec {
        SweepSpec {
            mu: vec![4.0, 1.0],
            beta: vec![1.0],
            diff: vec![0.0],
            chi: vec!["const:0".into()],
            tol: 0.05,
            cap: 10_000,
            threads: 2,
        }
    }

    #[test]
    fn rows_come_out_in_lexicographic_order_regardless_of_axis_order() {
        let tmp = tempfile::tempdir().unwrap();
        let rep = cmd_sweep(&tiny_spec(), tmp.path()).unwrap();
        let csv = std::fs::read_to_string(rep.run_dir.join("sweep.csv")).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], SWEEP_CSV_HEADER);
        assert!(lines[1].starts_with("1,1,0,const:0,2,"));
        assert!(lines[2].starts_with("4,1,0,const:0,4,"));
        assert_eq!(lines.len(), 3);
    }

    #[test]
    fn reruns_reproduce_the_csv_byte_for_byte() {
        let tmp = tempfile::tempdir().unwrap();
        let rep1 = cmd_sweep(&tiny_spec(), tmp.path()).unwrap();
        let csv1 = std::fs::read(rep1.run_dir.join("sweep.csv")).unwrap();
        let rep2 = cmd_sweep(&tiny_spec(), tmp.path()).unwrap();
        let csv2 = std::fs::read(rep2.run_dir.join("sweep.csv")).unwrap();
        assert_eq!(rep1.run_dir, rep2.run_dir);
        assert_eq!(csv1, csv2);
    }

    #[test]
    fn empirical_thresholds_land_near_the_closed_forms() {
        let tmp = tempfile::tempdir().unwrap();
        let rep = cmd_sweep(&tiny_spec(), tmp.path()).unwrap();
        let csv = std::fs::read_to_string(rep.run_dir.join("sweep.csv")).unwrap();
        for line in csv.lines().skip(1) {
            let cols: Vec<&str> = line.split(',').collect();
            let closed: f64 = cols[4].parse().unwrap();
            let emp: f64 = cols[5].parse().unwrap();
            assert!((emp - closed).abs() / closed < 0.03, "{line}");
            assert!(cols[7].starts_with("converged="));
        }
        assert!(rep.run_dir.join("heatmap.svg").exists());
    }

    #[test]
    fn the_cap_rejects_oversized_cross_products() {
        let spec = SweepSpec { cap: 1, ..tiny_spec() };
        let tmp = tempfile::tempdir().unwrap();
        let err = cmd_sweep(&spec, tmp.path()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("cap"));
    }

    #[test]
    fn empty_axes_are_rejected() {
        let spec = SweepSpec { beta: vec![], ..tiny_spec() };
        let tmp = tempfile::tempdir().unwrap();
        assert_eq!(cmd_sweep(&spec, tmp.path()).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn failed_rows_are_recorded_in_place_and_reported_at_the_end() {
        let mut spec = tiny_spec();
        spec.mu = vec![1.0];
        spec.chi = vec!["const:0".into(), "table:/no/such/file".into()];
        let tmp = tempfile::tempdir().unwrap();
        let err = cmd_sweep(&spec, tmp.path()).unwrap_err();
        assert_eq!(err.exit_code(), 4);

        // The artifacts are still on disk with both rows present.
        let dir = tmp.path().read_dir().unwrap().next().unwrap().unwrap().path();
        let csv = std::fs::read_to_string(dir.join("sweep.csv")).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[1].contains("const:0,2,"));
        assert!(lines[2].contains("error:"));
        assert!(!lines[2].contains(",,error:,"));
    }

    #[test]
    fn spec_json_defaults_fill_tol_diffusion_and_cap() {
        let spec: SweepSpec =
            serde_json::from_str(r#"{"mu": [1.0], "beta": [1.0], "chi": ["const:0"]}"#).unwrap();
        assert_eq!(spec.diff, vec![0.0]);
        assert_eq!(spec.tol, 1e-3);
        assert_eq!(spec.cap, 10_000);
        assert_eq!(spec.threads, 0);
    }
}
