//! The single-run subcommands: `speed`, `shoot`, `minspeed`, `trapcheck`,
//! `surface`, and `simulate`. Each resolves its configuration, computes,
//! writes a run directory (result JSON, CSV data, SVG figures, manifest),
//! and returns a [`CommandReport`] for the binary to print. Certification
//! commands write their artifacts first and only then report failure, so a
//! failing run still leaves evidence on disk.

use std::fmt::Write as _;
use std::path::PathBuf;

use serde_json::json;

use crate::heteroclinic::{
    extract_profile, find_min_speed_empirical, orbit_region_excess, shoot, wave_existence_table,
    OrbitKind, ProfileConfig, ShootConfig, TravelingWaveProfile,
};
use crate::pde::{estimate_speed, sample_profile, simulate, FieldPair, Grid1D, SimConfig};
use crate::regions::{face_flux_check, region_faces, FluxReport, FLUX_TOL};
use crate::spectra::{literature_bounds, min_wave_speed, Binding};
use crate::{regions, spectra};

use super::config::{parse_eta_spec, FileConfig, ResolvedModel};
use super::manifest::RunDir;
use super::svg::{self, Curve};
use super::CliError;

/// What a finished command hands back to the binary.
#[derive(Debug)]
pub struct CommandReport {
    /// Human-readable lines for stdout.
    pub summary: String,
    /// The run's primary result as pretty-printed JSON; identical
    /// configurations produce identical bytes.
    pub json: String,
    pub run_dir: PathBuf,
}

fn binding_name(b: Binding) -> &'static str {
    match b {
        Binding::Logistic => "logistic",
        Binding::Chemical => "chemical",
        Binding::Tie => "tie",
    }
}

fn model_json(rm: &ResolvedModel) -> serde_json::Value {
    json!({
        "mu": rm.params.mu,
        "beta": rm.params.beta,
        "D": rm.params.diff,
        "chi": rm.chi_id,
    })
}

/// Compact outcome encoding shared by result JSON, CSV rows, and figures.
fn outcome_label(kind: &OrbitKind) -> String {
    match kind {
        OrbitKind::ConvergedToOrigin => "wave".into(),
        OrbitKind::ExitedRegion { face, .. } => format!("exit:{}", face.name()),
        OrbitKind::NegativityDetected { component, .. } => format!("negative:{component}"),
        OrbitKind::Stalled => "stalled".into(),
    }
}

fn outcome_json(kind: &OrbitKind) -> serde_json::Value {
    match kind {
        OrbitKind::ConvergedToOrigin => json!({"kind": "wave"}),
        OrbitKind::ExitedRegion { face, xi } => {
            json!({"kind": "exit", "face": face.name(), "xi": xi})
        }
        OrbitKind::NegativityDetected { component, xi } => {
            json!({"kind": "negative", "component": component.to_string(), "xi": xi})
        }
        OrbitKind::Stalled => json!({"kind": "stalled"}),
    }
}

/// Closed-form minimum speed, plus the pre-existing bounds when the
/// chemical does not diffuse.
pub fn cmd_speed(cfg: &FileConfig) -> Result<CommandReport, CliError> {
    let rm = cfg.resolve_model()?;
    let speed = min_wave_speed(&rm.params);
    let bounds = if rm.params.diff == 0.0 {
        let b = literature_bounds(&rm.params);
        json!({"lower": b.lower, "upper": b.upper})
    } else {
        serde_json::Value::Null
    };

    let result = json!({
        "model": model_json(&rm),
        "c_star": speed.c_star,
        "binding": binding_name(speed.binding),
        "bounds": bounds,
    });
    let json = serde_json::to_string_pretty(&result)?;

    let mut run = RunDir::create(&cfg.out_root(), "speed", &model_json(&rm))?;
    run.note_inputs(&rm.inputs);
    run.write("result.json", json.as_bytes())?;
    let (_, dir) = run.finish()?;

    let mut summary = format!(
        "minimum wave speed c* = {:.12}  (binding scale: {})",
        speed.c_star,
        binding_name(speed.binding)
    );
    if rm.params.diff == 0.0 {
        let b = literature_bounds(&rm.params);
        let _ = write!(summary, "\ngeneral bounds: [{:.12}, {:.12}]", b.lower, b.upper);
    }
    Ok(CommandReport { summary, json, run_dir: dir })
}

fn profile_csv(prof: &TravelingWaveProfile) -> String {
    let mut out = String::from(if prof.y.is_some() { "xi,u,v,y,w\n" } else { "xi,u,v,w\n" });
    for i in 0..prof.xi.len() {
        match &prof.y {
            Some(y) => {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    prof.xi[i], prof.u[i], prof.v[i], y[i], prof.w[i]
                );
            }
            None => {
                let _ = writeln!(out, "{},{},{},{}", prof.xi[i], prof.u[i], prof.v[i], prof.w[i]);
            }
        }
    }
    out
}

fn profile_svg(prof: &TravelingWaveProfile) -> String {
    let u: Vec<(f64, f64)> = prof.xi.iter().copied().zip(prof.u.iter().copied()).collect();
    let v: Vec<(f64, f64)> = prof.xi.iter().copied().zip(prof.v.iter().copied()).collect();
    let curves = [Curve { label: "U", points: &u }, Curve { label: "V", points: &v }];
    svg::line_plot(
        &format!("wave profile at c = {}", prof.speed),
        "wave coordinate",
        "value",
        &curves,
    )
}

/// Shoots one orbit off the invading state and classifies it; a converged
/// orbit additionally yields a normalized profile (CSV and figure).
pub fn cmd_shoot(cfg: &FileConfig) -> Result<CommandReport, CliError> {
    let rm = cfg.resolve_model()?;
    let c_star = min_wave_speed(&rm.params).c_star;
    let c = cfg.c.unwrap_or(c_star + 0.5);
    if !(c > 0.0) {
        return Err(CliError::Config(format!("wave speed must be positive, got {c}")));
    }

    let run_config = json!({"model": model_json(&rm), "c": c});
    let mut run = RunDir::create(&cfg.out_root(), "shoot", &run_config)?;
    run.note_inputs(&rm.inputs);

    let outcome = shoot(&rm.params, c, &ShootConfig::default())?;
    let excess = orbit_region_excess(&outcome, &rm.params)
        .map_err(|e| CliError::Numerical(e.to_string()))?;

    let mut profile_stats = serde_json::Value::Null;
    let mut summary = format!("c = {c}: {}", outcome_label(&outcome.kind));
    if outcome.kind.converged() {
        let prof = extract_profile(&outcome, rm.params.beta, &ProfileConfig::default())?;
        run.write("profile.csv", profile_csv(&prof).as_bytes())?;
        run.write("profile.svg", profile_svg(&prof).as_bytes())?;
        profile_stats = json!({
            "points": prof.xi.len(),
            "left_end_gap": prof.report.left_end_gap,
            "right_end_norm": prof.report.right_end_norm,
            "ordering_violations": prof.report.ordering_violations,
            "monotonicity_violations": prof.report.monotonicity_violations,
        });
        let _ = write!(
            summary,
            "\nprofile: {} points, left-end gap {:.3e}, right-end norm {:.3e}",
            prof.xi.len(),
            prof.report.left_end_gap,
            prof.report.right_end_norm
        );
    }
    let _ = write!(summary, "\nlargest region violation along the orbit: {excess:.3e}");

    let result = json!({
        "model": model_json(&rm),
        "c": c,
        "c_star_closed": c_star,
        "outcome": outcome_json(&outcome.kind),
        "region_excess": excess,
        "profile": profile_stats,
    });
    let json = serde_json::to_string_pretty(&result)?;
    run.write("result.json", json.as_bytes())?;
    let (_, dir) = run.finish()?;
    Ok(CommandReport { summary, json, run_dir: dir })
}

/// Bisects the empirical existence threshold and compares it with the
/// closed form; also writes a classification strip across the bracket.
pub fn cmd_minspeed(cfg: &FileConfig) -> Result<CommandReport, CliError> {
    let rm = cfg.resolve_model()?;
    let tol = cfg.tol.unwrap_or(1e-3);
    if !(tol > 0.0) {
        return Err(CliError::Config(format!("tolerance must be positive, got {tol}")));
    }
    let closed = min_wave_speed(&rm.params);
    let bracket = [0.4 * closed.c_star, 2.5 * closed.c_star];

    let run_config = json!({"model": model_json(&rm), "tol": tol, "bracket": bracket});
    let mut run = RunDir::create(&cfg.out_root(), "minspeed", &run_config)?;
    run.note_inputs(&rm.inputs);

    let shoot_cfg = ShootConfig::default();
    let emp = find_min_speed_empirical(&rm.params, bracket, tol, &shoot_cfg)?;
    let abs_err = (emp.c_min - closed.c_star).abs();

    let strip_speeds: Vec<f64> =
        (0..13).map(|i| bracket[0] + (bracket[1] - bracket[0]) * i as f64 / 12.0).collect();
    let table = wave_existence_table(&rm.params, &strip_speeds, &shoot_cfg);
    let mut csv = String::from("c,outcome\n");
    let mut strip_rows = Vec::new();
    for row in &table {
        let label = match &row.outcome {
            Ok(kind) => outcome_label(kind),
            Err(e) => format!("error:{e}"),
        };
        let _ = writeln!(csv, "{},{label}", row.c);
        strip_rows.push((row.c, label));
    }
    run.write("outcomes.csv", csv.as_bytes())?;
    run.write(
        "outcomes.svg",
        svg::outcome_strip("orbit classification vs speed", &strip_rows).as_bytes(),
    )?;

    let result = json!({
        "model": model_json(&rm),
        "tol": tol,
        "bracket": bracket,
        "c_star_closed": closed.c_star,
        "binding": binding_name(closed.binding),
        "c_star_empirical": emp.c_min,
        "final_bracket": emp.bracket,
        "abs_err": abs_err,
        "rel_err": abs_err / closed.c_star,
        "evaluations": emp.evaluations,
        "outcome_counts": emp.counts.to_string(),
    });
    let json = serde_json::to_string_pretty(&result)?;
    run.write("result.json", json.as_bytes())?;
    let (_, dir) = run.finish()?;

    let summary = format!(
        "closed form c* = {:.12}\nempirical    c* = {:.12}  (bisection width {tol}, {} shots)\n\
         absolute error {abs_err:.3e}, relative {:.3e}",
        closed.c_star,
        emp.c_min,
        emp.evaluations,
        abs_err / closed.c_star
    );
    Ok(CommandReport { summary, json, run_dir: dir })
}

/// Certifies every boundary face of the trap region by sampled flux
/// minimization. Exit face `W0` is reported but exempt from the pass rule.
pub fn cmd_trapcheck(cfg: &FileConfig) -> Result<CommandReport, CliError> {
    let rm = cfg.resolve_model()?;
    let c = cfg.c.unwrap_or_else(|| min_wave_speed(&rm.params).c_star);
    if !(c > 0.0) {
        return Err(CliError::Config(format!("wave speed must be positive, got {c}")));
    }
    let samples = cfg.samples.unwrap_or(10_000);

    let run_config = json!({"model": model_json(&rm), "c": c, "samples": samples});
    let mut run = RunDir::create(&cfg.out_root(), "trapcheck", &run_config)?;
    run.note_inputs(&rm.inputs);

    let mut reports: Vec<FluxReport> = Vec::new();
    for &face in region_faces(&rm.params) {
        let rep = face_flux_check(&rm.params, c, face, samples)
            .map_err(|e| CliError::Numerical(e.to_string()))?;
        reports.push(rep);
    }

    let mut csv = String::from("face,samples,worst_margin,worst_point\n");
    let mut rows = Vec::new();
    let mut summary = format!("trap region face certification at c = {c}\n");
    let mut failures = Vec::new();
    for rep in &reports {
        let point = rep
            .worst_point
            .iter()
            .map(|x| format!("{x}"))
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(csv, "{},{},{},{point}", rep.face.name(), rep.samples, rep.worst_margin);
        rows.push(json!({
            "face": rep.face.name(),
            "samples": rep.samples,
            "worst_margin": rep.worst_margin,
            "worst_point": rep.worst_point,
        }));
        let exempt = rep.face.name() == "W0";
        let ok = exempt || rep.worst_margin >= FLUX_TOL;
        let _ = writeln!(
            summary,
            "  {:8} worst margin {:+.6e}  {}",
            rep.face.name(),
            rep.worst_margin,
            if exempt { "exit face (informational)" } else if ok { "ok" } else { "LEAKS" },
        );
        if !ok {
            failures.push(format!("{} (margin {:+.3e})", rep.face.name(), rep.worst_margin));
        }
    }
    run.write("faces.csv", csv.as_bytes())?;

    let passed = failures.is_empty();
    let result = json!({
        "model": model_json(&rm),
        "c": c,
        "samples": samples,
        "faces": rows,
        "passed": passed,
    });
    let json = serde_json::to_string_pretty(&result)?;
    run.write("result.json", json.as_bytes())?;
    let (_, dir) = run.finish()?;

    if !passed {
        return Err(CliError::Certification(format!(
            "inward flux goes negative on {} (artifacts in {})",
            failures.join(", "),
            dir.display()
        )));
    }
    summary.push_str("all non-exit faces certified");
    Ok(CommandReport { summary, json, run_dir: dir })
}

/// Verifies the one-way crossing condition for the surface `W = eta U`.
pub fn cmd_surface(cfg: &FileConfig) -> Result<CommandReport, CliError> {
    let rm = cfg.resolve_model()?;
    let c = cfg.c.unwrap_or_else(|| min_wave_speed(&rm.params).c_star);
    if !(c > 0.0) {
        return Err(CliError::Config(format!("wave speed must be positive, got {c}")));
    }
    let eta_spec = parse_eta_spec(cfg.eta.as_deref().unwrap_or("half"))?;
    let eta = eta_spec.resolve(c);
    let density = 200;

    let run_config =
        json!({"model": model_json(&rm), "c": c, "eta": eta_spec.label(), "grid": density});
    let mut run = RunDir::create(&cfg.out_root(), "surface", &run_config)?;
    run.note_inputs(&rm.inputs);

    let check = regions::verify_surface(&rm.params, c, eta, density)
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    // The origin is the binding point of the surface inequality, so the
    // slope interval there is the global feasible range.
    let y0 = if rm.params.diff > 0.0 { Some(0.0) } else { None };
    let feasible = spectra::eta_feasible_interval(&rm.params, c, 0.0, 0.0, y0)
        .ok()
        .and_then(|f| f.interval)
        .map(|(lo, hi)| json!({"lo": lo, "hi": hi}))
        .unwrap_or(serde_json::Value::Null);

    let result = json!({
        "model": model_json(&rm),
        "c": c,
        "eta_spec": eta_spec.label(),
        "eta": eta,
        "grid_density": density,
        "holds": check.holds,
        "worst_value": check.worst_value,
        "worst_point": check.worst_point,
        "slope_in_range": check.slope_in_range,
        "feasible_slopes": feasible,
    });
    let json = serde_json::to_string_pretty(&result)?;
    run.write("result.json", json.as_bytes())?;
    let (_, dir) = run.finish()?;

    if !check.holds {
        return Err(CliError::Certification(format!(
            "surface W = {eta:.6} U admits two-way crossings: worst quadratic value \
             {:+.6e} at {:?} (artifacts in {})",
            check.worst_value, check.worst_point, dir.display()
        )));
    }
    let summary = format!(
        "surface W = {eta:.6} U is one-way at c = {c}: worst quadratic value {:+.3e}",
        check.worst_value
    );
    Ok(CommandReport { summary, json, run_dir: dir })
}

/// Runs the reaction-diffusion solver, either a lab-frame invasion from a
/// step front or a co-moving run seeded with a shot wave profile.
pub fn cmd_simulate(cfg: &FileConfig) -> Result<CommandReport, CliError> {
    let rm = cfg.resolve_model()?;
    let comoving = cfg.comoving.unwrap_or(false);
    let t_end = cfg.t_end.unwrap_or(if comoving { 10.0 } else { 60.0 });
    if !(t_end > 0.0) {
        return Err(CliError::Config(format!("t_end must be positive, got {t_end}")));
    }

    // Resolve grid and initial data per frame choice before creating the
    // run directory, so the directory name covers the whole setup.
    let (g, init, speed_cfg, length, cells, c_used): (Grid1D, FieldPair, SimConfig, f64, usize, Option<f64>);
    if comoving {
        let c = cfg
            .c
            .ok_or_else(|| CliError::Config("co-moving runs need an explicit speed c".into()))?;
        if !(c > 0.0) {
            return Err(CliError::Config(format!("wave speed must be positive, got {c}")));
        }
        let outcome = shoot(&rm.params, c, &ShootConfig::default())?;
        if !outcome.kind.converged() {
            return Err(CliError::Numerical(format!(
                "no wave to seed at c = {c}: orbit classified as {}",
                outcome_label(&outcome.kind)
            )));
        }
        let prof = extract_profile(&outcome, rm.params.beta, &ProfileConfig::default())?;
        let span = prof.xi.last().unwrap() - prof.xi[0];
        let n = cfg.cells.unwrap_or(((span * 10.0) as usize).max(600));
        let grid = Grid1D::new(span, n);
        let f0 = sample_profile(&prof, &grid, prof.xi[0]);
        (length, cells, c_used) = (span, n, Some(c));
        speed_cfg = SimConfig { comoving_speed: Some(c), ..SimConfig::default() };
        (g, init) = (grid, f0);
    } else {
        let l = cfg.length.unwrap_or(300.0);
        let n = cfg.cells.unwrap_or(3000);
        if !(l > 0.0) || n < 16 {
            return Err(CliError::Config(format!(
                "need positive length and at least 16 cells, got length {l}, cells {n}"
            )));
        }
        let grid = Grid1D::new(l, n);
        let front_x = cfg.front_x.unwrap_or(l / 15.0);
        let f0 = FieldPair::step_front(&grid, front_x, rm.params.beta);
        (length, cells, c_used) = (l, n, cfg.c);
        speed_cfg = SimConfig::default();
        (g, init) = (grid, f0);
    }

    let run_config = json!({
        "model": model_json(&rm),
        "comoving": comoving,
        "c": c_used,
        "length": length,
        "cells": cells,
        "t_end": t_end,
    });
    let mut run = RunDir::create(&cfg.out_root(), "simulate", &run_config)?;
    run.note_inputs(&rm.inputs);

    let sol = simulate(&rm.params, &g, &init, t_end, &speed_cfg)?;

    // Artifacts: endpoint snapshots, per-step monitors, front trajectory.
    let snapshot_csv = |f: &FieldPair| {
        let mut s = String::from("x,u,v\n");
        for i in 0..f.len() {
            let _ = writeln!(s, "{},{},{}", g.cell_center(i), f.u[i], f.v[i]);
        }
        s
    };
    run.write("snapshot_initial.csv", snapshot_csv(&sol.snapshots[0]).as_bytes())?;
    let last = sol.snapshots.last().expect("at least one snapshot");
    run.write("snapshot_final.csv", snapshot_csv(last).as_bytes())?;

    let mut monitors_csv = String::from("t,min_u,min_v,max_u,max_u_minus_beta_v\n");
    for i in 0..sol.monitors.min_u.len() {
        let _ = writeln!(
            monitors_csv,
            "{},{},{},{},{}",
            i as f64 * sol.dt,
            sol.monitors.min_u[i],
            sol.monitors.min_v[i],
            sol.monitors.max_u[i],
            sol.monitors.max_u_minus_beta_v[i]
        );
    }
    run.write("monitors.csv", monitors_csv.as_bytes())?;

    let u_curve: Vec<(f64, f64)> =
        (0..last.len()).map(|i| (g.cell_center(i), last.u[i])).collect();
    let v_curve: Vec<(f64, f64)> =
        (0..last.len()).map(|i| (g.cell_center(i), last.v[i])).collect();
    run.write(
        "final_profile.svg",
        svg::line_plot(
            &format!("fields at t = {t_end}"),
            "x",
            "value",
            &[Curve { label: "u", points: &u_curve }, Curve { label: "v", points: &v_curve }],
        )
        .as_bytes(),
    )?;

    let mut front_json = serde_json::Value::Null;
    let mut summary = format!(
        "{} run: {} steps of dt = {:.6e} on {} cells\n",
        if comoving { "co-moving" } else { "lab-frame" },
        sol.steps,
        sol.dt,
        cells
    );
    if !sol.front_series.is_empty() {
        let mut front_csv = String::from("t,x_front\n");
        for (t, x) in &sol.front_series {
            let _ = writeln!(front_csv, "{t},{x}");
        }
        run.write("front.csv", front_csv.as_bytes())?;
        run.write(
            "front.svg",
            svg::line_plot(
                "front position vs time",
                "t",
                "x at u = 1/2",
                &[Curve { label: "", points: &sol.front_series }],
            )
            .as_bytes(),
        )?;
        let window = [t_end / 2.0, t_end];
        if let Ok((slope, stderr)) = estimate_speed(&sol.front_series, window) {
            front_json = json!({
                "window": window,
                "speed": slope,
                "stderr": stderr,
            });
            let _ = writeln!(
                summary,
                "front speed over t in [{}, {t_end}]: {slope:.6} (stderr {stderr:.2e})",
                window[0]
            );
        }
    }
    let drift = if comoving {
        let d = sol.cell_density_drift();
        let _ = writeln!(summary, "cell-density drift over the run: {d:.3e}");
        json!(d)
    } else {
        serde_json::Value::Null
    };
    let _ = write!(
        summary,
        "largest ordering excess max(u - beta v): {:.3e}",
        sol.max_ordering_excess()
    );

    let result = json!({
        "model": model_json(&rm),
        "comoving": comoving,
        "c": c_used,
        "length": length,
        "cells": cells,
        "t_end": t_end,
        "dt": sol.dt,
        "steps": sol.steps,
        "front": front_json,
        "cell_density_drift": drift,
        "max_ordering_excess": sol.max_ordering_excess(),
    });
    let json = serde_json::to_string_pretty(&result)?;
    run.write("result.json", json.as_bytes())?;
    let (_, dir) = run.finish()?;
    Ok(CommandReport { summary, json, run_dir: dir })
}
