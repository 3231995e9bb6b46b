//! Acceptance gate: eleven end-to-end checks, one test and one verdict
//! line each, at their stated tolerances. Checks 2 and 5 currently fail,
//! and are expected to: each failure message states the mechanism, which
//! is a property of the model (and of what double precision can see), not
//! a tuning problem. Everything they assert is still checked at full
//! strength on the cells where the expectation is attainable.

use kswave::cli::{self, FileConfig, SweepSpec};
use kswave::heteroclinic::{
    extract_profile, find_min_speed_empirical, shoot, shoot_logistic_reduction,
    normalized_orbit_distance, OrbitKind, ProfileConfig, ShootConfig, TravelingWaveProfile,
};
use kswave::model::{ChiFunction, ModelParams};
use kswave::pde::{
    comoving_residual, estimate_speed, sample_profile, simulate, FieldPair, Grid1D, SimConfig,
};
use kswave::regions::{face_flux_check, region_faces, verify_surface};
use kswave::spectra::{
    closed_form_origin_eigenvalues, min_wave_speed, origin_spectrum, surface_quadratic,
    SpectrumClass,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pass(n: u32, detail: &str) {
    println!("[PASS] criterion {n}: {detail}");
}

fn fail(n: u32, detail: &str) -> ! {
    panic!("[FAIL] criterion {n}: {detail}");
}

const BISECT_TOL: f64 = 1e-3;

fn empirical_rel_err(p: &ModelParams) -> (f64, f64) {
    let closed = min_wave_speed(p).c_star;
    let emp = find_min_speed_empirical(
        p,
        [0.4 * closed, 2.5 * closed],
        BISECT_TOL,
        &ShootConfig::default(),
    )
    .expect("bracket spans the threshold");
    (emp.c_min, (emp.c_min - closed).abs() / closed)
}

#[test]
fn criterion_01_exact_threshold_without_chemical_diffusion() {
    let mut worst = (0.0f64, String::new());
    for mu in [0.25, 1.0, 4.0] {
        for beta in [0.5, 1.0, 2.0] {
            for frac in [0.0, 0.5, 1.0] {
                let p =
                    ModelParams::new(mu, beta, 0.0, ChiFunction::constant(frac * mu)).unwrap();
                let (_, rel) = empirical_rel_err(&p);
                if rel > worst.0 {
                    worst = (rel, format!("mu={mu} beta={beta} chi={}", frac * mu));
                }
            }
        }
    }
    if worst.0 >= 0.01 {
        fail(1, &format!("worst relative threshold error {:.3e} at {} >= 1%", worst.0, worst.1));
    }
    pass(1, &format!("27 cells; worst relative threshold error {:.3e} ({})", worst.0, worst.1));
}

#[test]
fn criterion_02_exact_threshold_with_chemical_diffusion() {
    let mut worst = (0.0f64, String::new());
    let mut failures = Vec::new();
    for diff in [0.25, 1.0] {
        for mu in [1.0, 4.0] {
            for beta in [1.0, 4.0] {
                let p = ModelParams::new(mu, beta, diff, ChiFunction::constant(mu)).unwrap();
                let closed = min_wave_speed(&p).c_star;
                let (emp, rel) = empirical_rel_err(&p);
                let cell = format!(
                    "D={diff} mu={mu} beta={beta}: closed {closed}, measured {emp:.4}, \
                     rel err {rel:.2e}"
                );
                if rel >= 0.02 {
                    failures.push(cell.clone());
                }
                if rel > worst.0 {
                    worst = (rel, cell);
                }
            }
        }
    }
    if !failures.is_empty() {
        fail(
            2,
            &format!(
                "{} of 8 cells off by more than 2%:\n  {}\n  on cells with \
                 2 sqrt(mu) < c < 2 sqrt(D beta), the chemical pair decays at rate c/2, \
                 faster than the slowest real density mode, and the chemical content of \
                 that slow mode is positive; the oscillation that would mark such speeds \
                 as subcritical sits below double-precision resolution, so shooting \
                 measures the logistic scale 2 sqrt(mu) instead of 2 sqrt(D beta)",
                failures.len(),
                failures.join("\n  ")
            ),
        );
    }
    pass(2, &format!("8 cells; worst relative threshold error {:.3e} ({})", worst.0, worst.1));
}

#[test]
fn criterion_03_sensitivity_independence_within_cells() {
    let mut worst = (0.0f64, String::new());
    for mu in [0.25, 1.0, 4.0] {
        for beta in [0.5, 1.0, 2.0] {
            let mut speeds = Vec::new();
            for frac in [0.0, 0.5, 1.0] {
                let p =
                    ModelParams::new(mu, beta, 0.0, ChiFunction::constant(frac * mu)).unwrap();
                speeds.push(empirical_rel_err(&p).0);
            }
            let spread = speeds.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                - speeds.iter().cloned().fold(f64::INFINITY, f64::min);
            if spread > worst.0 {
                worst = (spread, format!("mu={mu} beta={beta}"));
            }
        }
    }
    if worst.0 >= 2.0 * BISECT_TOL {
        fail(
            3,
            &format!(
                "threshold spread across sensitivities {:.3e} at {} >= twice the \
                 bisection tolerance {BISECT_TOL}",
                worst.0, worst.1
            ),
        );
    }
    pass(3, &format!("worst within-cell spread across sensitivities {:.3e} ({})", worst.0, worst.1));
}

#[test]
fn criterion_04_spectral_classification_flips_at_the_threshold() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst_eig: f64 = 0.0;
    for draw in 0..20 {
        let mu = 10f64.powf(rng.gen_range(-0.7..0.7));
        let beta = 10f64.powf(rng.gen_range(-0.7..0.7));
        let diff = if draw % 2 == 0 { 0.0 } else { rng.gen_range(0.1..2.0) };
        let chi = ChiFunction::constant(rng.gen_range(0.0..mu));
        let p = ModelParams::new(mu, beta, diff, chi).unwrap();
        let c_star = min_wave_speed(&p).c_star;
        for (side, expected) in [
            (1.0 - 1e-3, SpectrumClass::ComplexPresent),
            (1.0 + 1e-3, SpectrumClass::AllRealNegative),
        ] {
            let c = c_star * side;
            let report = origin_spectrum(&p, c);
            if report.classification != expected {
                fail(
                    4,
                    &format!(
                        "draw {draw} (mu={mu:.4} beta={beta:.4} D={diff:.4}): at \
                         c = c* x {side} expected {expected:?}, got {:?}",
                        report.classification
                    ),
                );
            }
            let closed = closed_form_origin_eigenvalues(&p, c);
            for (a, b) in report.eigenvalues.iter().zip(&closed) {
                worst_eig = worst_eig.max((a.re - b.re).abs().max((a.im - b.im).abs()));
            }
        }
    }
    if worst_eig > 1e-10 {
        fail(4, &format!("eigenvalue disagreement {worst_eig:.2e} vs closed forms > 1e-10"));
    }
    pass(
        4,
        &format!(
            "20 draws flip ComplexPresent -> AllRealNegative across c*; \
             worst eigenvalue error {worst_eig:.2e}"
        ),
    );
}

#[test]
fn criterion_05_trap_region_faces_admit_no_outward_flux() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = (f64::INFINITY, String::new());
    let mut leaks = Vec::new();
    for draw in 0..20 {
        let mu = 10f64.powf(rng.gen_range(-0.5..0.5));
        let beta = 10f64.powf(rng.gen_range(-0.5..0.5));
        let diff = if draw < 10 { 0.0 } else { rng.gen_range(0.1..2.0) };
        let kappa = rng.gen_range(0.0..mu);
        let p = ModelParams::new(mu, beta, diff, ChiFunction::constant(kappa)).unwrap();
        let c = min_wave_speed(&p).c_star * rng.gen_range(1.0..3.0);
        for &face in region_faces(&p) {
            if face.name() == "W0" {
                continue;
            }
            let rep = face_flux_check(&p, c, face, 10_000).unwrap();
            let tag = format!(
                "draw {draw} (mu={mu:.3} beta={beta:.3} D={diff:.3} chi={kappa:.3} c={c:.3}) \
                 face {}: margin {:+.3e}",
                face.name(),
                rep.worst_margin
            );
            if rep.worst_margin < worst.0 {
                worst = (rep.worst_margin, tag.clone());
            }
            if rep.worst_margin < -1e-12 {
                leaks.push(tag);
            }
        }
    }
    if !leaks.is_empty() {
        let sample = leaks.first().unwrap().clone();
        fail(
            5,
            &format!(
                "{} face checks report outward flux, e.g. {sample}\n  with chemical \
                 diffusion the cap face W = cU has inward flux U(1-U)(mu - c rho chi) at \
                 its worst corner, which is negative whenever chi > mu / (c rho); \
                 admissible draws with strong sensitivity therefore genuinely leak \
                 (witness: mu=beta=D=1, chi=1, c=2 at [0.5, 1, -0.5, 1] gives -0.25)",
                leaks.len()
            ),
        );
    }
    pass(5, &format!("20 draws, all non-exit faces inward; tightest margin {:+.3e} ({})", worst.0, worst.1));
}

#[test]
fn criterion_06_half_speed_surface_is_one_way() {
    let models = [
        ModelParams::new(1.0, 1.0, 0.0, ChiFunction::constant(1.0)).unwrap(),
        ModelParams::new(0.25, 2.0, 0.0, ChiFunction::constant(0.125)).unwrap(),
        ModelParams::new(1.0, 1.0, 1.0, ChiFunction::constant(1.0)).unwrap(),
        ModelParams::new(4.0, 0.5, 0.25, ChiFunction::constant(2.0)).unwrap(),
    ];
    let mut worst = (f64::NEG_INFINITY, String::new());
    for p in &models {
        let c_star = min_wave_speed(p).c_star;
        for factor in [1.0, 1.5, 3.0] {
            let c = c_star * factor;
            let check = verify_surface(p, c, c / 2.0, 200).unwrap();
            let tag = format!(
                "mu={} beta={} D={} c={c}: worst {:+.3e}",
                p.mu, p.beta, p.diff, check.worst_value
            );
            if !check.holds || check.worst_value > 1e-12 {
                fail(6, &format!("eta = c/2 fails at {tag}"));
            }
            if check.worst_value > worst.0 {
                worst = (check.worst_value, tag);
            }
        }
    }

    let p = ModelParams::new(1.0, 1.0, 0.0, ChiFunction::constant(0.5)).unwrap();
    let pinned = surface_quadratic(&p, 2.0, 0.625 * 2.0, 0.0, 0.0, None);
    if (pinned - 0.0625).abs() > 1e-12 {
        fail(6, &format!("quadratic at the extinction corner for eta = 5c/8 is {pinned}, not 0.0625"));
    }
    pass(
        6,
        &format!(
            "eta = c/2 one-way on all grids, worst value {:+.3e} ({}); \
             5c/8 corner value {pinned}",
            worst.0, worst.1
        ),
    );
}

/// Draws used by criteria 7 and 8: shoot half a unit above the threshold.
fn profile_draws() -> Vec<(ModelParams, f64, TravelingWaveProfile)> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut out = Vec::new();
    for draw in 0..10 {
        let mu = 10f64.powf(rng.gen_range(-0.5..0.5));
        let beta = 10f64.powf(rng.gen_range(-0.5..0.5));
        let diff = if draw % 2 == 0 { 0.0 } else { rng.gen_range(0.1..2.0) };
        let kappa = rng.gen_range(0.0..mu);
        let p = ModelParams::new(mu, beta, diff, ChiFunction::constant(kappa)).unwrap();
        let c = min_wave_speed(&p).c_star + 0.5;
        let outcome = shoot(&p, c, &ShootConfig::default()).expect("integrable");
        assert!(
            matches!(outcome.kind, OrbitKind::ConvergedToOrigin),
            "draw {draw} (mu={mu:.3} beta={beta:.3} D={diff:.3} chi={kappa:.3}) at \
             c = c* + 0.5 classified {:?}",
            outcome.kind
        );
        let prof = extract_profile(&outcome, p.beta, &ProfileConfig::default()).unwrap();
        out.push((p, c, prof));
    }
    out
}

#[test]
fn criterion_07_waves_are_ordered_and_monotone() {
    let mut worst_ord: f64 = 0.0;
    let mut worst_mono: f64 = 0.0;
    for (_, _, prof) in profile_draws() {
        worst_ord = worst_ord.max(prof.report.worst_ordering_excess);
        worst_mono = worst_mono.max(prof.report.worst_monotonicity_excess);
    }
    if worst_ord > 1e-6 || worst_mono > 1e-6 {
        fail(
            7,
            &format!(
                "profile violates the wave inequalities: ordering excess {worst_ord:.2e}, \
                 monotonicity excess {worst_mono:.2e} (tolerance 1e-6)"
            ),
        );
    }
    pass(
        7,
        &format!(
            "10 draws converge at c* + 0.5; worst ordering excess {worst_ord:.2e}, \
             worst monotonicity excess {worst_mono:.2e}"
        ),
    );
}

#[test]
fn criterion_08_profiles_satisfy_the_steady_equations() {
    let mut worst: f64 = 0.0;
    for (p, _, prof) in profile_draws() {
        let res = comoving_residual(&prof, &p).unwrap();
        worst = worst.max(res);
        if res >= 1e-4 {
            fail(
                8,
                &format!(
                    "wave residual {res:.2e} >= 1e-4 for mu={} beta={} D={}",
                    p.mu, p.beta, p.diff
                ),
            );
        }
    }

    let p = ModelParams::new(1.0, 0.7, 0.0, ChiFunction::constant(0.4)).unwrap();
    let c = 2.5;
    let n = 2048;
    let xi: Vec<f64> = (0..n).map(|i| -10.0 + 0.02 * i as f64).collect();
    let flat = TravelingWaveProfile {
        xi: xi.clone(),
        u: vec![1.0; n],
        v: vec![1.0 / p.beta; n],
        y: None,
        w: vec![c; n],
        speed: c,
        shift: 0.0,
        report: Default::default(),
    };
    let res = comoving_residual(&flat, &p).unwrap();
    if res >= 1e-12 {
        fail(8, &format!("constant-equilibrium residual {res:.2e} >= 1e-12"));
    }
    pass(8, &format!("10 wave residuals < 1e-4 (worst {worst:.2e}); equilibrium residual {res:.2e}"));
}

#[test]
fn criterion_09_vanishing_sensitivity_reduces_to_the_logistic_front() {
    let p = ModelParams::new(1.0, 1.0, 0.0, ChiFunction::ZERO).unwrap();
    let c = 2.5;
    let cfg = ShootConfig::default();
    let full = shoot(&p, c, &cfg).unwrap();
    let reduced = shoot_logistic_reduction(1.0, c, &cfg).unwrap();
    let dist =
        normalized_orbit_distance(&full.trajectory, &reduced.trajectory, &[(0, 0), (2, 1)], 2000)
            .unwrap();
    if dist > 1e-6 {
        fail(9, &format!("(U, W) disagreement between full and reduced systems {dist:.2e} > 1e-6"));
    }

    let g = Grid1D::new(300.0, 3000);
    let init = FieldPair::step_front(&g, 20.0, p.beta);
    let sol = simulate(&p, &g, &init, 60.0, &SimConfig::default()).unwrap();
    let (speed, stderr) = estimate_speed(&sol.front_series, [30.0, 60.0]).unwrap();
    if !(1.90..=2.02).contains(&speed) {
        fail(9, &format!("lab-frame front speed {speed:.4} outside [1.90, 2.02]"));
    }
    pass(
        9,
        &format!(
            "reduction distance {dist:.2e}; lab-frame front speed {speed:.4} \
             (stderr {stderr:.1e}) inside [1.90, 2.02]"
        ),
    );
}

fn comoving_drift(n_cells: usize, t_end: f64) -> f64 {
    let p = ModelParams::new(1.0, 1.0, 0.0, ChiFunction::ZERO).unwrap();
    let c = 2.5;
    let outcome = shoot(&p, c, &ShootConfig::default()).unwrap();
    let prof = extract_profile(&outcome, p.beta, &ProfileConfig::default()).unwrap();
    let span = prof.xi.last().unwrap() - prof.xi[0];
    let g = Grid1D::new(span, n_cells);
    let init = sample_profile(&prof, &g, prof.xi[0]);
    let cfg = SimConfig { comoving_speed: Some(c), ..SimConfig::default() };
    simulate(&p, &g, &init, t_end, &cfg).unwrap().cell_density_drift()
}

#[test]
fn criterion_10_seeded_wave_is_steady_in_the_comoving_frame() {
    let drift = comoving_drift(900, 10.0);
    if drift >= 1e-2 {
        fail(10, &format!("cell-density drift {drift:.3e} >= 1e-2 over t = 10"));
    }
    let d0 = comoving_drift(300, 2.0);
    let d1 = comoving_drift(600, 2.0);
    let d2 = comoving_drift(1200, 2.0);
    let orders = [(d0 / d1).log2(), (d1 / d2).log2()];
    if orders.iter().any(|o| *o < 1.5) {
        fail(10, &format!("refinement orders {orders:?} fall below 1.5"));
    }
    pass(10, &format!("drift {drift:.3e} over t = 10; refinement orders {orders:.2?}"));
}

#[test]
fn criterion_11_outputs_are_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let configs = [
        FileConfig {
            mu: Some(1.0),
            beta: Some(1.0),
            out: Some(tmp.path().to_path_buf()),
            ..FileConfig::default()
        },
        FileConfig {
            mu: Some(1.0),
            beta: Some(4.0),
            diff: Some(1.0),
            chi: Some("const:1".into()),
            out: Some(tmp.path().to_path_buf()),
            ..FileConfig::default()
        },
        FileConfig {
            mu: Some(0.25),
            beta: Some(2.0),
            chi: Some("affine:0.1,0.05".into()),
            out: Some(tmp.path().to_path_buf()),
            ..FileConfig::default()
        },
    ];
    for cfg in &configs {
        let a = cli::cmd_speed(cfg).unwrap().json;
        let b = cli::cmd_speed(cfg).unwrap().json;
        let c = cli::cmd_speed(cfg).unwrap().json;
        if a != b || b != c {
            fail(11, "speed result JSON differs across repeated runs");
        }
    }

    let spec = SweepSpec {
        mu: vec![1.0, 4.0],
        beta: vec![1.0],
        diff: vec![0.0],
        chi: vec!["const:0".into(), "const:1".into()],
        tol: 0.02,
        cap: 10_000,
        threads: 3,
    };
    let rep1 = cli::cmd_sweep(&spec, tmp.path()).unwrap();
    let csv1 = std::fs::read(rep1.run_dir.join("sweep.csv")).unwrap();
    let rep2 = cli::cmd_sweep(&spec, tmp.path()).unwrap();
    let csv2 = std::fs::read(rep2.run_dir.join("sweep.csv")).unwrap();
    if csv1 != csv2 {
        fail(11, "sweep CSV differs across repeated runs");
    }
    let text = String::from_utf8(csv1).unwrap();
    let mut lines = text.lines();
    if lines.next() != Some(cli::sweep::SWEEP_CSV_HEADER) {
        fail(11, "sweep CSV header drifted from the fixed schema");
    }
    let firsts: Vec<String> = lines
        .map(|l| l.split(',').take(4).collect::<Vec<_>>().join(","))
        .collect();
    let mut sorted = firsts.clone();
    sorted.sort();
    if firsts != sorted {
        fail(11, "sweep CSV rows are not in lexicographic axis order");
    }
    pass(11, "speed JSON byte-identical across 3 runs x 3 configs; sweep CSV stable and ordered");
}
