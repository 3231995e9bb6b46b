//! Shooting along the unstable manifold of the invading state, outcome
//! classification, empirical minimum-speed bisection, and wave-profile
//! extraction.
//!
//! A wave at speed `c` is a heteroclinic orbit from `(1, 1/beta, [0,] c)` to
//! the origin. The orbit is approximated by stepping a small offset along
//! the one-dimensional unstable direction and integrating forward in the
//! wave coordinate until the orbit either enters a small ball around the
//! origin, crosses zero in `U` or a negativity threshold in the other
//! components (the signature of subcritical speeds, where the origin
//! spectrum is complex), turns around in `U` (impossible inside the trap
//! region, so equally decisive and detectable at any amplitude), leaves
//! the trap region through one of its faces, or exhausts the integration
//! horizon.

use serde::Serialize;
use thiserror::Error;

use crate::integrate::{
    integrate, EventDirection, EventSpec, IntegrateError, IntegratorConfig, Termination,
    Trajectory,
};
use crate::model::{invading_state, spatial_rhs, ModelParams};
use crate::regions::{FaceId, RegionError, TrapRegion};
use crate::spectra::{self, SpectraError};

#[derive(Debug, Error)]
pub enum HeteroError {
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error(transparent)]
    Integrate(#[from] IntegrateError),
    #[error("bracket endpoints do not straddle the threshold: lo={lo:?}, hi={hi:?}")]
    BracketInvalid { lo: OrbitKind, hi: OrbitKind },
    #[error("profile extraction requires a converged orbit, got {kind:?}")]
    NotConverged { kind: OrbitKind },
    #[error("orbit never crosses U = 1/2, cannot normalize")]
    NormalizationFailed,
}

/// Classification of a shooting run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum OrbitKind {
    /// Entered the convergence ball around the origin: a wave exists.
    ConvergedToOrigin,
    /// Left the trap region through a face other than the axis planes.
    ExitedRegion { face: FaceId, xi: f64 },
    /// A component fell below `-exit_tol`; subcritical spiraling.
    NegativityDetected { component: char, xi: f64 },
    /// Horizon exhausted without a decision.
    Stalled,
}

impl OrbitKind {
    pub fn converged(&self) -> bool {
        matches!(self, OrbitKind::ConvergedToOrigin)
    }
}

#[derive(Debug)]
pub struct OrbitOutcome {
    pub kind: OrbitKind,
    pub trajectory: Trajectory,
    pub c: f64,
}

/// Shooting controls. Defaults follow the operating point used throughout:
/// manifold offset 1e-6 (with agreement under halving checked separately),
/// convergence ball 1e-12 in the max norm, negativity threshold 1e-9, face
/// exit tolerance 1e-6, and horizon `1e4 / c` unless overridden.
///
/// The ball is deliberately small: a near-threshold spiral is only caught
/// if its first turn happens before the whole orbit decays into the ball,
/// and the turn time grows like `1/omega` as the speed approaches the
/// threshold from below. Every factor of 10 off the radius extends the
/// observation window additively, shrinking the bisection bias roughly
/// quadratically; 1e-12 keeps the measured threshold within about half a
/// percent of the closed form on the hardest coefficient cells while
/// staying far above roundoff (the tail decay is relative, so orbits reach
/// any positive radius cleanly).
#[derive(Debug, Clone)]
pub struct ShootConfig {
    pub eps: f64,
    pub convergence_radius: f64,
    pub exit_tol: f64,
    pub face_tol: f64,
    pub xi_max: Option<f64>,
    pub integrator: IntegratorConfig,
}

impl Default for ShootConfig {
    fn default() -> Self {
        ShootConfig {
            eps: 1e-6,
            convergence_radius: 1e-12,
            exit_tol: 1e-9,
            face_tol: 1e-6,
            xi_max: None,
            integrator: IntegratorConfig::default(),
        }
    }
}

enum EventTag {
    Converged,
    Negative { component: char },
    Face(FaceId),
    /// `dU` crossed zero upward: a local minimum of `U`. Inside the trap
    /// region `dU <= 0`, so a turn means the orbit reached `W >= cU` (at the
    /// turn, `W - cU` equals minus the chemotaxis term, which is
    /// nonnegative there); it fires at any amplitude, which makes the
    /// converged/not-converged predicate sharp near the threshold where
    /// subcritical spirals would otherwise decay into the convergence ball
    /// before any fixed negativity threshold is reached.
    Turn,
}

fn shoot_events(
    p: &ModelParams,
    c: f64,
    cfg: &ShootConfig,
) -> (Vec<EventSpec>, Vec<EventTag>) {
    let mut events = Vec::new();
    let mut tags = Vec::new();
    let radius = cfg.convergence_radius;
    events.push(EventSpec {
        guard: Box::new(move |s: &[f64]| {
            radius - s.iter().fold(0.0f64, |m, x| m.max(x.abs()))
        }),
        direction: EventDirection::Up,
        terminal: true,
    });
    tags.push(EventTag::Converged);

    let dim = if p.diff == 0.0 { 3 } else { 4 };
    let tol = cfg.exit_tol;
    // U listens for a raw sign change rather than a fixed threshold: the
    // (U, W) pair is homogeneous in the state, so its computed sign stays
    // meaningful at any amplitude, and U's first zero is the earliest
    // subcritical signature, a quarter turn before the U-minimum. The
    // 1e-300 cushion only keeps a positive tail that underflows to +0.0
    // from counting as a crossing.
    events.push(EventSpec::terminal_down(move |s: &[f64]| s[0] + 1e-300));
    tags.push(EventTag::Negative { component: 'U' });
    for (component, index) in [('V', 1), ('W', dim - 1)] {
        events.push(EventSpec::terminal_down(move |s: &[f64]| s[index] + tol));
        tags.push(EventTag::Negative { component });
    }

    let beta = p.beta;
    let ftol = cfg.face_tol;
    events.push(EventSpec::terminal_down(move |s: &[f64]| {
        1.0 - beta * s[1] + ftol
    }));
    tags.push(EventTag::Face(FaceId::Vtop));
    events.push(EventSpec::terminal_down(move |s: &[f64]| {
        beta * s[1] - s[0] + ftol
    }));
    tags.push(EventTag::Face(FaceId::UeqBetaV));
    events.push(EventSpec::terminal_down(move |s: &[f64]| {
        c * s[0] - s[dim - 1] + ftol
    }));
    tags.push(EventTag::Face(FaceId::WeqCU));

    if dim == 4 {
        // The Y faces exist only when the slant slope does; below the
        // chemical speed scale the orbit is still integrated, and the
        // negativity events decide the outcome.
        if let Ok(rho) = spectra::rho(p, c) {
            events.push(EventSpec::terminal_down(move |s: &[f64]| -s[2] + ftol));
            tags.push(EventTag::Face(FaceId::Y0));
            events.push(EventSpec::terminal_down(move |s: &[f64]| {
                s[2] - rho * (s[0] - beta * s[1]) + ftol
            }));
            tags.push(EventTag::Face(FaceId::Yslant));
        }
    }

    // Turn monitor: the first component of the vector field itself. Its
    // sign change is detected whatever the orbit's amplitude, unlike the
    // absolute negativity thresholds above, so near-threshold spirals are
    // caught before they shrink into the convergence ball.
    let turn_model = p.clone();
    let guard: Box<dyn Fn(&[f64]) -> f64> = if dim == 3 {
        Box::new(move |s: &[f64]| {
            let chi = turn_model.chi_eval(s[1]).0;
            -c * s[0] + s[0] * chi * (s[0] - beta * s[1]) / c + s[2]
        })
    } else {
        Box::new(move |s: &[f64]| {
            let chi = turn_model.chi_eval(s[1]).0;
            -c * s[0] + s[0] * chi * s[2] + s[3]
        })
    };
    events.push(EventSpec { guard, direction: EventDirection::Up, terminal: true });
    tags.push(EventTag::Turn);
    (events, tags)
}

/// Step cap keeping `h |lambda|` inside the explicit scheme's stability
/// region for every eigenvalue of the linearizations at both equilibria.
/// Without it, once the orbit rides the slowest mode, the error controller
/// (which measures the by-then negligible fast components against the
/// absolute tolerance alone) grows the step until the extinct fast modes
/// are numerically unstable; they re-grow from roundoff and corrupt the
/// sign-based events in the tail.
fn stability_step_cap(p: &ModelParams, c: f64) -> f64 {
    let mut rate: f64 = 0.0;
    for j in [spectra::origin_jacobian(p, c), spectra::invading_jacobian(p, c)] {
        for ev in j.complex_eigenvalues().iter() {
            rate = rate.max(ev.norm());
        }
    }
    2.5 / rate
}

/// Integrates one orbit off the unstable manifold and classifies it.
pub fn shoot(p: &ModelParams, c: f64, cfg: &ShootConfig) -> Result<OrbitOutcome, HeteroError> {
    let dir = spectra::unstable_direction(p, c)?;
    let mut y0 = invading_state(p, c);
    for (y, d) in y0.iter_mut().zip(&dir.direction) {
        *y += cfg.eps * d;
    }
    let xi_max = cfg.xi_max.unwrap_or(1e4 / c);
    let (events, tags) = shoot_events(p, c, cfg);
    let mut icfg = cfg.integrator.clone();
    icfg.max_step = icfg.max_step.min(stability_step_cap(p, c));
    let rhs = spatial_rhs(p, c);
    let trajectory = integrate(
        |t, s, out| rhs(t, s, out),
        &y0,
        [0.0, xi_max],
        &icfg,
        &events,
    )?;
    let kind = match trajectory.termination {
        Termination::Event { index, xi } => match tags[index] {
            EventTag::Converged => OrbitKind::ConvergedToOrigin,
            EventTag::Negative { component, .. } => {
                OrbitKind::NegativityDetected { component, xi }
            }
            EventTag::Face(face) => OrbitKind::ExitedRegion { face, xi },
            // At a turn (dU = 0) the state has W - cU = -U chi V' >= 0
            // whenever V is still below 1/beta, so a turn with U >= 0 is an
            // exit through the W = cU face; with U < 0 it is the bottom of
            // a subcritical dip.
            EventTag::Turn => {
                let u = trajectory.last_state()[0];
                if u < 0.0 {
                    OrbitKind::NegativityDetected { component: 'U', xi }
                } else {
                    OrbitKind::ExitedRegion { face: FaceId::WeqCU, xi }
                }
            }
        },
        Termination::TimeLimit => OrbitKind::Stalled,
        // integrate() returns these as errors, never on the Ok path.
        Termination::StepLimit | Termination::NonFinite => unreachable!(),
    };
    Ok(OrbitOutcome { kind, trajectory, c })
}

/// Shoots the two-variable logistic-front system `dU = -cU + W`,
/// `dW = mu U (U - 1)`, which the full model reduces to when the
/// sensitivity vanishes. Used as a cross-check that the reduction and the
/// full system produce the same `(U, W)` orbit.
pub fn shoot_logistic_reduction(
    mu: f64,
    c: f64,
    cfg: &ShootConfig,
) -> Result<OrbitOutcome, HeteroError> {
    assert!(mu > 0.0 && c > 0.0);
    let lambda = 0.5 * (-c + (c * c + 4.0 * mu).sqrt());
    let norm = (1.0 + (lambda + c).powi(2)).sqrt();
    let dir = [-1.0 / norm, -(lambda + c) / norm];
    let y0 = [1.0 + cfg.eps * dir[0], c + cfg.eps * dir[1]];

    let radius = cfg.convergence_radius;
    let tol = cfg.exit_tol;
    let events = vec![
        EventSpec {
            guard: Box::new(move |s: &[f64]| radius - s[0].abs().max(s[1].abs())),
            direction: EventDirection::Up,
            terminal: true,
        },
        EventSpec::terminal_down(move |s: &[f64]| s[0] + tol),
        EventSpec::terminal_down(move |s: &[f64]| s[1] + tol),
    ];
    let xi_max = cfg.xi_max.unwrap_or(1e4 / c);
    let mut icfg = cfg.integrator.clone();
    icfg.max_step = icfg.max_step.min(2.5 / (0.5 * (c + (c * c + 4.0 * mu).sqrt())));
    let trajectory = integrate(
        |_, s, out| {
            out[0] = -c * s[0] + s[1];
            out[1] = mu * s[0] * (s[0] - 1.0);
        },
        &y0,
        [0.0, xi_max],
        &icfg,
        &events,
    )?;
    let kind = match trajectory.termination {
        Termination::Event { index: 0, .. } => OrbitKind::ConvergedToOrigin,
        Termination::Event { index, xi } => OrbitKind::NegativityDetected {
            component: if index == 1 { 'U' } else { 'W' },
            xi,
        },
        Termination::TimeLimit => OrbitKind::Stalled,
        Termination::StepLimit | Termination::NonFinite => unreachable!(),
    };
    Ok(OrbitOutcome { kind, trajectory, c })
}

/// Largest violation of the trap-region inequalities over the accepted
/// steps of an orbit: zero or negative means the whole recorded orbit
/// stayed inside. Converged orbits are expected to stay within 1e-6.
pub fn orbit_region_excess(
    outcome: &OrbitOutcome,
    p: &ModelParams,
) -> Result<f64, RegionError> {
    let region = TrapRegion::new(p, outcome.c)?;
    let mut excess: f64 = 0.0;
    for s in &outcome.trajectory.states {
        let m = region.contains(s)?;
        for slack in m.slacks {
            excess = excess.max(-slack);
        }
    }
    Ok(excess)
}

/// Tallies of shot classifications accumulated by a bisection run.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct OutcomeCounts {
    pub converged: usize,
    pub exited: usize,
    pub negative: usize,
    pub stalled: usize,
}

impl OutcomeCounts {
    fn add(&mut self, kind: &OrbitKind) {
        match kind {
            OrbitKind::ConvergedToOrigin => self.converged += 1,
            OrbitKind::ExitedRegion { .. } => self.exited += 1,
            OrbitKind::NegativityDetected { .. } => self.negative += 1,
            OrbitKind::Stalled => self.stalled += 1,
        }
    }
}

impl std::fmt::Display for OutcomeCounts {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "converged={}|negative={}|exited={}|stalled={}",
            self.converged, self.negative, self.exited, self.stalled
        )
    }
}

/// Result of the outcome-threshold bisection.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EmpiricalMinSpeed {
    /// Midpoint of the final bracket.
    pub c_min: f64,
    pub bracket: [f64; 2],
    /// Number of shooting runs spent.
    pub evaluations: usize,
    pub counts: OutcomeCounts,
}

/// Bisects the converged/not-converged predicate over `[c_lo, c_hi]` to
/// width `tol`. Stalled runs count as "no wave"; the convergence threshold
/// this measures is compared against the closed form by callers.
pub fn find_min_speed_empirical(
    p: &ModelParams,
    bracket: [f64; 2],
    tol: f64,
    cfg: &ShootConfig,
) -> Result<EmpiricalMinSpeed, HeteroError> {
    assert!(bracket[0] < bracket[1] && tol > 0.0);
    let mut counts = OutcomeCounts::default();
    let lo_out = shoot(p, bracket[0], cfg)?;
    let hi_out = shoot(p, bracket[1], cfg)?;
    counts.add(&lo_out.kind);
    counts.add(&hi_out.kind);
    let mut evaluations = 2;
    if lo_out.kind.converged() || !hi_out.kind.converged() {
        return Err(HeteroError::BracketInvalid { lo: lo_out.kind, hi: hi_out.kind });
    }
    let (mut lo, mut hi) = (bracket[0], bracket[1]);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let out = shoot(p, mid, cfg)?;
        evaluations += 1;
        counts.add(&out.kind);
        if out.kind.converged() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(EmpiricalMinSpeed { c_min: 0.5 * (lo + hi), bracket: [lo, hi], evaluations, counts })
}

/// One row of a wave-existence table; shooting errors are recorded in the
/// row rather than aborting the table.
#[derive(Debug, Serialize)]
pub struct ExistenceRow {
    pub c: f64,
    pub outcome: Result<OrbitKind, String>,
}

/// Runs `shoot` for each speed, rows ordered by speed.
pub fn wave_existence_table(
    p: &ModelParams,
    speeds: &[f64],
    cfg: &ShootConfig,
) -> Vec<ExistenceRow> {
    let mut sorted: Vec<f64> = speeds.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    sorted
        .into_iter()
        .map(|c| ExistenceRow {
            c,
            outcome: shoot(p, c, cfg).map(|o| o.kind).map_err(|e| e.to_string()),
        })
        .collect()
}

/// Finds the wave coordinate where `U` first crosses 1/2, bisecting the
/// integrator's dense interpolant to 1e-12.
pub fn locate_half_crossing(traj: &Trajectory) -> Result<f64, HeteroError> {
    let half = |t: f64| traj.sample(t)[0] - 0.5;
    let idx = (1..traj.times.len())
        .find(|&i| (traj.states[i - 1][0] - 0.5) > 0.0 && (traj.states[i][0] - 0.5) <= 0.0)
        .ok_or(HeteroError::NormalizationFailed)?;
    let (mut a, mut b) = (traj.times[idx - 1], traj.times[idx]);
    while b - a > 1e-12 {
        let m = 0.5 * (a + b);
        if half(m) > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Profile extraction controls.
#[derive(Debug, Clone)]
pub struct ProfileConfig {
    pub n_points: usize,
    pub ordering_tol: f64,
    pub monotonicity_tol: f64,
    pub tail_tol: f64,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        ProfileConfig {
            n_points: 2048,
            ordering_tol: 1e-8,
            monotonicity_tol: 1e-8,
            tail_tol: 1e-6,
        }
    }
}

/// Checks attached to an extracted profile. A clean wave has zero counts,
/// a left end at the invaded state, and a right end inside the convergence
/// ball.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ProfileReport {
    pub ordering_violations: usize,
    pub monotonicity_violations: usize,
    /// Largest violation of `0 <= U <= beta V <= 1` over the grid.
    pub worst_ordering_excess: f64,
    /// Largest positive forward difference of `U` or `V`.
    pub worst_monotonicity_excess: f64,
    /// Distance of the left end from `(1, 1/beta)` in the max norm.
    pub left_end_gap: f64,
    /// Max norm of the right-end state.
    pub right_end_norm: f64,
}

/// A wave profile on a uniform grid in the wave coordinate, shifted so
/// `U = 1/2` at zero.
#[derive(Debug, Clone, Serialize)]
pub struct TravelingWaveProfile {
    pub xi: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    /// Present exactly when the model carries chemical diffusion.
    pub y: Option<Vec<f64>>,
    pub w: Vec<f64>,
    pub speed: f64,
    /// Shift subtracted from the raw integration coordinate.
    pub shift: f64,
    pub report: ProfileReport,
}

/// Resamples a converged orbit onto a uniform grid via the integrator's
/// dense output and normalizes the wave coordinate. Grid values come from
/// the interpolant, not from piecewise-linear resampling, so downstream
/// finite-difference residuals see integrator-accurate states.
pub fn extract_profile(
    outcome: &OrbitOutcome,
    beta: f64,
    cfg: &ProfileConfig,
) -> Result<TravelingWaveProfile, HeteroError> {
    if !outcome.kind.converged() {
        return Err(HeteroError::NotConverged { kind: outcome.kind });
    }
    assert!(cfg.n_points >= 2);
    let traj = &outcome.trajectory;
    let shift = locate_half_crossing(traj)?;
    let (t0, t1) = (traj.start(), traj.end());
    let dim = traj.dim();
    let n = cfg.n_points;
    let mut xi = Vec::with_capacity(n);
    let mut u = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    let mut y = if dim == 4 { Some(Vec::with_capacity(n)) } else { None };
    let mut w = Vec::with_capacity(n);
    for i in 0..n {
        let t = t0 + (t1 - t0) * i as f64 / (n - 1) as f64;
        let s = traj.sample(t);
        xi.push(t - shift);
        u.push(s[0]);
        v.push(s[1]);
        if let Some(y) = y.as_mut() {
            y.push(s[2]);
        }
        w.push(s[dim - 1]);
    }

    let mut ordering_violations = 0;
    let mut worst_ordering: f64 = 0.0;
    for i in 0..n {
        let excess = (-u[i]).max(u[i] - beta * v[i]).max(beta * v[i] - 1.0);
        worst_ordering = worst_ordering.max(excess);
        if excess > cfg.ordering_tol {
            ordering_violations += 1;
        }
    }
    let mut monotonicity_violations = 0;
    let mut worst_mono: f64 = 0.0;
    for i in 1..n {
        let du = u[i] - u[i - 1];
        let dv = v[i] - v[i - 1];
        worst_mono = worst_mono.max(du).max(dv);
        if du > cfg.monotonicity_tol || dv > cfg.monotonicity_tol {
            monotonicity_violations += 1;
        }
    }
    let left_end_gap = (u[0] - 1.0).abs().max((v[0] - 1.0 / beta).abs());
    let right_end_norm = {
        let s = traj.sample(t1);
        s.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    };
    Ok(TravelingWaveProfile {
        xi,
        u,
        v,
        y,
        w,
        speed: outcome.c,
        shift,
        report: ProfileReport {
            ordering_violations,
            monotonicity_violations,
            worst_ordering_excess: worst_ordering,
            worst_monotonicity_excess: worst_mono,
            left_end_gap,
            right_end_norm,
        },
    })
}

/// Normalized-coordinate range on which a shifted orbit is defined.
pub fn normalized_span(traj: &Trajectory, shift: f64) -> (f64, f64) {
    (traj.start() - shift, traj.end() - shift)
}

/// Sup-norm disagreement between two orbits after each is shifted to put
/// `U = 1/2` at zero, sampled from both dense interpolants on a common
/// grid. `components` pairs indices in the first and second state vectors.
pub fn normalized_orbit_distance(
    a: &Trajectory,
    b: &Trajectory,
    components: &[(usize, usize)],
    n_points: usize,
) -> Result<f64, HeteroError> {
    let sa = locate_half_crossing(a)?;
    let sb = locate_half_crossing(b)?;
    let (alo, ahi) = normalized_span(a, sa);
    let (blo, bhi) = normalized_span(b, sb);
    let lo = alo.max(blo);
    let hi = ahi.min(bhi);
    assert!(hi > lo, "orbits share no normalized range");
    let mut worst: f64 = 0.0;
    for i in 0..n_points {
        let t = lo + (hi - lo) * i as f64 / (n_points - 1) as f64;
        let xa = a.sample(t + sa);
        let xb = b.sample(t + sb);
        for &(ia, ib) in components {
            worst = worst.max((xa[ia] - xb[ib]).abs());
        }
    }
    Ok(worst)
}

/// Re-runs a shoot with the manifold offset halved and reports the
/// normalized sup-norm disagreement of the two orbits; small values mean
/// the offset does not bias the computed wave.
pub fn manifold_offset_agreement(
    p: &ModelParams,
    c: f64,
    cfg: &ShootConfig,
) -> Result<f64, HeteroError> {
    let full = shoot(p, c, cfg)?;
    let mut halved_cfg = cfg.clone();
    halved_cfg.eps = cfg.eps / 2.0;
    let halved = shoot(p, c, &halved_cfg)?;
    if !full.kind.converged() || !halved.kind.converged() {
        return Err(HeteroError::NotConverged { kind: full.kind });
    }
    let dim = full.trajectory.dim();
    let pairs: Vec<(usize, usize)> = (0..dim).map(|i| (i, i)).collect();
    normalized_orbit_distance(&full.trajectory, &halved.trajectory, &pairs, 600)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ChiFunction;
    use crate::spectra::min_wave_speed;

    fn params(mu: f64, beta: f64, diff: f64, chi: ChiFunction) -> ModelParams {
        ModelParams::new(mu, beta, diff, chi).unwrap()
    }

    #[test]
    fn supercritical_shot_converges_and_stays_in_region() {
        let p = params(1.0, 1.0, 0.0, ChiFunction::ZERO);
        let out = shoot(&p, 2.5, &ShootConfig::default()).unwrap();
        assert_eq!(out.kind, OrbitKind::ConvergedToOrigin);
        let end = out.trajectory.last_state();
        assert!(end.iter().all(|x| x.abs() <= 1.1e-8), "{end:?}");
        let excess = orbit_region_excess(&out, &p).unwrap();
        assert!(excess <= 1e-6, "worst region violation {excess}");
    }

    #[test]
    fn subcritical_shot_detects_negativity() {
        let p = params(1.0, 1.0, 0.0, ChiFunction::ZERO);
        let out = shoot(&p, 1.0, &ShootConfig::default()).unwrap();
        match out.kind {
            OrbitKind::NegativityDetected { xi, .. } => assert!(xi > 0.0),
            other => panic!("expected negativity, got {other:?}"),
        }
    }

    #[test]
    fn boundary_speed_with_full_sensitivity_converges() {
        // Hardest admissible planar case: chi equal to mu at the exact
        // threshold speed, with tightened tolerances.
        let p = params(1.0, 1.0, 0.0, ChiFunction::constant(1.0));
        let mut cfg = ShootConfig::default();
        cfg.integrator.rel_tol = 1e-12;
        cfg.integrator.abs_tol = 1e-13;
        let out = shoot(&p, 2.0, &cfg).unwrap();
        assert_eq!(out.kind, OrbitKind::ConvergedToOrigin);
    }

    #[test]
    fn four_dimensional_threshold_brackets() {
        // Cell where the logistic scale is the slower one (c* = 2 sqrt(mu)
        // = 4 > 2 sqrt(D beta) = 2): the subcritical oscillation lives in
        // the (U, W) pair, which nothing decays slower than, so shooting
        // sees the threshold.
        let p = params(4.0, 1.0, 1.0, ChiFunction::constant(1.0));
        let cfg = ShootConfig::default();
        let above = shoot(&p, 4.2, &cfg).unwrap();
        assert_eq!(above.kind, OrbitKind::ConvergedToOrigin);
        let below = shoot(&p, 3.8, &cfg).unwrap();
        assert!(!below.kind.converged(), "{:?}", below.kind);
    }

    #[test]
    fn chemical_scale_oscillation_is_masked_by_the_slow_real_mode() {
        // Cell where the chemical scale is the slower one in the closed
        // form: c* = 2 sqrt(D beta) = 4 > 2 sqrt(mu) = 2. For speeds in
        // between, the complex pair sits in (V, Y) and decays at rate c/2,
        // while the real U-mode decays at a rate below sqrt(mu) and feeds V
        // through a positive transfer coefficient. The oscillation shrinks
        // by orders of magnitude per turn relative to that positive tail,
        // so no component of the shot orbit ever dips below double
        // precision's reach: shooting classifies the speed as converged,
        // and any empirical threshold search finds the logistic scale
        // instead. This pins the detection limit rather than papering over
        // it.
        let p = params(1.0, 4.0, 1.0, ChiFunction::constant(1.0));
        let cfg = ShootConfig::default();
        assert_eq!(min_wave_speed(&p).c_star, 4.0);

        let mid = shoot(&p, 3.5, &cfg).unwrap();
        assert_eq!(mid.kind, OrbitKind::ConvergedToOrigin);
        let mut floor = f64::INFINITY;
        for s in &mid.trajectory.states {
            floor = floor.min(s[0]).min(s[1]).min(s[3]);
        }
        assert!(floor >= -1e-9, "visible negative excursion {floor}");

        // Below the logistic scale the (U, W) pair itself turns complex
        // and detection resumes.
        let low = shoot(&p, 1.9, &cfg).unwrap();
        assert!(!low.kind.converged(), "{:?}", low.kind);
    }

    #[test]
    fn tiny_horizon_stalls() {
        let p = params(1.0, 1.0, 0.0, ChiFunction::ZERO);
        let cfg = ShootConfig { xi_max: Some(1.0), ..ShootConfig::default() };
        let out = shoot(&p, 2.5, &cfg).unwrap();
        assert_eq!(out.kind, OrbitKind::Stalled);
    }

    #[test]
    fn bisection_recovers_closed_form_speed() {
        let p = params(1.0, 1.0, 0.0, ChiFunction::ZERO);
        let est =
            find_min_speed_empirical(&p, [1.0, 4.0], 1e-3, &ShootConfig::default()).unwrap();
        assert!((est.c_min - 2.0).abs() <= 0.02, "{}", est.c_min);
        assert!(est.bracket[1] - est.bracket[0] <= 1e-3);

        let p = params(0.25, 2.0, 0.0, ChiFunction::constant(0.125));
        let est =
            find_min_speed_empirical(&p, [0.5, 2.0], 1e-3, &ShootConfig::default()).unwrap();
        assert!((est.c_min - 1.0).abs() <= 0.02, "{}", est.c_min);
    }

    #[test]
    fn bisection_rejects_bad_brackets() {
        let p = params(1.0, 1.0, 0.0, ChiFunction::ZERO);
        let err = find_min_speed_empirical(&p, [2.5, 3.0], 1e-3, &ShootConfig::default())
            .unwrap_err();
        assert!(matches!(err, HeteroError::BracketInvalid { .. }));
    }

    #[test]
    fn empirical_speed_is_sensitivity_independent() {
        for kappa in [0.0, 0.5, 1.0] {
            let p = params(1.0, 1.0, 0.0, ChiFunction::constant(kappa));
            let est =
                find_min_speed_empirical(&p, [1.0, 4.0], 1e-3, &ShootConfig::default())
                    .unwrap();
            assert!((est.c_min - 2.0).abs() <= 0.02, "kappa={kappa}: {}", est.c_min);
        }
    }

    #[test]
    fn existence_table_matches_threshold() {
        let p = params(1.0, 1.0, 0.0, ChiFunction::ZERO);
        let rows =
            wave_existence_table(&p, &[1.5, 1.9, 2.1, 3.0], &ShootConfig::default());
        let verdicts: Vec<bool> = rows
            .iter()
            .map(|r| r.outcome.as_ref().unwrap().converged())
            .collect();
        assert_eq!(verdicts, [false, false, true, true]);
    }

    #[test]
    fn profile_is_normalized_ordered_and_monotone() {
        let p = params(1.0, 1.0, 0.0, ChiFunction::ZERO);
        let out = shoot(&p, 2.5, &ShootConfig::default()).unwrap();
        let prof = extract_profile(&out, p.beta, &ProfileConfig::default()).unwrap();
        assert_eq!(prof.xi.len(), 2048);
        assert_eq!(prof.report.ordering_violations, 0);
        assert_eq!(prof.report.monotonicity_violations, 0);
        assert!(prof.report.left_end_gap <= 1e-6);
        assert!(prof.report.right_end_norm <= 1.1e-12);

        // U interpolates to 1/2 at the shifted origin. The bound reflects
        // the linear resampling error at 2048 points over the full span,
        // not the shift location itself, which is bisected to 1e-12.
        let k = prof.xi.iter().position(|&x| x >= 0.0).unwrap();
        let t = (0.0 - prof.xi[k - 1]) / (prof.xi[k] - prof.xi[k - 1]);
        let u0 = prof.u[k - 1] + t * (prof.u[k] - prof.u[k - 1]);
        assert!((u0 - 0.5).abs() < 5e-6, "U(0) = {u0}");
    }

    #[test]
    fn profile_requires_convergence() {
        let p = params(1.0, 1.0, 0.0, ChiFunction::ZERO);
        let out = shoot(&p, 1.0, &ShootConfig::default()).unwrap();
        assert!(matches!(
            extract_profile(&out, p.beta, &ProfileConfig::default()),
            Err(HeteroError::NotConverged { .. })
        ));
    }

    #[test]
    fn manifold_offset_does_not_bias_the_wave() {
        let p = params(1.0, 1.0, 0.0, ChiFunction::ZERO);
        let dist = manifold_offset_agreement(&p, 2.5, &ShootConfig::default()).unwrap();
        assert!(dist < 1e-5, "offset sensitivity {dist}");
    }

    #[test]
    fn logistic_reduction_matches_planar_projection() {
        // With zero sensitivity the (U, W) equations close on themselves,
        // so the planar shot and the reduced shot trace one manifold.
        let p = params(1.0, 1.0, 0.0, ChiFunction::ZERO);
        let full = shoot(&p, 2.5, &ShootConfig::default()).unwrap();
        let reduced = shoot_logistic_reduction(1.0, 2.5, &ShootConfig::default()).unwrap();
        assert_eq!(reduced.kind, OrbitKind::ConvergedToOrigin);
        let dist = normalized_orbit_distance(
            &full.trajectory,
            &reduced.trajectory,
            &[(0, 0), (2, 1)],
            500,
        )
        .unwrap();
        assert!(dist < 1e-6, "projection disagreement {dist}");
    }

    #[test]
    fn empirical_speed_matches_closed_form_for_random_draws() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..3 {
            let mu = 0.5 + 1.5 * rng.gen::<f64>();
            let beta = 0.5 + 1.5 * rng.gen::<f64>();
            let kappa = mu * rng.gen::<f64>();
            let p = params(mu, beta, 0.0, ChiFunction::constant(kappa));
            let c_star = min_wave_speed(&p).c_star;
            let est = find_min_speed_empirical(
                &p,
                [0.4 * c_star, 2.5 * c_star],
                1e-3,
                &ShootConfig::default(),
            )
            .unwrap();
            assert!(
                (est.c_min - c_star).abs() <= (2e-3f64).max(0.01 * c_star),
                "mu={mu} beta={beta} kappa={kappa}: {} vs {c_star}",
                est.c_min
            );
        }
    }
}
