//! Method-of-lines simulator for the reaction-diffusion-chemotaxis system,
//! front tracking, speed estimation, and steady-state residuals of computed
//! wave profiles.
//!
//! Space is a uniform cell-centered grid on `[0, L]` with zero-flux
//! (mirror ghost) boundaries. The cell equation uses a central second
//! difference for diffusion and a conservative upwinded flux for the
//! chemotaxis term; the chemical equation is local when `D = 0` and gains a
//! central second difference otherwise. Time stepping is explicit
//! three-stage strong-stability-preserving Runge-Kutta under a combined
//! diffusive/advective step bound. Negative values are never clipped: the
//! chemical's local kinetics have a positive growth rate, and what the
//! discrete system does is reported, not hidden.

use serde::Serialize;
use thiserror::Error;

use crate::heteroclinic::TravelingWaveProfile;
use crate::model::ModelParams;

#[derive(Debug, Error)]
pub enum PdeError {
    #[error("state became non-finite at t = {t}")]
    NonFiniteState { t: f64 },
    #[error("field does not cross the requested level")]
    NoCrossing,
    #[error("speed regression needs at least 10 samples in the window, have {have}")]
    InsufficientSamples { have: usize },
    #[error("residual stencil needs at least 64 profile points, have {points}")]
    GridTooCoarse { points: usize },
}

/// Uniform cell-centered grid over `[0, length]` with at least 16 cells.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Grid1D {
    pub length: f64,
    pub n: usize,
}

impl Grid1D {
    pub fn new(length: f64, n: usize) -> Self {
        assert!(length > 0.0 && length.is_finite(), "grid length must be positive");
        assert!(n >= 16, "grid needs at least 16 cells, got {n}");
        Grid1D { length, n }
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Center of cell `i`.
    pub fn cell_center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dx()
    }
}

/// Cell density `u` and chemical concentration `v` on a common grid.
#[derive(Debug, Clone, Serialize)]
pub struct FieldPair {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl FieldPair {
    pub fn new(u: Vec<f64>, v: Vec<f64>) -> Self {
        assert_eq!(u.len(), v.len(), "fields must share a grid");
        assert!(!u.is_empty());
        assert!(
            u.iter().chain(v.iter()).all(|x| x.is_finite()),
            "fields must be finite"
        );
        FieldPair { u, v }
    }

    pub fn constant(n: usize, u0: f64, v0: f64) -> Self {
        FieldPair::new(vec![u0; n], vec![v0; n])
    }

    /// Step front: `u = 1` strictly left of `x_step`, `0` from there on,
    /// with `v = u / beta` so the pair starts on the ordering cone's edge.
    pub fn step_front(g: &Grid1D, x_step: f64, beta: f64) -> Self {
        let u: Vec<f64> = (0..g.n)
            .map(|i| if g.cell_center(i) < x_step { 1.0 } else { 0.0 })
            .collect();
        let v = u.iter().map(|ui| ui / beta).collect();
        FieldPair::new(u, v)
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }
}

/// Samples a wave profile onto a grid window `[xi_left, xi_left + L]` by
/// linear interpolation, extending by the end values outside the profile's
/// span (the tails are flat to begin with).
pub fn sample_profile(prof: &TravelingWaveProfile, g: &Grid1D, xi_left: f64) -> FieldPair {
    let xs = &prof.xi;
    let h = xs[1] - xs[0];
    let interp = |ys: &[f64], xi: f64| -> f64 {
        if xi <= xs[0] {
            return ys[0];
        }
        if xi >= *xs.last().unwrap() {
            return *ys.last().unwrap();
        }
        let k = (((xi - xs[0]) / h).floor() as usize).min(xs.len() - 2);
        let t = (xi - xs[k]) / h;
        ys[k] + t * (ys[k + 1] - ys[k])
    };
    let mut u = Vec::with_capacity(g.n);
    let mut v = Vec::with_capacity(g.n);
    for i in 0..g.n {
        let xi = xi_left + g.cell_center(i);
        u.push(interp(&prof.u, xi));
        v.push(interp(&prof.v, xi));
    }
    FieldPair::new(u, v)
}

/// Per-step extrema series; one entry for the initial state, then one per
/// accepted step. `max_u_minus_beta_v` is the discrete shadow of the
/// wave-ordering cone `u <= beta v`.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Monitors {
    pub min_u: Vec<f64>,
    pub min_v: Vec<f64>,
    pub max_u_minus_beta_v: Vec<f64>,
    pub max_u: Vec<f64>,
}

impl Monitors {
    fn record(&mut self, f: &FieldPair, beta: f64) {
        let mut min_u = f64::INFINITY;
        let mut min_v = f64::INFINITY;
        let mut max_ord = f64::NEG_INFINITY;
        let mut max_u = f64::NEG_INFINITY;
        for (ui, vi) in f.u.iter().zip(&f.v) {
            min_u = min_u.min(*ui);
            min_v = min_v.min(*vi);
            max_ord = max_ord.max(ui - beta * vi);
            max_u = max_u.max(*ui);
        }
        self.min_u.push(min_u);
        self.min_v.push(min_v);
        self.max_u_minus_beta_v.push(max_ord);
        self.max_u.push(max_u);
    }
}

/// Recorded simulation output.
#[derive(Debug)]
pub struct SpaceTimeSolution {
    /// Times of the recorded snapshots (always includes start and end).
    pub times: Vec<f64>,
    pub snapshots: Vec<FieldPair>,
    /// `(t, x_front)` whenever the front level was crossed at that step.
    pub front_series: Vec<(f64, f64)>,
    pub monitors: Monitors,
    pub dt: f64,
    pub steps: usize,
}

impl SpaceTimeSolution {
    /// Sup-norm drift of the cell density between the first and last
    /// snapshots. The drift of a seeded wave is measured on `u`: the
    /// chemical's local kinetics have growth rate `beta`, so any
    /// discretization error in `v` is amplified like `exp(beta t)` and is
    /// reported through the monitors instead of a pass/fail drift number.
    pub fn cell_density_drift(&self) -> f64 {
        let first = &self.snapshots.first().expect("at least one snapshot").u;
        let last = &self.snapshots.last().expect("at least one snapshot").u;
        first
            .iter()
            .zip(last)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Largest ordering-monitor value seen over the whole run.
    pub fn max_ordering_excess(&self) -> f64 {
        self.monitors
            .max_u_minus_beta_v
            .iter()
            .fold(f64::NEG_INFINITY, |m, x| m.max(*x))
    }
}

/// Simulation controls. `snapshot_stride = 0` records only the initial and
/// final states; `k > 0` additionally records every k-th step.
/// `comoving_speed` adds `+c d/dxi` to both equations so a traveling wave
/// becomes a steady state. The step size is
/// `min(0.4 dx^2 / max(1, D), 0.8 dx / c, dt_cap)`, snapped down so the
/// horizon is an integer number of steps.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub snapshot_stride: usize,
    pub comoving_speed: Option<f64>,
    pub front_level: f64,
    pub dt_cap: Option<f64>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            snapshot_stride: 0,
            comoving_speed: None,
            front_level: 0.5,
            dt_cap: None,
        }
    }
}

/// Lab-frame semi-discrete time derivative.
pub fn pde_rhs(f: &FieldPair, p: &ModelParams, g: &Grid1D) -> FieldPair {
    let mut out = FieldPair::constant(f.len(), 0.0, 0.0);
    rhs_into(f, p, g, None, &mut out);
    out
}

/// Shared RHS assembly; `comoving = Some(c)` adds the advective `+c d/dxi`
/// term (second-order central) to both equations.
fn rhs_into(f: &FieldPair, p: &ModelParams, g: &Grid1D, comoving: Option<f64>, out: &mut FieldPair) {
    let n = f.len();
    let dx = g.dx();
    let inv_dx = 1.0 / dx;
    let inv_dx2 = inv_dx * inv_dx;
    let (u, v) = (&f.u, &f.v);
    let mirror = |idx: isize| -> usize {
        if idx < 0 {
            0
        } else if idx as usize >= n {
            n - 1
        } else {
            idx as usize
        }
    };

    // Chemotaxis flux at interior interfaces; zero-flux boundaries leave
    // interfaces 0 and n at zero. The advected quantity is upwinded by the
    // interface velocity chi(v_mid) (v_{i+1} - v_i)/dx.
    let mut flux = vec![0.0; n + 1];
    for j in 1..n {
        let dv = (v[j] - v[j - 1]) * inv_dx;
        let vm = 0.5 * (v[j] + v[j - 1]);
        let vel = p.chi_eval(vm).0 * dv;
        let up = if vel > 0.0 { u[j - 1] } else { u[j] };
        flux[j] = up * vel;
    }

    for i in 0..n {
        let (im, ip) = (mirror(i as isize - 1), mirror(i as isize + 1));
        let lap_u = (u[im] - 2.0 * u[i] + u[ip]) * inv_dx2;
        let mut du = lap_u - (flux[i + 1] - flux[i]) * inv_dx + p.mu * u[i] * (1.0 - u[i]);
        let mut dv = p.beta * v[i] - u[i];
        if p.diff > 0.0 {
            dv += p.diff * (v[im] - 2.0 * v[i] + v[ip]) * inv_dx2;
        }
        if let Some(c) = comoving {
            du += c * (u[ip] - u[im]) * 0.5 * inv_dx;
            dv += c * (v[ip] - v[im]) * 0.5 * inv_dx;
        }
        out.u[i] = du;
        out.v[i] = dv;
    }
}

/// Integrates the semi-discrete system to `t_end` with three-stage
/// strong-stability-preserving Runge-Kutta, recording monitors and the
/// front position every step. Negative values are recorded, never clipped.
pub fn simulate(
    p: &ModelParams,
    g: &Grid1D,
    init: &FieldPair,
    t_end: f64,
    cfg: &SimConfig,
) -> Result<SpaceTimeSolution, PdeError> {
    assert_eq!(init.len(), g.n, "initial data must live on the grid");
    assert!(t_end > 0.0);
    let dx = g.dx();
    let mut dt = 0.4 * dx * dx / p.diff.max(1.0);
    if let Some(c) = cfg.comoving_speed {
        dt = dt.min(0.8 * dx / c.abs());
    }
    if let Some(cap) = cfg.dt_cap {
        dt = dt.min(cap);
    }
    let steps = (t_end / dt).ceil() as usize;
    let dt = t_end / steps as f64;

    let mut state = init.clone();
    let mut stage = init.clone();
    let mut k = FieldPair::constant(g.n, 0.0, 0.0);
    let mut sol = SpaceTimeSolution {
        times: vec![0.0],
        snapshots: vec![init.clone()],
        front_series: Vec::new(),
        monitors: Monitors::default(),
        dt,
        steps,
    };
    sol.monitors.record(&state, p.beta);
    if let Ok(x) = front_position(&state, g, cfg.front_level) {
        sol.front_series.push((0.0, x));
    }

    for step in 1..=steps {
        let t_next = step as f64 * dt;
        // Shu-Osher stages: convex combinations of forward-Euler steps.
        rhs_into(&state, p, g, cfg.comoving_speed, &mut k);
        for i in 0..g.n {
            stage.u[i] = state.u[i] + dt * k.u[i];
            stage.v[i] = state.v[i] + dt * k.v[i];
        }
        rhs_into(&stage, p, g, cfg.comoving_speed, &mut k);
        for i in 0..g.n {
            stage.u[i] = 0.75 * state.u[i] + 0.25 * (stage.u[i] + dt * k.u[i]);
            stage.v[i] = 0.75 * state.v[i] + 0.25 * (stage.v[i] + dt * k.v[i]);
        }
        rhs_into(&stage, p, g, cfg.comoving_speed, &mut k);
        for i in 0..g.n {
            state.u[i] = state.u[i] / 3.0 + 2.0 / 3.0 * (stage.u[i] + dt * k.u[i]);
            state.v[i] = state.v[i] / 3.0 + 2.0 / 3.0 * (stage.v[i] + dt * k.v[i]);
        }

        if state.u.iter().chain(state.v.iter()).any(|x| !x.is_finite()) {
            return Err(PdeError::NonFiniteState { t: t_next });
        }
        sol.monitors.record(&state, p.beta);
        if let Ok(x) = front_position(&state, g, cfg.front_level) {
            sol.front_series.push((t_next, x));
        }
        let record = step == steps
            || (cfg.snapshot_stride > 0 && step % cfg.snapshot_stride == 0);
        if record {
            sol.times.push(t_next);
            sol.snapshots.push(state.clone());
        }
    }
    Ok(sol)
}

/// Rightmost crossing of `u = level`, linearly interpolated between the
/// adjacent cell centers.
pub fn front_position(f: &FieldPair, g: &Grid1D, level: f64) -> Result<f64, PdeError> {
    let u = &f.u;
    for i in (0..u.len() - 1).rev() {
        let (a, b) = (u[i] - level, u[i + 1] - level);
        if a == 0.0 && b == 0.0 {
            continue;
        }
        if a * b <= 0.0 && a != b {
            let t = a / (a - b);
            return Ok(g.cell_center(i) + t * g.dx());
        }
    }
    Err(PdeError::NoCrossing)
}

/// Least-squares front speed over `window = [t_a, t_b]` with its standard
/// error; needs at least 10 samples inside the window.
pub fn estimate_speed(
    front_series: &[(f64, f64)],
    window: [f64; 2],
) -> Result<(f64, f64), PdeError> {
    let pts: Vec<(f64, f64)> = front_series
        .iter()
        .filter(|(t, _)| *t >= window[0] && *t <= window[1])
        .cloned()
        .collect();
    let m = pts.len();
    if m < 10 {
        return Err(PdeError::InsufficientSamples { have: m });
    }
    let mf = m as f64;
    let t_mean = pts.iter().map(|(t, _)| t).sum::<f64>() / mf;
    let x_mean = pts.iter().map(|(_, x)| x).sum::<f64>() / mf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (t, x) in &pts {
        sxx += (t - t_mean) * (t - t_mean);
        sxy += (t - t_mean) * (x - x_mean);
    }
    let slope = sxy / sxx;
    let intercept = x_mean - slope * t_mean;
    let rss: f64 = pts
        .iter()
        .map(|(t, x)| {
            let r = x - (slope * t + intercept);
            r * r
        })
        .sum();
    let stderr = (rss / (mf - 2.0) / sxx).sqrt();
    Ok((slope, stderr))
}

/// Evaluates both steady co-moving equations on a wave profile with
/// fourth-order central differences (including the chemotaxis product
/// term, differentiated as an assembled product) and returns the max-norm
/// residual over the interior, trimming 5 points per end.
pub fn comoving_residual(
    prof: &TravelingWaveProfile,
    p: &ModelParams,
) -> Result<f64, PdeError> {
    let n = prof.xi.len();
    if n < 64 {
        return Err(PdeError::GridTooCoarse { points: n });
    }
    let h = prof.xi[1] - prof.xi[0];
    let c = prof.speed;
    let d1 = |f: &[f64], i: usize| {
        (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) / (12.0 * h)
    };
    let d2 = |f: &[f64], i: usize| {
        (-f[i + 2] + 16.0 * f[i + 1] - 30.0 * f[i] + 16.0 * f[i - 1] - f[i - 2])
            / (12.0 * h * h)
    };

    // Chemotaxis product G = U chi(V) V' on the full grid (one-sided at the
    // trimmed ends is unnecessary: those points are never differentiated).
    let mut g_term = vec![0.0; n];
    for i in 2..n - 2 {
        g_term[i] = prof.u[i] * p.chi_eval(prof.v[i]).0 * d1(&prof.v, i);
    }

    let mut worst: f64 = 0.0;
    for i in 5..n - 5 {
        let ru = d2(&prof.u, i) + c * d1(&prof.u, i) - d1(&g_term, i)
            + p.mu * prof.u[i] * (1.0 - prof.u[i]);
        let mut rv = c * d1(&prof.v, i) + p.beta * prof.v[i] - prof.u[i];
        if p.diff > 0.0 {
            rv += p.diff * d2(&prof.v, i);
        }
        worst = worst.max(ru.abs()).max(rv.abs());
    }
    Ok(worst)
}
