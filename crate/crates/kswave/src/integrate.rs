//! Adaptive explicit Runge-Kutta integration with dense output and event
//! location.
//!
//! The stepper is the classic Dormand-Prince 5(4) embedded pair with the
//! first-same-as-last optimization, a proportional-integral step-size
//! controller, and the standard quartic continuous extension. Events are
//! scalar guard functions of the state; a sign change over an accepted step
//! is refined by bisection on the dense interpolant until the crossing is
//! bracketed to within 1e-12 in the independent variable.
//!
//! Everything is plain `f64` arithmetic with no parallelism or allocation
//! races, so repeated runs with identical inputs produce bit-identical
//! trajectories.

use thiserror::Error;

/// Tolerances and budget for one integration.
#[derive(Debug, Clone)]
pub struct IntegratorConfig {
    /// Relative tolerance entering the weighted error norm.
    pub rel_tol: f64,
    /// Absolute tolerance entering the weighted error norm.
    pub abs_tol: f64,
    /// Upper bound on the step magnitude (infinite by default).
    pub max_step: f64,
    /// Accepted-step budget before giving up.
    pub max_steps: u64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-11,
            max_step: f64::INFINITY,
            max_steps: 10_000_000,
        }
    }
}

/// Which sign changes of a guard fire the event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventDirection {
    /// Guard crosses zero from positive to negative.
    Down,
    /// Guard crosses zero from negative to positive.
    Up,
    /// Any sign change.
    Any,
}

/// A scalar guard watched during integration.
pub struct EventSpec {
    /// Guard value as a function of the state; an event is a zero crossing.
    pub guard: Box<dyn Fn(&[f64]) -> f64>,
    pub direction: EventDirection,
    /// Terminal events truncate the trajectory at the located crossing.
    pub terminal: bool,
}

impl EventSpec {
    pub fn terminal_down(guard: impl Fn(&[f64]) -> f64 + 'static) -> Self {
        Self {
            guard: Box::new(guard),
            direction: EventDirection::Down,
            terminal: true,
        }
    }
}

/// Why integration stopped.
#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    /// Reached the end of the requested span.
    TimeLimit,
    /// A terminal event fired; carries the event index and location.
    Event { index: usize, xi: f64 },
    /// Accepted-step budget exhausted.
    StepLimit,
    /// State or derivative became non-finite.
    NonFinite,
}

/// One located guard crossing.
#[derive(Debug, Clone, Copy)]
pub struct EventRecord {
    pub index: usize,
    pub xi: f64,
}

/// Dense-output coefficients for one accepted step.
///
/// Evaluation uses the nested quartic
/// `c1 + th*(c2 + (1-th)*(c3 + th*(c4 + (1-th)*c5)))` with `th` the
/// normalized offset inside the step.
#[derive(Debug, Clone)]
struct DenseSegment {
    t0: f64,
    h: f64,
    cont: [Vec<f64>; 5],
}

impl DenseSegment {
    fn eval_into(&self, t: f64, out: &mut [f64]) {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        for i in 0..out.len() {
            out[i] = self.cont[0][i]
                + th * (self.cont[1][i]
                    + th1 * (self.cont[2][i] + th * (self.cont[3][i] + th1 * self.cont[4][i])));
        }
    }
}

/// Accepted states, dense output, and stop reason for one integration.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Strictly monotone sequence of accepted abscissae, including the start.
    pub times: Vec<f64>,
    /// State at each accepted abscissa.
    pub states: Vec<Vec<f64>>,
    pub termination: Termination,
    /// All located events, terminal or not, in order of occurrence.
    pub events: Vec<EventRecord>,
    dense: Vec<DenseSegment>,
    dim: usize,
}

impl Trajectory {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        *self.times.last().expect("trajectory has at least one point")
    }

    pub fn last_state(&self) -> &[f64] {
        self.states.last().expect("trajectory has at least one point")
    }

    /// Evaluates the dense interpolant at `t`, which must lie inside the
    /// integrated span. Endpoints are returned exactly.
    pub fn sample(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.sample_into(t, &mut out);
        out
    }

    pub fn sample_into(&self, t: f64, out: &mut [f64]) {
        assert_eq!(out.len(), self.dim, "output buffer dimension mismatch");
        if self.dense.is_empty() {
            out.copy_from_slice(&self.states[0]);
            return;
        }
        let t0 = self.start();
        let t1 = self.end();
        let forward = t1 >= t0;
        let (lo, hi) = if forward { (t0, t1) } else { (t1, t0) };
        assert!(
            t >= lo - 1e-12 && t <= hi + 1e-12,
            "sample point {t} outside integrated span [{lo}, {hi}]"
        );
        if t == t0 {
            out.copy_from_slice(&self.states[0]);
            return;
        }
        // Binary search for the segment whose [t0, t0+h] contains t.
        let mut a = 0usize;
        let mut b = self.dense.len() - 1;
        while a < b {
            let mid = (a + b) / 2;
            let seg_end = self.dense[mid].t0 + self.dense[mid].h;
            let past = if forward { t > seg_end } else { t < seg_end };
            if past {
                a = mid + 1;
            } else {
                b = mid;
            }
        }
        self.dense[a].eval_into(t, out);
    }
}

/// Integration failures. Both variants carry the partial trajectory up to the
/// last finite accepted state.
#[derive(Debug, Error)]
pub enum IntegrateError {
    #[error("accepted-step budget of {max_steps} exhausted at xi = {at}")]
    StepLimitExceeded {
        max_steps: u64,
        at: f64,
        trajectory: Trajectory,
    },
    #[error("state became non-finite near xi = {at}")]
    NonFiniteState { at: f64, trajectory: Trajectory },
}

impl IntegrateError {
    pub fn trajectory(&self) -> &Trajectory {
        match self {
            IntegrateError::StepLimitExceeded { trajectory, .. } => trajectory,
            IntegrateError::NonFiniteState { trajectory, .. } => trajectory,
        }
    }
}

// Dormand-Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
// Difference between the 5th- and 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// Dense-output weights for the quartic continuous extension.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Tolerance on the independent variable when bisecting an event crossing.
const EVENT_XI_TOL: f64 = 1e-12;

fn sign_change(g0: f64, g1: f64, dir: EventDirection) -> bool {
    let crossed = match dir {
        EventDirection::Down => g0 > 0.0 && g1 <= 0.0,
        EventDirection::Up => g0 < 0.0 && g1 >= 0.0,
        EventDirection::Any => (g0 > 0.0 && g1 <= 0.0) || (g0 < 0.0 && g1 >= 0.0),
    };
    crossed && g1 != g0
}

/// Integrates `dy/dxi = rhs(xi, y)` over `span`, watching `events`.
///
/// Returns the trajectory on success; step-budget exhaustion and non-finite
/// states are errors carrying the partial trajectory. The span may be
/// degenerate (`span[0] == span[1]`), in which case the trajectory holds the
/// initial point only.
pub fn integrate(
    mut rhs: impl FnMut(f64, &[f64], &mut [f64]),
    y0: &[f64],
    span: [f64; 2],
    cfg: &IntegratorConfig,
    events: &[EventSpec],
) -> Result<Trajectory, IntegrateError> {
    let n = y0.len();
    let dir = if span[1] >= span[0] { 1.0 } else { -1.0 };
    let mut t = span[0];
    let mut y = y0.to_vec();

    let mut traj = Trajectory {
        times: vec![t],
        states: vec![y.clone()],
        termination: Termination::TimeLimit,
        events: Vec::new(),
        dense: Vec::new(),
        dim: n,
    };
    if span[0] == span[1] {
        return Ok(traj);
    }

    let mut k: [Vec<f64>; 7] = std::array::from_fn(|_| vec![0.0; n]);
    let mut y_stage = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    let mut err_vec = vec![0.0; n];
    let mut guards: Vec<f64> = events.iter().map(|e| (e.guard)(&y)).collect();

    rhs(t, &y, &mut k[0]);
    if !k[0].iter().all(|v| v.is_finite()) {
        traj.termination = Termination::NonFinite;
        return Err(IntegrateError::NonFiniteState { at: t, trajectory: traj });
    }

    let mut h = initial_step(&mut rhs, t, &y, &k[0], dir, span, cfg);
    let mut err_old = 1e-4_f64;
    let mut steps: u64 = 0;
    let mut just_rejected = false;

    loop {
        if steps >= cfg.max_steps {
            traj.termination = Termination::StepLimit;
            return Err(IntegrateError::StepLimitExceeded {
                max_steps: cfg.max_steps,
                at: t,
                trajectory: traj,
            });
        }
        let remaining = span[1] - t;
        if remaining * dir <= 0.0 {
            traj.termination = Termination::TimeLimit;
            return Ok(traj);
        }
        if h.abs() > remaining.abs() {
            h = remaining;
        }
        if h.abs() < 4.0 * f64::EPSILON * t.abs().max(1.0) {
            // Step size collapsed: the controller cannot make progress.
            traj.termination = Termination::NonFinite;
            return Err(IntegrateError::NonFiniteState { at: t, trajectory: traj });
        }

        // Stage evaluations (k[0] is FSAL from the previous accepted step).
        for i in 0..n {
            y_stage[i] = y[i] + h * A21 * k[0][i];
        }
        rhs(t + C2 * h, &y_stage, &mut k[1]);
        for i in 0..n {
            y_stage[i] = y[i] + h * (A31 * k[0][i] + A32 * k[1][i]);
        }
        rhs(t + C3 * h, &y_stage, &mut k[2]);
        for i in 0..n {
            y_stage[i] = y[i] + h * (A41 * k[0][i] + A42 * k[1][i] + A43 * k[2][i]);
        }
        rhs(t + C4 * h, &y_stage, &mut k[3]);
        for i in 0..n {
            y_stage[i] =
                y[i] + h * (A51 * k[0][i] + A52 * k[1][i] + A53 * k[2][i] + A54 * k[3][i]);
        }
        rhs(t + C5 * h, &y_stage, &mut k[4]);
        for i in 0..n {
            y_stage[i] = y[i]
                + h * (A61 * k[0][i] + A62 * k[1][i] + A63 * k[2][i] + A64 * k[3][i]
                    + A65 * k[4][i]);
        }
        rhs(t + h, &y_stage, &mut k[5]);
        for i in 0..n {
            y_new[i] = y[i]
                + h * (B1 * k[0][i] + B3 * k[2][i] + B4 * k[3][i] + B5 * k[4][i] + B6 * k[5][i]);
        }
        rhs(t + h, &y_new, &mut k[6]);
        for i in 0..n {
            err_vec[i] = h
                * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i]
                    + E7 * k[6][i]);
        }

        // Weighted RMS error norm.
        let mut err_sq = 0.0;
        for i in 0..n {
            let sc = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(y_new[i].abs());
            let r = err_vec[i] / sc;
            err_sq += r * r;
        }
        let err = (err_sq / n as f64).sqrt();

        if !err.is_finite() || !y_new.iter().all(|v| v.is_finite()) {
            h *= 0.1;
            just_rejected = true;
            continue;
        }

        if err > 1.0 {
            // Reject: shrink by the classic P-controller bound.
            let scale = (0.9 / err.powf(0.2)).max(0.2);
            h *= scale;
            just_rejected = true;
            continue;
        }

        // Accept. PI controller for the next step.
        steps += 1;
        let fac = err.max(1e-16).powf(0.17) / err_old.powf(0.04);
        let mut scale = 0.9 / fac;
        scale = scale.clamp(0.2, if just_rejected { 1.0 } else { 10.0 });
        just_rejected = false;
        err_old = err.max(1e-4);
        let h_next_mag = (h.abs() * scale).min(cfg.max_step);

        // Dense output for the accepted step.
        let mut cont: [Vec<f64>; 5] = std::array::from_fn(|_| vec![0.0; n]);
        for i in 0..n {
            let ydiff = y_new[i] - y[i];
            let bspl = h * k[0][i] - ydiff;
            cont[0][i] = y[i];
            cont[1][i] = ydiff;
            cont[2][i] = bspl;
            cont[3][i] = ydiff - h * k[6][i] - bspl;
            cont[4][i] = h
                * (D1 * k[0][i] + D3 * k[2][i] + D4 * k[3][i] + D5 * k[4][i] + D6 * k[5][i]
                    + D7 * k[6][i]);
        }
        let segment = DenseSegment { t0: t, h, cont };

        // Event scan over the accepted step.
        let t_new = t + h;
        let mut best: Option<(usize, f64)> = None;
        let mut fired: Vec<(usize, f64)> = Vec::new();
        for (idx, ev) in events.iter().enumerate() {
            let g1 = (ev.guard)(&y_new);
            if sign_change(guards[idx], g1, ev.direction) {
                let xi = locate_crossing(&segment, &ev.guard, t, t_new, guards[idx]);
                fired.push((idx, xi));
                if ev.terminal {
                    let earlier = match best {
                        None => true,
                        Some((_, bx)) => (xi - bx) * dir < 0.0,
                    };
                    if earlier {
                        best = Some((idx, xi));
                    }
                }
            }
            guards[idx] = g1;
        }

        if let Some((idx, xi)) = best {
            // Truncate at the terminal crossing; drop later non-terminal hits.
            fired.sort_by(|a, b| (a.1 - b.1).partial_cmp(&0.0).unwrap().then(a.0.cmp(&b.0)));
            for (fidx, fxi) in fired {
                if (fxi - xi) * dir <= 0.0 {
                    traj.events.push(EventRecord { index: fidx, xi: fxi });
                }
            }
            let mut y_event = vec![0.0; n];
            segment.eval_into(xi, &mut y_event);
            traj.dense.push(segment);
            traj.times.push(xi);
            traj.states.push(y_event);
            traj.termination = Termination::Event { index: idx, xi };
            return Ok(traj);
        }
        for (fidx, fxi) in fired {
            traj.events.push(EventRecord { index: fidx, xi: fxi });
        }

        traj.dense.push(segment);
        traj.times.push(t_new);
        traj.states.push(y_new.clone());
        t = t_new;
        std::mem::swap(&mut y, &mut y_new);
        k.swap(0, 6); // FSAL
        h = dir * h_next_mag;
    }
}

/// Bisects the dense interpolant for the guard crossing inside `[t0, t1]`.
fn locate_crossing(
    segment: &DenseSegment,
    guard: &dyn Fn(&[f64]) -> f64,
    t0: f64,
    t1: f64,
    g0: f64,
) -> f64 {
    let mut lo = t0;
    let mut hi = t1;
    let mut glo = g0;
    let mut buf = vec![0.0; segment.cont[0].len()];
    while (hi - lo).abs() > EVENT_XI_TOL {
        let mid = 0.5 * (lo + hi);
        segment.eval_into(mid, &mut buf);
        let gm = guard(&buf);
        // Keep the sub-interval that still contains the sign change.
        if (glo > 0.0) == (gm > 0.0) && gm != 0.0 {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Conservative initial step heuristic from the scaled state and derivative.
fn initial_step(
    rhs: &mut impl FnMut(f64, &[f64], &mut [f64]),
    t: f64,
    y: &[f64],
    f0: &[f64],
    dir: f64,
    span: [f64; 2],
    cfg: &IntegratorConfig,
) -> f64 {
    let n = y.len();
    let mut d0 = 0.0_f64;
    let mut d1 = 0.0_f64;
    for i in 0..n {
        let sc = cfg.abs_tol + cfg.rel_tol * y[i].abs();
        d0 += (y[i] / sc).powi(2);
        d1 += (f0[i] / sc).powi(2);
    }
    d0 = (d0 / n as f64).sqrt();
    d1 = (d1 / n as f64).sqrt();
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let span_len = (span[1] - span[0]).abs();
    h0 = h0.min(span_len).min(cfg.max_step);

    // One explicit Euler probe to estimate the second derivative scale.
    let y1: Vec<f64> = (0..n).map(|i| y[i] + dir * h0 * f0[i]).collect();
    let mut f1 = vec![0.0; n];
    rhs(t + dir * h0, &y1, &mut f1);
    let mut d2 = 0.0_f64;
    for i in 0..n {
        let sc = cfg.abs_tol + cfg.rel_tol * y[i].abs();
        d2 += (((f1[i] - f0[i]) / sc) / h0).powi(2);
    }
    d2 = (d2 / n as f64).sqrt();
    let dmax = d1.max(d2);
    let h1 = if dmax <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / dmax).powf(0.2)
    };
    dir * h0.min(h1).min(span_len).min(cfg.max_step).max(1e-10)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn decay_rhs(_t: f64, y: &[f64], dy: &mut [f64]) {
        dy[0] = -y[0];
    }

    #[test]
    fn exponential_decay_matches_closed_form() {
        let cfg = IntegratorConfig::default();
        let traj = integrate(decay_rhs, &[1.0], [0.0, 1.0], &cfg, &[]).unwrap();
        assert_eq!(traj.termination, Termination::TimeLimit);
        let y_end = traj.last_state()[0];
        assert!((y_end - (-1.0_f64).exp()).abs() < 1e-9, "got {y_end}");
    }

    #[test]
    fn event_location_hits_ln2_to_1e10() {
        // y' = -y from 1: y(xi) = exp(-xi) crosses 1/2 at xi = ln 2.
        let cfg = IntegratorConfig::default();
        let ev = EventSpec::terminal_down(|y: &[f64]| y[0] - 0.5);
        let traj = integrate(decay_rhs, &[1.0], [0.0, 10.0], &cfg, &[ev]).unwrap();
        match traj.termination {
            Termination::Event { index, xi } => {
                assert_eq!(index, 0);
                assert!((xi - std::f64::consts::LN_2).abs() < 1e-10, "xi = {xi}");
            }
            other => panic!("expected event termination, got {other:?}"),
        }
    }

    #[test]
    fn harmonic_oscillator_closes_after_one_period() {
        let rhs = |_t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = -y[0];
        };
        let cfg = IntegratorConfig::default();
        let traj = integrate(rhs, &[1.0, 0.0], [0.0, 2.0 * std::f64::consts::PI], &cfg, &[])
            .unwrap();
        let end = traj.last_state();
        assert!((end[0] - 1.0).abs() < 1e-7 && end[1].abs() < 1e-7, "end = {end:?}");
    }

    #[test]
    fn dense_output_tracks_solution_between_steps() {
        let cfg = IntegratorConfig::default();
        let traj = integrate(decay_rhs, &[1.0], [0.0, 2.0], &cfg, &[]).unwrap();
        for k in 0..=200 {
            let t = 2.0 * k as f64 / 200.0;
            let y = traj.sample(t)[0];
            assert!((y - (-t).exp()).abs() < 1e-9, "t = {t}, y = {y}");
        }
    }

    #[test]
    fn tightening_rel_tol_never_increases_error() {
        // Three problems with closed forms: decay, oscillator, logistic.
        let problems: Vec<(
            Box<dyn Fn(f64, &[f64], &mut [f64])>,
            Vec<f64>,
            f64,
            Box<dyn Fn(f64) -> f64>,
        )> = vec![
            (
                Box::new(|_t: f64, y: &[f64], dy: &mut [f64]| dy[0] = -y[0]),
                vec![1.0],
                2.0,
                Box::new(|t: f64| (-t).exp()),
            ),
            (
                Box::new(|_t: f64, y: &[f64], dy: &mut [f64]| {
                    dy[0] = y[1];
                    dy[1] = -y[0];
                }),
                vec![1.0, 0.0],
                3.0,
                Box::new(|t: f64| t.cos()),
            ),
            (
                Box::new(|_t: f64, y: &[f64], dy: &mut [f64]| dy[0] = y[0] * (1.0 - y[0])),
                vec![0.1],
                4.0,
                Box::new(|t: f64| {
                    let e = t.exp();
                    0.1 * e / (1.0 + 0.1 * (e - 1.0))
                }),
            ),
        ];
        for (rhs, y0, t_end, exact) in &problems {
            let mut errs = Vec::new();
            let mut rel = 1e-4;
            while rel > 1e-11 {
                let cfg = IntegratorConfig {
                    rel_tol: rel,
                    abs_tol: rel * 1e-2,
                    ..Default::default()
                };
                let traj = integrate(|t, y, dy| rhs(t, y, dy), y0, [0.0, *t_end], &cfg, &[])
                    .unwrap();
                errs.push((traj.last_state()[0] - exact(*t_end)).abs());
                rel *= 0.5;
            }
            // Adaptive step quantization makes single halvings wobble by a
            // small factor; the trend over any factor-of-16 window must be
            // decreasing and no halving may lose more than that factor.
            for w in errs.windows(2) {
                assert!(w[1] <= 4.0 * w[0] + 1e-15, "halving lost accuracy: {errs:?}");
            }
            for k in 0..errs.len() - 4 {
                assert!(
                    errs[k + 4] < errs[k] + 1e-15,
                    "no decrease over a tolerance window: {errs:?}"
                );
            }
            assert!(errs[errs.len() - 1] < 1e-3 * errs[0], "{errs:?}");
        }
    }

    #[test]
    fn reruns_are_bit_identical() {
        let run = || {
            let rhs = |_t: f64, y: &[f64], dy: &mut [f64]| {
                dy[0] = y[1];
                dy[1] = -(1.0 + 0.3 * y[0] * y[0]) * y[0];
            };
            integrate(rhs, &[0.7, -0.2], [0.0, 25.0], &IntegratorConfig::default(), &[]).unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a.times.len(), b.times.len());
        for (ta, tb) in a.times.iter().zip(&b.times) {
            assert_eq!(ta.to_bits(), tb.to_bits());
        }
        for (ya, yb) in a.states.iter().zip(&b.states) {
            for (va, vb) in ya.iter().zip(yb) {
                assert_eq!(va.to_bits(), vb.to_bits());
            }
        }
    }

    #[test]
    fn step_limit_is_reported_with_partial_trajectory() {
        let cfg = IntegratorConfig {
            max_steps: 5,
            ..Default::default()
        };
        let err = integrate(decay_rhs, &[1.0], [0.0, 100.0], &cfg, &[]).unwrap_err();
        match &err {
            IntegrateError::StepLimitExceeded { max_steps, trajectory, .. } => {
                assert_eq!(*max_steps, 5);
                assert_eq!(trajectory.times.len(), 6);
                assert!(trajectory.last_state()[0].is_finite());
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn non_finite_state_is_an_error() {
        // y' = y^2 from 1 blows up at t = 1.
        let rhs = |_t: f64, y: &[f64], dy: &mut [f64]| dy[0] = y[0] * y[0];
        let err = integrate(rhs, &[1.0], [0.0, 2.0], &IntegratorConfig::default(), &[])
            .unwrap_err();
        match &err {
            IntegrateError::NonFiniteState { at, trajectory } => {
                assert!(*at <= 1.01, "blowup located at {at}");
                assert!(trajectory.last_state()[0].is_finite());
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn degenerate_span_returns_initial_point() {
        let traj = integrate(decay_rhs, &[1.0], [3.0, 3.0], &IntegratorConfig::default(), &[])
            .unwrap();
        assert_eq!(traj.times, vec![3.0]);
        assert_relative_eq!(traj.sample(3.0)[0], 1.0);
    }

    #[test]
    fn non_terminal_events_are_recorded_and_integration_continues() {
        let rhs = |_t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = -y[0];
        };
        // cos(t) crosses zero twice per period; watch without terminating.
        let ev = EventSpec {
            guard: Box::new(|y: &[f64]| y[0]),
            direction: EventDirection::Any,
            terminal: false,
        };
        let traj = integrate(
            rhs,
            &[1.0, 0.0],
            [0.0, 2.0 * std::f64::consts::PI],
            &IntegratorConfig::default(),
            &[ev],
        )
        .unwrap();
        assert_eq!(traj.termination, Termination::TimeLimit);
        assert_eq!(traj.events.len(), 2);
        assert!((traj.events[0].xi - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
        assert!((traj.events[1].xi - 1.5 * std::f64::consts::PI).abs() < 1e-9);
    }
}
