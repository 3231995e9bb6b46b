//! Closed-form wave speeds, equilibrium spectra, and the lower-surface
//! quadratic.
//!
//! The origin Jacobian of the spatial system is block-triangular, so its
//! eigenvalues are the roots of `lambda^2 + c lambda + mu = 0` together with
//! `-beta/c` when `D = 0`, or the roots of that quadratic and of
//! `D lambda^2 + c lambda + beta = 0` when `D > 0`. All roots are real
//! exactly when `c >= c* = 2 max{sqrt(mu), sqrt(D beta)}`, which is the
//! minimum wave speed. The implementation computes spectra numerically from
//! the assembled Jacobians; the closed forms are exposed separately and act
//! as oracles in the tests.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::model::ModelParams;

/// Absolute imaginary-part tolerance below which an eigenvalue counts as real.
pub const REALNESS_TOL: f64 = 1e-10;
/// Relative tolerance for declaring the two speed scales tied.
pub const TIE_TOL: f64 = 1e-12;
/// Sample count for the sensitivity maximum in the literature bound.
const BOUND_SAMPLES: usize = 1000;

#[derive(Debug, Error, PartialEq)]
pub enum SpectraError {
    #[error("slant slope requires D > 0")]
    ZeroDiffusion,
    #[error("slant slope undefined: c^2 - 4 D beta = {disc} < 0 (c below the chemical speed scale)")]
    NegativeDiscriminant { disc: f64 },
    #[error("no eigenvalue with positive real part at the invading state")]
    NoUnstableEigenvalue,
    #[error("expected one unstable eigenvalue at the invading state, found {count}")]
    MultipleUnstableEigenvalues { count: usize },
    #[error("neither orientation of the unstable direction steps into the region interior")]
    InteriorStepFailed,
    #[error("point (U={u}, beta V={bv}) violates 0 <= U <= beta V <= 1")]
    PointOutsideRegion { u: f64, bv: f64 },
    #[error("Y = {y} outside [rho (U - beta V), 0] = [{lo}, 0]")]
    YOutsideRegion { y: f64, lo: f64 },
}

/// Which speed scale sets the minimum wave speed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Binding {
    /// `sqrt(mu)` dominates (always the case for `D = 0`).
    Logistic,
    /// `sqrt(D beta)` dominates.
    Chemical,
    /// The two scales agree to within the tie tolerance.
    Tie,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MinSpeedResult {
    pub c_star: f64,
    pub binding: Binding,
}

/// Closed-form minimum wave speed `2 max{sqrt(mu), sqrt(D beta)}`.
pub fn min_wave_speed(p: &ModelParams) -> MinSpeedResult {
    let logistic = p.mu.sqrt();
    if p.diff == 0.0 {
        return MinSpeedResult { c_star: 2.0 * logistic, binding: Binding::Logistic };
    }
    let chemical = (p.diff * p.beta).sqrt();
    let rel = (logistic - chemical).abs() / logistic.max(chemical);
    let binding = if rel < TIE_TOL {
        Binding::Tie
    } else if logistic > chemical {
        Binding::Logistic
    } else {
        Binding::Chemical
    };
    MinSpeedResult { c_star: 2.0 * logistic.max(chemical), binding }
}

/// Earlier general bounds on the minimum speed for `D = 0`:
/// `2 sqrt(mu) <= c* <= max_v max{2 sqrt(mu), sqrt(beta chi(v) / mu)}`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LiteratureBounds {
    pub lower: f64,
    pub upper: f64,
}

/// Evaluates the pre-existing speed bounds; meaningful for `D = 0` only,
/// which callers must ensure.
pub fn literature_bounds(p: &ModelParams) -> LiteratureBounds {
    assert!(p.diff == 0.0, "literature bounds apply to the D = 0 model");
    let lower = 2.0 * p.mu.sqrt();
    let v_max = p.v_max();
    let mut upper = lower;
    for k in 0..BOUND_SAMPLES {
        let v = v_max * k as f64 / (BOUND_SAMPLES - 1) as f64;
        let chi = p.chi.eval(v, v_max);
        upper = upper.max((p.beta * chi / p.mu).sqrt());
    }
    LiteratureBounds { lower, upper }
}

/// Jacobian of the spatial system at the origin.
pub fn origin_jacobian(p: &ModelParams, c: f64) -> DMatrix<f64> {
    if p.diff == 0.0 {
        DMatrix::from_row_slice(
            3,
            3,
            &[
                -c, 0.0, 1.0, //
                1.0 / c, -p.beta / c, 0.0, //
                -p.mu, 0.0, 0.0,
            ],
        )
    } else {
        let d = p.diff;
        DMatrix::from_row_slice(
            4,
            4,
            &[
                -c, 0.0, 0.0, 1.0, //
                0.0, 0.0, 1.0, 0.0, //
                1.0 / d, -p.beta / d, -c / d, 0.0, //
                -p.mu, 0.0, 0.0, 0.0,
            ],
        )
    }
}

/// Jacobian of the spatial system at the invading state `(1, 1/beta, [0,] c)`.
///
/// The sensitivity enters only through its value at `v = 1/beta`; its
/// derivative multiplies factors that vanish at this equilibrium.
pub fn invading_jacobian(p: &ModelParams, c: f64) -> DMatrix<f64> {
    let chi_bar = p.chi.eval(p.v_max(), p.v_max());
    if p.diff == 0.0 {
        DMatrix::from_row_slice(
            3,
            3,
            &[
                -c + chi_bar / c, -p.beta * chi_bar / c, 1.0, //
                1.0 / c, -p.beta / c, 0.0, //
                p.mu, 0.0, 0.0,
            ],
        )
    } else {
        let d = p.diff;
        DMatrix::from_row_slice(
            4,
            4,
            &[
                -c, 0.0, chi_bar, 1.0, //
                0.0, 0.0, 1.0, 0.0, //
                1.0 / d, -p.beta / d, -c / d, 0.0, //
                p.mu, 0.0, 0.0, 0.0,
            ],
        )
    }
}

/// Whether a spectrum is entirely real and negative, the signature of
/// monotone (non-oscillatory) approach to the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SpectrumClass {
    AllRealNegative,
    ComplexPresent,
}

#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub dim: usize,
    /// Sorted by real part, then imaginary part.
    pub eigenvalues: Vec<Complex64>,
    pub classification: SpectrumClass,
}

impl SpectrumReport {
    /// Eigenvalues as `[re, im]` pairs, the serialization schema.
    pub fn eigenvalue_pairs(&self) -> Vec<[f64; 2]> {
        self.eigenvalues.iter().map(|z| [z.re, z.im]).collect()
    }
}

fn sorted_eigenvalues(m: &DMatrix<f64>) -> Vec<Complex64> {
    let eig: DVector<Complex64> = m.complex_eigenvalues();
    let mut vals: Vec<Complex64> = eig.iter().copied().collect();
    vals.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    vals
}

/// Numerical origin spectrum with realness classification.
pub fn origin_spectrum(p: &ModelParams, c: f64) -> SpectrumReport {
    assert!(c > 0.0, "wave speed must be positive");
    let m = origin_jacobian(p, c);
    let eigenvalues = sorted_eigenvalues(&m);
    let all_real_negative = eigenvalues
        .iter()
        .all(|z| z.im.abs() <= REALNESS_TOL && z.re < 0.0);
    SpectrumReport {
        dim: m.nrows(),
        eigenvalues,
        classification: if all_real_negative {
            SpectrumClass::AllRealNegative
        } else {
            SpectrumClass::ComplexPresent
        },
    }
}

/// Closed-form origin eigenvalues, sorted the same way as the numerical
/// spectrum. These are the oracle the numerical path is tested against.
pub fn closed_form_origin_eigenvalues(p: &ModelParams, c: f64) -> Vec<Complex64> {
    let mut vals = quadratic_roots(1.0, c, p.mu);
    if p.diff == 0.0 {
        vals.push(Complex64::new(-p.beta / c, 0.0));
    } else {
        vals.extend(quadratic_roots(p.diff, c, p.beta));
    }
    vals.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    vals
}

/// Roots of `a x^2 + b x + c = 0` for `a != 0`.
fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<Complex64> {
    let disc = b * b - 4.0 * a * c;
    if disc >= 0.0 {
        let q = -0.5 * (b + b.signum() * disc.sqrt());
        // Citardauq form avoids cancellation for the small-magnitude root.
        vec![Complex64::new(q / a, 0.0), Complex64::new(c / q, 0.0)]
    } else {
        let re = -b / (2.0 * a);
        let im = (-disc).sqrt() / (2.0 * a);
        vec![Complex64::new(re, -im), Complex64::new(re, im)]
    }
}

/// Unstable eigenpair of the invading state, oriented to step into the trap
/// region.
#[derive(Debug, Clone)]
pub struct UnstableDirection {
    pub lambda: f64,
    /// Unit vector; `invading + eps * direction` lies strictly inside the
    /// trap region for small `eps > 0`.
    pub direction: Vec<f64>,
    /// Set when `c` is below the closed-form minimum speed; the direction is
    /// still computed but downstream orbits are expected to oscillate.
    pub below_min_speed: bool,
}

/// Offset used when checking that the oriented step lands in the interior.
const ORIENTATION_EPS: f64 = 1e-6;

/// Computes the one-dimensional unstable direction at `(1, 1/beta, [0,] c)`.
pub fn unstable_direction(p: &ModelParams, c: f64) -> Result<UnstableDirection, SpectraError> {
    let m = invading_jacobian(p, c);
    let eig = sorted_eigenvalues(&m);
    let unstable: Vec<Complex64> = eig.iter().copied().filter(|z| z.re > 1e-9).collect();
    if unstable.is_empty() {
        return Err(SpectraError::NoUnstableEigenvalue);
    }
    if unstable.len() != 1 || unstable[0].im.abs() > REALNESS_TOL {
        return Err(SpectraError::MultipleUnstableEigenvalues { count: unstable.len() });
    }
    let lambda = unstable[0].re;

    // Null space of (J - lambda I) from the smallest singular value.
    let n = m.nrows();
    let shifted = &m - DMatrix::<f64>::identity(n, n) * lambda;
    let svd = shifted.svd(true, true);
    let v_t = svd.v_t.as_ref().expect("SVD with v_t requested");
    let mut dir: Vec<f64> = v_t.row(n - 1).iter().copied().collect();
    let norm: f64 = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in &mut dir {
        *x /= norm;
    }

    let below_min_speed = c < min_wave_speed(p).c_star * (1.0 - 1e-12);
    let rho_opt = if p.diff > 0.0 { rho(p, c).ok() } else { None };
    let inside = |d: &[f64]| -> bool {
        let u = 1.0 + ORIENTATION_EPS * d[0];
        let bv = p.beta * (1.0 / p.beta + ORIENTATION_EPS * d[1]);
        let (y, w) = if p.diff == 0.0 {
            (None, c + ORIENTATION_EPS * d[2])
        } else {
            (Some(ORIENTATION_EPS * d[2]), c + ORIENTATION_EPS * d[3])
        };
        let mut ok = u > 0.0 && bv > u && bv < 1.0 && w > 0.0 && w < c * u;
        if let Some(y) = y {
            ok = ok && y < 0.0;
            if let Some(r) = rho_opt {
                ok = ok && y > r * (u - bv);
            }
        }
        ok
    };
    if inside(&dir) {
        // keep orientation
    } else {
        for x in &mut dir {
            *x = -*x;
        }
        if !inside(&dir) {
            return Err(SpectraError::InteriorStepFailed);
        }
    }
    Ok(UnstableDirection { lambda, direction: dir, below_min_speed })
}

/// Slope of the slanted face of the `D > 0` trap region:
/// `rho = (c - sqrt(c^2 - 4 D beta)) / (2 D beta)`, the smaller root of
/// `D beta rho^2 - c rho + 1 = 0`. Satisfies `rho <= 2/c`.
pub fn rho(p: &ModelParams, c: f64) -> Result<f64, SpectraError> {
    if p.diff == 0.0 {
        return Err(SpectraError::ZeroDiffusion);
    }
    let mut disc = c * c - 4.0 * p.diff * p.beta;
    // Speeds computed as exactly 2 sqrt(D beta) can land a few ulps below
    // the parabola; treat those as the critical case rather than erroring.
    if disc < 0.0 && disc >= -1e-12 * c * c {
        disc = 0.0;
    }
    if disc < 0.0 {
        return Err(SpectraError::NegativeDiscriminant { disc });
    }
    // Equivalent to (c - sqrt(disc)) / (2 D beta) without cancellation.
    let r = 2.0 / (c + disc.sqrt());
    debug_assert!(r <= 2.0 / c + 1e-15);
    Ok(r)
}

/// Feasibility of the lower-surface slope `eta` at one region point.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EtaFeasibility {
    /// Closed interval of slopes satisfying the surface inequality, when the
    /// discriminant is nonnegative.
    pub interval: Option<(f64, f64)>,
    /// Midpoint of the roots, `c/2 - chi(V) (U - beta V) / (2c)` for `D = 0`.
    pub eta_crit: f64,
}

/// Linear coefficient of the surface quadratic at a point: the inequality is
/// `eta^2 + b eta + mu (1 - U) <= 0` with
/// `b = (U - beta V) chi(V) / c - c` for `D = 0` and `b = chi(V) Y - c`
/// for `D > 0`.
pub(crate) fn surface_linear_coefficient(
    p: &ModelParams,
    c: f64,
    u: f64,
    v: f64,
    y: Option<f64>,
) -> f64 {
    let chi = p.chi.eval(v, p.v_max());
    match y {
        None => (u - p.beta * v) * chi / c - c,
        Some(y) => chi * y - c,
    }
}

/// Value of the surface quadratic `eta^2 + b eta + mu (1 - U)` at a point.
/// Nonpositive values certify that trajectories cannot cross `W = eta U`
/// downward there.
pub fn surface_quadratic(p: &ModelParams, c: f64, eta: f64, u: f64, v: f64, y: Option<f64>) -> f64 {
    let b = surface_linear_coefficient(p, c, u, v, y);
    eta * eta + b * eta + p.mu * (1.0 - u)
}

/// Solves the surface inequality for `eta` at a point of the trap region.
pub fn eta_feasible_interval(
    p: &ModelParams,
    c: f64,
    u: f64,
    v: f64,
    y: Option<f64>,
) -> Result<EtaFeasibility, SpectraError> {
    let bv = p.beta * v;
    if !(0.0 <= u && u <= bv + 1e-12 && bv <= 1.0 + 1e-12) {
        return Err(SpectraError::PointOutsideRegion { u, bv });
    }
    if let Some(y) = y {
        let r = rho(p, c)?;
        let lo = r * (u - bv);
        if !(lo - 1e-12 <= y && y <= 1e-12) {
            return Err(SpectraError::YOutsideRegion { y, lo });
        }
    }
    let b = surface_linear_coefficient(p, c, u, v, y);
    let disc = b * b - 4.0 * p.mu * (1.0 - u);
    let eta_crit = -b / 2.0;
    let interval = if disc < 0.0 {
        None
    } else {
        let half = disc.sqrt() / 2.0;
        Some((eta_crit - half, eta_crit + half))
    };
    Ok(EtaFeasibility { interval, eta_crit })
}

/// Default lower-surface slope `c/2`; satisfies the surface inequality on
/// the whole region whenever `c` is at or above the minimum speed.
pub fn default_eta(c: f64) -> f64 {
    c / 2.0
}

/// Previously reported slope `5c/8`, retained as a recorded reference: at
/// the origin corner with `c = 2 sqrt(mu)` the surface quadratic evaluates
/// to `9c^2/64 - 5c^2/16 + c^2/4 = 0.0625 c^2 / ...` > 0, i.e. the
/// inequality fails there, so it is not used as a default anywhere.
pub fn five_eighths_eta(c: f64) -> f64 {
    0.625 * c
}
