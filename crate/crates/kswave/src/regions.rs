//! Trap regions for the spatial dynamics, flux certification on their
//! boundary faces, and the lower-surface crossing condition.
//!
//! The three-dimensional region is
//! `{0 <= U <= beta V <= 1, 0 <= W <= cU}`; the four-dimensional region adds
//! `rho (U - beta V) <= Y <= 0` with the slant slope `rho` from the spectra
//! module. Orbits can exit only through `W = 0`: every other face has
//! nonnegative inward flux, which this module certifies by sampling each
//! face on a product grid and minimizing the inward-flux expression, with
//! one Newton polish around the worst grid point.
//!
//! One genuine exception exists and is kept visible rather than patched
//! over: on the `W = cU` face of the four-dimensional region the inward flux
//! is `U (c chi(V) Y + mu (1 - U))`, and taking `Y` on the slant boundary
//! with `beta V = 1` gives `U (1 - U) (mu - c rho chi)`. Since `c rho > 1`,
//! sensitivities in `(mu / (c rho), mu]` produce a negative margin even
//! though they satisfy `chi <= mu`. See the tests for a pinned witness.

use serde::Serialize;
use thiserror::Error;

use crate::model::{spatial_rhs_3d, spatial_rhs_4d, ModelParams, SpatialState3, SpatialState4};
use crate::spectra::{self, SpectraError};

/// Slack tolerance for region membership.
pub const CONTAINS_TOL: f64 = 1e-12;
/// Inward-flux margins above this threshold count as nonnegative.
pub const FLUX_TOL: f64 = -1e-12;
/// Surface-quadratic values at or below this threshold count as nonpositive.
pub const SURFACE_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum RegionError {
    #[error("state has dimension {got}, region requires {want}")]
    DimensionMismatch { want: usize, got: usize },
    #[error("face {0} is not part of this region's boundary")]
    InvalidFace(FaceId),
    #[error("point (U={u}, beta V={bv}) violates 0 <= U <= beta V <= 1")]
    PointOutsideRegion { u: f64, bv: f64 },
    #[error(transparent)]
    Spectra(#[from] SpectraError),
}

/// Phase-space dimension of the trap region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RegionKind {
    /// `(U, V, W)`, the `D = 0` dynamics.
    R3,
    /// `(U, V, Y, W)`, the `D > 0` dynamics.
    S4,
}

/// A trap region instance for fixed parameters and speed.
#[derive(Debug, Clone, Serialize)]
pub struct TrapRegion {
    pub kind: RegionKind,
    pub c: f64,
    pub beta: f64,
    /// Slant slope; present exactly for the four-dimensional region.
    pub rho: Option<f64>,
}

/// Membership verdict with one slack per defining inequality.
///
/// Slack order: `U`, `beta V - U`, `1 - beta V`, `W`, `cU - W`, then for the
/// four-dimensional region `-Y` and `Y - rho (U - beta V)`. A point is
/// inside when every slack is at least `-CONTAINS_TOL`.
#[derive(Debug, Clone, Serialize)]
pub struct Membership {
    pub inside: bool,
    pub slacks: Vec<f64>,
}

impl TrapRegion {
    /// Builds the region matching `p.diff`; requires `c >= 2 sqrt(D beta)`
    /// when `D > 0` so the slant slope exists.
    pub fn new(p: &ModelParams, c: f64) -> Result<Self, RegionError> {
        assert!(c > 0.0, "wave speed must be positive");
        if p.diff == 0.0 {
            Ok(TrapRegion { kind: RegionKind::R3, c, beta: p.beta, rho: None })
        } else {
            let rho = spectra::rho(p, c)?;
            Ok(TrapRegion { kind: RegionKind::S4, c, beta: p.beta, rho: Some(rho) })
        }
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            RegionKind::R3 => 3,
            RegionKind::S4 => 4,
        }
    }

    /// State layout is `[U, V, W]` or `[U, V, Y, W]`.
    pub fn contains(&self, s: &[f64]) -> Result<Membership, RegionError> {
        if s.len() != self.dim() {
            return Err(RegionError::DimensionMismatch { want: self.dim(), got: s.len() });
        }
        let (u, v) = (s[0], s[1]);
        let bv = self.beta * v;
        let w = *s.last().unwrap();
        let mut slacks = vec![u, bv - u, 1.0 - bv, w, self.c * u - w];
        if self.kind == RegionKind::S4 {
            let y = s[2];
            let rho = self.rho.expect("S4 region carries rho");
            slacks.push(-y);
            slacks.push(y - rho * (u - bv));
        }
        let inside = slacks.iter().all(|m| *m >= -CONTAINS_TOL);
        Ok(Membership { inside, slacks })
    }
}

/// Boundary faces of the trap regions. The `Y` faces exist only in the
/// four-dimensional region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FaceId {
    U0,
    Vtop,
    UeqBetaV,
    WeqCU,
    W0,
    Y0,
    Yslant,
}

impl FaceId {
    pub fn name(self) -> &'static str {
        match self {
            FaceId::U0 => "U0",
            FaceId::Vtop => "Vtop",
            FaceId::UeqBetaV => "UeqBetaV",
            FaceId::WeqCU => "WeqCU",
            FaceId::W0 => "W0",
            FaceId::Y0 => "Y0",
            FaceId::Yslant => "Yslant",
        }
    }
}

impl std::fmt::Display for FaceId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

const FACES_3D: [FaceId; 5] =
    [FaceId::U0, FaceId::Vtop, FaceId::UeqBetaV, FaceId::WeqCU, FaceId::W0];
const FACES_4D: [FaceId; 7] = [
    FaceId::U0,
    FaceId::Vtop,
    FaceId::UeqBetaV,
    FaceId::WeqCU,
    FaceId::W0,
    FaceId::Y0,
    FaceId::Yslant,
];

/// Boundary faces applicable to the region kind implied by `p.diff`.
pub fn region_faces(p: &ModelParams) -> &'static [FaceId] {
    if p.diff == 0.0 {
        &FACES_3D
    } else {
        &FACES_4D
    }
}

/// Worst-case inward flux over a sampled face.
#[derive(Debug, Clone, Serialize)]
pub struct FluxReport {
    pub face: FaceId,
    pub samples: usize,
    /// Minimum of the inward-flux expression over the samples; nonnegative
    /// (within `FLUX_TOL`) means no orbit exits through the face.
    pub worst_margin: f64,
    pub worst_point: Vec<f64>,
}

/// Inward flux through a face, evaluated from the actual vector field.
///
/// The expressions are the time derivatives of each face's defining slack:
/// `dU` on `U = 0`, `-dV` on `V = 1/beta`, `beta dV - dU` on `U = beta V`,
/// `c dU - dW` on `W = cU`, `dW` on `W = 0` (the designated exit face,
/// expected nonpositive), `-dY` on `Y = 0`, and
/// `dY - rho (dU - beta dV)` on the slant face. Points off the face are
/// accepted; the expression is simply evaluated there.
pub fn inward_flux(p: &ModelParams, c: f64, face: FaceId, s: &[f64]) -> Result<f64, RegionError> {
    if p.diff == 0.0 {
        if matches!(face, FaceId::Y0 | FaceId::Yslant) {
            return Err(RegionError::InvalidFace(face));
        }
        if s.len() != 3 {
            return Err(RegionError::DimensionMismatch { want: 3, got: s.len() });
        }
        let d = spatial_rhs_3d(SpatialState3 { u: s[0], v: s[1], w: s[2] }, p, c);
        Ok(match face {
            FaceId::U0 => d.u,
            FaceId::Vtop => -d.v,
            FaceId::UeqBetaV => p.beta * d.v - d.u,
            FaceId::WeqCU => c * d.u - d.w,
            FaceId::W0 => d.w,
            _ => unreachable!(),
        })
    } else {
        if s.len() != 4 {
            return Err(RegionError::DimensionMismatch { want: 4, got: s.len() });
        }
        let d = spatial_rhs_4d(SpatialState4 { u: s[0], v: s[1], y: s[2], w: s[3] }, p, c);
        Ok(match face {
            FaceId::U0 => d.u,
            FaceId::Vtop => -d.v,
            FaceId::UeqBetaV => p.beta * d.v - d.u,
            FaceId::WeqCU => c * d.u - d.w,
            FaceId::W0 => d.w,
            FaceId::Y0 => -d.y,
            FaceId::Yslant => {
                let rho = spectra::rho(p, c)?;
                d.y - rho * (d.u - p.beta * d.v)
            }
        })
    }
}

/// Number of free parameters of a face.
fn face_arity(face: FaceId, dim: usize) -> usize {
    match (face, dim) {
        // U = 0 forces W = 0 through W <= cU.
        (FaceId::U0, 3) => 1,
        (FaceId::U0, 4) => 2,
        // U = beta V forces Y = 0 through the slant inequality.
        (FaceId::UeqBetaV, _) => 2,
        (FaceId::Vtop | FaceId::WeqCU | FaceId::W0, 3) => 2,
        (FaceId::Vtop | FaceId::WeqCU | FaceId::W0, 4) => 3,
        (FaceId::Y0 | FaceId::Yslant, 4) => 3,
        _ => unreachable!("face {face} invalid for dimension {dim}"),
    }
}

/// Maps unit-cube coordinates to a state on the face, keeping every
/// defining inequality of the region satisfied. Parameters are normalized
/// as `t = beta V`, `q = U / (beta V)`, `s = W / (cU)`, and `ys` the
/// fraction of the admissible `Y` interval, so degenerate edges (such as
/// `W <= cU` at `U = 0`) collapse cleanly instead of dividing by zero.
fn face_point(p: &ModelParams, c: f64, rho: Option<f64>, face: FaceId, g: &[f64]) -> Vec<f64> {
    let dim = if p.diff == 0.0 { 3 } else { 4 };
    let state3 = |u: f64, t: f64, w: f64| vec![u, t / p.beta, w];
    let state4 = |u: f64, t: f64, y: f64, w: f64| vec![u, t / p.beta, y, w];
    let rho = rho.unwrap_or(0.0);
    match (face, dim) {
        (FaceId::U0, 3) => state3(0.0, g[0], 0.0),
        (FaceId::U0, 4) => state4(0.0, g[0], g[1] * rho * (0.0 - g[0]), 0.0),
        (FaceId::Vtop, 3) => state3(g[0], 1.0, g[1] * c * g[0]),
        (FaceId::Vtop, 4) => state4(g[0], 1.0, g[2] * rho * (g[0] - 1.0), g[1] * c * g[0]),
        (FaceId::UeqBetaV, 3) => state3(g[0], g[0], g[1] * c * g[0]),
        (FaceId::UeqBetaV, 4) => state4(g[0], g[0], 0.0, g[1] * c * g[0]),
        (FaceId::WeqCU, 3) => {
            let u = g[0] * g[1];
            state3(u, g[1], c * u)
        }
        (FaceId::WeqCU, 4) => {
            let u = g[0] * g[1];
            state4(u, g[1], g[2] * rho * (u - g[1]), c * u)
        }
        (FaceId::W0, 3) => state3(g[0] * g[1], g[1], 0.0),
        (FaceId::W0, 4) => {
            let u = g[0] * g[1];
            state4(u, g[1], g[2] * rho * (u - g[1]), 0.0)
        }
        (FaceId::Y0, 4) => {
            let u = g[0] * g[1];
            state4(u, g[1], 0.0, g[2] * c * u)
        }
        (FaceId::Yslant, 4) => {
            let u = g[0] * g[1];
            state4(u, g[1], rho * (u - g[1]), g[2] * c * u)
        }
        _ => unreachable!(),
    }
}

/// Certifies one boundary face by grid sampling.
///
/// Samples the face on a uniform product grid of at least `n_samples`
/// points (the grid side is the ceiling root), takes the minimum inward
/// flux, then applies one damped Newton step in the face parameters around
/// the worst sample and keeps the refined point if it is worse. Every face
/// except `W0` is expected to report `worst_margin >= FLUX_TOL`; `W0` is
/// the designated exit face and reports its (nonpositive) outward trend.
pub fn face_flux_check(
    p: &ModelParams,
    c: f64,
    face: FaceId,
    n_samples: usize,
) -> Result<FluxReport, RegionError> {
    assert!(c > 0.0, "wave speed must be positive");
    assert!(n_samples >= 1, "need at least one sample");
    let region = TrapRegion::new(p, c)?;
    let dim = region.dim();
    if dim == 3 && matches!(face, FaceId::Y0 | FaceId::Yslant) {
        return Err(RegionError::InvalidFace(face));
    }
    let k = face_arity(face, dim);
    let side = (n_samples as f64).powf(1.0 / k as f64).ceil().max(2.0) as usize;
    let total = side.pow(k as u32);

    let eval = |g: &[f64]| -> (Vec<f64>, f64) {
        let s = face_point(p, c, region.rho, face, g);
        let flux = inward_flux(p, c, face, &s).expect("face validated above");
        (s, flux)
    };

    let mut worst = f64::INFINITY;
    let mut worst_params = vec![0.0; k];
    let mut worst_point = Vec::new();
    let mut g = vec![0.0; k];
    for idx in 0..total {
        let mut rem = idx;
        for gi in g.iter_mut() {
            *gi = (rem % side) as f64 / (side - 1) as f64;
            rem /= side;
        }
        let (s, flux) = eval(&g);
        if flux < worst {
            worst = flux;
            worst_params.copy_from_slice(&g);
            worst_point = s;
        }
    }

    if let Some((refined_params, refined)) = newton_polish(&worst_params, &|g| eval(g).1) {
        if refined < worst {
            worst = refined;
            worst_point = eval(&refined_params).0;
        }
    }

    Ok(FluxReport { face, samples: total, worst_margin: worst, worst_point })
}

/// One damped Newton step toward a minimum of `f` over the unit cube, with
/// a coordinate fallback when the Hessian is not usable. Returns the
/// candidate only if it actually improves.
fn newton_polish(g0: &[f64], f: &dyn Fn(&[f64]) -> f64) -> Option<(Vec<f64>, f64)> {
    let k = g0.len();
    let h = 1e-4;
    let base = f(g0);
    let mut grad = vec![0.0; k];
    let mut hess = nalgebra::DMatrix::<f64>::zeros(k, k);
    let probe = |g: &[f64]| f(g);
    let shifted = |i: usize, di: f64, j: usize, dj: f64| {
        let mut g = g0.to_vec();
        g[i] = (g[i] + di).clamp(0.0, 1.0);
        g[j] = (g[j] + dj).clamp(0.0, 1.0);
        probe(&g)
    };
    for i in 0..k {
        grad[i] = (shifted(i, h, i, 0.0) - shifted(i, -h, i, 0.0)) / (2.0 * h);
        hess[(i, i)] = (shifted(i, h, i, 0.0) - 2.0 * base + shifted(i, -h, i, 0.0)) / (h * h);
        for j in 0..i {
            let pp = shifted(i, h, j, h);
            let pm = shifted(i, h, j, -h);
            let mp = shifted(i, -h, j, h);
            let mm = shifted(i, -h, j, -h);
            let v = (pp - pm - mp + mm) / (4.0 * h * h);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    let rhs = nalgebra::DVector::from_column_slice(&grad);
    let step = hess.lu().solve(&rhs).map(|d| -d);
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut consider = |g: Vec<f64>| {
        let val = probe(&g);
        if val < base && best.as_ref().map_or(true, |(_, b)| val < *b) {
            best = Some((g, val));
        }
    };
    if let Some(d) = step {
        if d.iter().all(|x| x.is_finite()) {
            let mut g = g0.to_vec();
            for i in 0..k {
                g[i] = (g[i] + d[i]).clamp(0.0, 1.0);
            }
            consider(g);
        }
    }
    // Gradient fallback catches saddle-shaped Newton steps.
    for scale in [1e-2, 1e-3] {
        let mut g = g0.to_vec();
        for i in 0..k {
            g[i] = (g[i] - scale * grad[i]).clamp(0.0, 1.0);
        }
        consider(g);
    }
    best
}

/// Outcome of evaluating the lower-surface condition `W = eta U` on a grid
/// of the region.
#[derive(Debug, Clone, Serialize)]
pub struct SurfaceCheck {
    /// True when the quadratic stays nonpositive everywhere sampled and the
    /// slope keeps the surface inside the region (`0 < eta < c`).
    pub holds: bool,
    pub worst_value: f64,
    /// `[U, V]` or `[U, V, Y]` attaining the worst value.
    pub worst_point: Vec<f64>,
    pub slope_in_range: bool,
}

/// Verifies that orbits can cross `W = eta U` upward only: the surface
/// quadratic must be nonpositive at every region point. The grid covers
/// `(U, beta V)` at `grid_density` per axis; for `D > 0` the `Y` interval
/// gets a quarter of that density (at least two levels). The intercept
/// condition at the origin is automatic because the surface passes through
/// zero by construction.
pub fn verify_surface(
    p: &ModelParams,
    c: f64,
    eta: f64,
    grid_density: usize,
) -> Result<SurfaceCheck, RegionError> {
    assert!(c > 0.0 && eta > 0.0, "speed and slope must be positive");
    assert!(grid_density >= 2, "need at least two grid levels per axis");
    let slope_in_range = eta > 0.0 && eta < c;
    let n = grid_density;
    let mut worst_value = f64::NEG_INFINITY;
    let mut worst_point = Vec::new();
    if p.diff == 0.0 {
        for i in 0..n {
            let q = i as f64 / (n - 1) as f64;
            for j in 0..n {
                let t = j as f64 / (n - 1) as f64;
                let (u, v) = (q * t, t / p.beta);
                let val = spectra::surface_quadratic(p, c, eta, u, v, None);
                if val > worst_value {
                    worst_value = val;
                    worst_point = vec![u, v];
                }
            }
        }
    } else {
        let rho = spectra::rho(p, c)?;
        let ny = (n / 4).max(2);
        for i in 0..n {
            let q = i as f64 / (n - 1) as f64;
            for j in 0..n {
                let t = j as f64 / (n - 1) as f64;
                let (u, v) = (q * t, t / p.beta);
                for m in 0..ny {
                    let ys = m as f64 / (ny - 1) as f64;
                    let y = ys * rho * (u - t);
                    let val = spectra::surface_quadratic(p, c, eta, u, v, Some(y));
                    if val > worst_value {
                        worst_value = val;
                        worst_point = vec![u, v, y];
                    }
                }
            }
        }
    }
    Ok(SurfaceCheck {
        holds: slope_in_range && worst_value <= SURFACE_TOL,
        worst_value,
        worst_point,
        slope_in_range,
    })
}

/// Discriminant of the surface quadratic at a point of the planar region:
/// `[(U - beta V) chi(V) / c - c]^2 - 4 mu (1 - U)`. Nonnegative at every
/// region point exactly when `c >= 2 sqrt(mu)`, which is how the minimum
/// speed emerges from the surface construction.
pub fn discriminant_margin(
    p: &ModelParams,
    c: f64,
    u: f64,
    v: f64,
) -> Result<f64, RegionError> {
    let bv = p.beta * v;
    if !(0.0 <= u && u <= bv + CONTAINS_TOL && bv <= 1.0 + CONTAINS_TOL) {
        return Err(RegionError::PointOutsideRegion { u, bv });
    }
    let b = spectra::surface_linear_coefficient(p, c, u, v, None);
    Ok(b * b - 4.0 * p.mu * (1.0 - u))
}
