//! Model parameters, sensitivity functions, and the spatial ODE systems
//! obtained from the traveling-wave ansatz.
//!
//! In the frame `xi = x - ct` with `D = 0`, the substitution
//! `W = cU + U' - U chi(V) V'` turns the wave equations into the
//! three-dimensional first-order system
//!
//! ```text
//! U' = -cU + U chi(V) (U - beta V) / c + W
//! V' = (U - beta V) / c
//! W' = mu U (U - 1)
//! ```
//!
//! and for `D > 0`, with `Y = V'`, into the four-dimensional system
//!
//! ```text
//! U' = -cU + U chi(V) Y + W
//! V' = Y
//! Y' = -cY/D + (U - beta V)/D
//! W' = mu U (U - 1)
//! ```
//!
//! Both systems connect the invading equilibrium (`U = 1`, `V = 1/beta`,
//! `Y = 0`, `W = c`) to the origin. Admissibility of the sensitivity means
//! `0 <= chi(v) <= mu` for all `v` in `[0, 1/beta]`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Sample count used when validating sensitivity bounds on `[0, 1/beta]`.
const CHI_VALIDATION_SAMPLES: usize = 1000;

/// Chemotactic sensitivity `chi(v)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ChiFunction {
    /// `chi(v) = kappa`.
    Constant { kappa: f64 },
    /// `chi(v) = a + b v`.
    Affine { a: f64, b: f64 },
    /// Piecewise-linear interpolation through `(v, value)` nodes.
    Tabulated { nodes: Vec<(f64, f64)> },
}

impl ChiFunction {
    pub const ZERO: ChiFunction = ChiFunction::Constant { kappa: 0.0 };

    pub fn constant(kappa: f64) -> Self {
        ChiFunction::Constant { kappa }
    }

    /// Evaluates at `v` clamped to `[0, v_max]`; the flag reports whether
    /// clamping occurred. Tabulated evaluation additionally clamps to the
    /// node span, which covers `[0, v_max]` for validated parameters.
    pub fn eval_flagged(&self, v: f64, v_max: f64) -> (f64, bool) {
        let clamped = !(0.0..=v_max).contains(&v);
        let vc = v.clamp(0.0, v_max);
        let value = match self {
            ChiFunction::Constant { kappa } => *kappa,
            ChiFunction::Affine { a, b } => a + b * vc,
            ChiFunction::Tabulated { nodes } => interp_nodes(nodes, vc),
        };
        (value, clamped)
    }

    pub fn eval(&self, v: f64, v_max: f64) -> f64 {
        self.eval_flagged(v, v_max).0
    }

    /// Candidate extremum locations on `[0, v_max]`, used by validation and
    /// the literature bound alongside dense sampling.
    fn extremum_candidates(&self, v_max: f64) -> Vec<f64> {
        match self {
            ChiFunction::Constant { .. } | ChiFunction::Affine { .. } => vec![0.0, v_max],
            ChiFunction::Tabulated { nodes } => {
                let mut vs: Vec<f64> = nodes
                    .iter()
                    .map(|(v, _)| v.clamp(0.0, v_max))
                    .collect();
                vs.push(0.0);
                vs.push(v_max);
                vs
            }
        }
    }
}

fn interp_nodes(nodes: &[(f64, f64)], v: f64) -> f64 {
    debug_assert!(!nodes.is_empty(), "tabulated sensitivity has no nodes");
    if v <= nodes[0].0 {
        return nodes[0].1;
    }
    if v >= nodes[nodes.len() - 1].0 {
        return nodes[nodes.len() - 1].1;
    }
    // The nodes are strictly increasing for validated parameters.
    let idx = nodes.partition_point(|(nv, _)| *nv <= v);
    let (v0, f0) = nodes[idx - 1];
    let (v1, f1) = nodes[idx];
    let th = (v - v0) / (v1 - v0);
    f0 + th * (f1 - f0)
}

/// Parameters of the chemotaxis model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Logistic growth rate, positive.
    pub mu: f64,
    /// Chemical production rate, positive.
    pub beta: f64,
    /// Chemical diffusivity, nonnegative.
    #[serde(rename = "D")]
    pub diff: f64,
    pub chi: ChiFunction,
}

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("rate parameter {name} must be positive, got {value}")]
    NonPositiveRate { name: &'static str, value: f64 },
    #[error("chemical diffusivity must be nonnegative, got {value}")]
    NegativeDiffusion { value: f64 },
    #[error("sensitivity out of [0, mu] on the relevant range: chi({v}) = {value}")]
    ChiOutOfRange { v: f64, value: f64 },
    #[error("tabulated sensitivity invalid: {reason}")]
    InvalidTable { reason: String },
}

impl ModelParams {
    pub fn new(mu: f64, beta: f64, diff: f64, chi: ChiFunction) -> Result<Self, ModelError> {
        let p = Self { mu, beta, diff, chi };
        p.validate()?;
        Ok(p)
    }

    /// `mu`, `beta`, `D` with the sensitivity identically zero.
    pub fn without_chemotaxis(mu: f64, beta: f64, diff: f64) -> Result<Self, ModelError> {
        Self::new(mu, beta, diff, ChiFunction::ZERO)
    }

    /// Upper end of the chemical range relevant for admissibility.
    pub fn v_max(&self) -> f64 {
        1.0 / self.beta
    }

    /// Checks positivity of the rates, sign of the diffusivity, and the
    /// sensitivity bounds `0 <= chi <= mu` on `[0, 1/beta]`. The bounds are
    /// probed at 1000 uniform sample points plus the analytic extremum
    /// candidates of each sensitivity family.
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.mu > 0.0) {
            return Err(ModelError::NonPositiveRate { name: "mu", value: self.mu });
        }
        if !(self.beta > 0.0) {
            return Err(ModelError::NonPositiveRate { name: "beta", value: self.beta });
        }
        if !(self.diff >= 0.0) {
            return Err(ModelError::NegativeDiffusion { value: self.diff });
        }
        if let ChiFunction::Tabulated { nodes } = &self.chi {
            if nodes.len() < 2 {
                return Err(ModelError::InvalidTable {
                    reason: format!("need at least 2 nodes, got {}", nodes.len()),
                });
            }
            if nodes.windows(2).any(|w| w[1].0 <= w[0].0) {
                return Err(ModelError::InvalidTable {
                    reason: "node abscissae must be strictly increasing".into(),
                });
            }
            let v_max = self.v_max();
            if nodes[0].0 > 0.0 || nodes[nodes.len() - 1].0 < v_max {
                return Err(ModelError::InvalidTable {
                    reason: format!(
                        "nodes span [{}, {}] but must cover [0, {v_max}]",
                        nodes[0].0,
                        nodes[nodes.len() - 1].0
                    ),
                });
            }
        }
        let v_max = self.v_max();
        let mut probes = self.chi.extremum_candidates(v_max);
        for k in 0..CHI_VALIDATION_SAMPLES {
            probes.push(v_max * k as f64 / (CHI_VALIDATION_SAMPLES - 1) as f64);
        }
        for v in probes {
            let (value, _) = self.chi.eval_flagged(v, v_max);
            if !(0.0..=self.mu).contains(&value) {
                return Err(ModelError::ChiOutOfRange { v, value });
            }
        }
        Ok(())
    }

    /// Clamped sensitivity evaluation; the flag reports out-of-range `v`.
    pub fn chi_eval(&self, v: f64) -> (f64, bool) {
        self.chi.eval_flagged(v, self.v_max())
    }

    /// State dimension of the spatial system (3 for `D = 0`, 4 otherwise).
    pub fn spatial_dim(&self) -> usize {
        if self.diff == 0.0 {
            3
        } else {
            4
        }
    }
}

/// State of the three-dimensional spatial system (`D = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialState3 {
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

/// State of the four-dimensional spatial system (`D > 0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialState4 {
    pub u: f64,
    pub v: f64,
    pub y: f64,
    pub w: f64,
}

/// The two equilibria connected by the wave, for a given speed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Equilibria {
    /// `(0, 0, [0,] 0)`: the state ahead of the front.
    pub origin: [f64; 4],
    /// `(1, 1/beta, [0,] c)`: the invaded steady state, stored with the
    /// `Y` slot zero; use the first three or all four entries depending on
    /// the dimension.
    pub invading: [f64; 4],
}

/// Equilibrium states of the spatial system at speed `c`.
pub fn equilibria(p: &ModelParams, c: f64) -> Equilibria {
    Equilibria {
        origin: [0.0; 4],
        invading: [1.0, 1.0 / p.beta, 0.0, c],
    }
}

/// Invading equilibrium as a state vector of the correct dimension.
pub fn invading_state(p: &ModelParams, c: f64) -> Vec<f64> {
    if p.diff == 0.0 {
        vec![1.0, 1.0 / p.beta, c]
    } else {
        vec![1.0, 1.0 / p.beta, 0.0, c]
    }
}

/// Right-hand side of the three-dimensional spatial system.
pub fn spatial_rhs_3d(s: SpatialState3, p: &ModelParams, c: f64) -> SpatialState3 {
    debug_assert!(c > 0.0, "wave speed must be positive");
    let chi = p.chi.eval(s.v, p.v_max());
    let excess = s.u - p.beta * s.v;
    SpatialState3 {
        u: -c * s.u + s.u * chi * excess / c + s.w,
        v: excess / c,
        w: p.mu * s.u * (s.u - 1.0),
    }
}

/// Right-hand side of the four-dimensional spatial system.
pub fn spatial_rhs_4d(s: SpatialState4, p: &ModelParams, c: f64) -> SpatialState4 {
    debug_assert!(c > 0.0, "wave speed must be positive");
    debug_assert!(p.diff > 0.0, "four-dimensional system requires D > 0");
    let chi = p.chi.eval(s.v, p.v_max());
    SpatialState4 {
        u: -c * s.u + s.u * chi * s.y + s.w,
        v: s.y,
        y: (-c * s.y + s.u - p.beta * s.v) / p.diff,
        w: p.mu * s.u * (s.u - 1.0),
    }
}

/// Slice-based right-hand side of the spatial system matching `p`'s
/// dimension, for use with the integrator.
pub fn spatial_rhs(p: &ModelParams, c: f64) -> impl Fn(f64, &[f64], &mut [f64]) + '_ {
    let three = p.diff == 0.0;
    move |_xi, y, dy| {
        if three {
            let s = spatial_rhs_3d(SpatialState3 { u: y[0], v: y[1], w: y[2] }, p, c);
            dy[0] = s.u;
            dy[1] = s.v;
            dy[2] = s.w;
        } else {
            let s = spatial_rhs_4d(
                SpatialState4 { u: y[0], v: y[1], y: y[2], w: y[3] },
                p,
                c,
            );
            dy[0] = s.u;
            dy[1] = s.v;
            dy[2] = s.y;
            dy[3] = s.w;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(mu: f64, beta: f64, diff: f64, chi: ChiFunction) -> ModelParams {
        ModelParams::new(mu, beta, diff, chi).unwrap()
    }

    #[test]
    fn validation_accepts_admissible_affine() {
        // chi(v) = 0.2 + 0.3 v stays within [0, 1] on [0, 1/2].
        assert!(ModelParams::new(
            1.0,
            2.0,
            0.0,
            ChiFunction::Affine { a: 0.2, b: 0.3 }
        )
        .is_ok());
    }

    #[test]
    fn validation_rejects_nonpositive_rates_and_negative_diffusion() {
        let err = ModelParams::new(0.0, 1.0, 0.0, ChiFunction::ZERO).unwrap_err();
        assert!(matches!(err, ModelError::NonPositiveRate { name: "mu", .. }));
        let err = ModelParams::new(1.0, -2.0, 0.0, ChiFunction::ZERO).unwrap_err();
        assert!(matches!(err, ModelError::NonPositiveRate { name: "beta", .. }));
        let err = ModelParams::new(1.0, 1.0, -0.5, ChiFunction::ZERO).unwrap_err();
        assert_eq!(err, ModelError::NegativeDiffusion { value: -0.5 });
    }

    #[test]
    fn validation_rejects_chi_exceeding_mu() {
        // chi(v) = 0.5 + 2 v hits 1.5 > mu = 1 at v = 1/2.
        let err = ModelParams::new(
            1.0,
            2.0,
            0.0,
            ChiFunction::Affine { a: 0.5, b: 2.0 },
        )
        .unwrap_err();
        match err {
            ModelError::ChiOutOfRange { value, .. } => assert!(value > 1.0),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn validation_rejects_negative_chi() {
        let err = ModelParams::new(
            1.0,
            1.0,
            0.0,
            ChiFunction::Affine { a: 0.1, b: -0.5 },
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::ChiOutOfRange { .. }));
    }

    #[test]
    fn validation_checks_table_structure() {
        let err = ModelParams::new(
            1.0,
            1.0,
            0.0,
            ChiFunction::Tabulated { nodes: vec![(0.0, 0.1), (0.5, 0.2)] },
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::InvalidTable { .. }), "{err}");
        let err = ModelParams::new(
            1.0,
            1.0,
            0.0,
            ChiFunction::Tabulated { nodes: vec![(0.0, 0.1), (0.5, 0.2), (0.4, 0.1), (1.0, 0.0)] },
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::InvalidTable { .. }), "{err}");
    }

    #[test]
    fn chi_eval_clamps_and_flags() {
        let p = params(1.0, 2.0, 0.0, ChiFunction::Affine { a: 0.2, b: 0.3 });
        // In range: exact affine value, no flag.
        let (val, flag) = p.chi_eval(0.25);
        assert_eq!(val, 0.2 + 0.3 * 0.25);
        assert!(!flag);
        // Below range: clamped to v = 0.
        let (val, flag) = p.chi_eval(-0.1);
        assert_eq!(val, 0.2);
        assert!(flag);
        // Above range: clamped to v = 1/beta.
        let (val, flag) = p.chi_eval(3.0);
        assert_eq!(val, 0.2 + 0.3 * 0.5);
        assert!(flag);
    }

    #[test]
    fn tabulated_interpolates_linearly() {
        let p = params(
            1.0,
            1.0,
            0.0,
            ChiFunction::Tabulated { nodes: vec![(0.0, 0.0), (0.5, 0.4), (1.0, 0.2)] },
        );
        assert!((p.chi_eval(0.25).0 - 0.2).abs() < 1e-15);
        assert!((p.chi_eval(0.75).0 - 0.3).abs() < 1e-15);
        assert_eq!(p.chi_eval(0.5).0, 0.4);
    }

    #[test]
    fn tabulated_sampling_of_affine_matches_affine() {
        let mu = 2.0;
        let beta = 1.0;
        let affine = ChiFunction::Affine { a: 0.3, b: 0.7 };
        let nodes: Vec<(f64, f64)> = (0..=64)
            .map(|k| {
                let v = k as f64 / 64.0;
                (v, affine.eval(v, 1.0))
            })
            .collect();
        let pa = params(mu, beta, 0.0, affine);
        let pt = params(mu, beta, 0.0, ChiFunction::Tabulated { nodes });
        for k in 0..=640 {
            let v = k as f64 / 640.0;
            // Piecewise-linear interpolation of an affine function is exact
            // up to roundoff.
            assert!((pa.chi_eval(v).0 - pt.chi_eval(v).0).abs() < 1e-14);
        }
    }

    #[test]
    fn rhs_3d_vanishes_at_both_equilibria() {
        let p = params(1.5, 2.0, 0.0, ChiFunction::Affine { a: 0.2, b: 0.5 });
        let c = 3.0;
        let zero = spatial_rhs_3d(SpatialState3 { u: 0.0, v: 0.0, w: 0.0 }, &p, c);
        assert_eq!((zero.u, zero.v, zero.w), (0.0, 0.0, 0.0));
        let inv = spatial_rhs_3d(
            SpatialState3 { u: 1.0, v: 1.0 / p.beta, w: c },
            &p,
            c,
        );
        assert!(inv.u.abs() < 1e-14 && inv.v.abs() < 1e-14 && inv.w.abs() < 1e-14);
    }

    #[test]
    fn rhs_3d_matches_hand_value() {
        // mu = 1, beta = 1, chi = 0, c = 2 at (0.5, 0.5, 1):
        // U' = -1 + 0 + 1 = 0, V' = 0, W' = 0.5 * (-0.5) = -0.25.
        let p = params(1.0, 1.0, 0.0, ChiFunction::ZERO);
        let d = spatial_rhs_3d(SpatialState3 { u: 0.5, v: 0.5, w: 1.0 }, &p, 2.0);
        assert_eq!((d.u, d.v, d.w), (0.0, 0.0, -0.25));
    }

    #[test]
    fn rhs_3d_chemotaxis_term_has_stated_sign() {
        // With chi = 1, c = 2 at (0.5, 0.2, 1): excess = 0.3, so the
        // sensitivity adds 0.5 * 0.3 / 2 = 0.075 to U'.
        let p = params(1.0, 1.0, 0.0, ChiFunction::constant(1.0));
        let d = spatial_rhs_3d(SpatialState3 { u: 0.5, v: 0.2, w: 1.0 }, &p, 2.0);
        assert!((d.u - 0.075).abs() < 1e-15, "U' = {}", d.u);
        assert!((d.v - 0.15).abs() < 1e-15);
        assert_eq!(d.w, -0.25);
    }

    #[test]
    fn rhs_4d_vanishes_at_both_equilibria() {
        let p = params(1.0, 4.0, 1.0, ChiFunction::constant(0.7));
        let c = 4.0;
        let zero = spatial_rhs_4d(
            SpatialState4 { u: 0.0, v: 0.0, y: 0.0, w: 0.0 },
            &p,
            c,
        );
        assert_eq!((zero.u, zero.v, zero.y, zero.w), (0.0, 0.0, 0.0, 0.0));
        let inv = spatial_rhs_4d(
            SpatialState4 { u: 1.0, v: 1.0 / p.beta, y: 0.0, w: c },
            &p,
            c,
        );
        assert!(inv.u.abs() < 1e-14);
        assert!(inv.v.abs() < 1e-14);
        assert!(inv.y.abs() < 1e-14);
        assert!(inv.w.abs() < 1e-14);
    }

    #[test]
    fn rhs_4d_matches_hand_value() {
        // mu = 1, beta = 1, D = 1, chi = 1, c = 2 at (0.5, 0.6, -0.1, 0.8):
        // U' = -1 + 0.5*1*(-0.1) + 0.8 = -0.25
        // V' = -0.1
        // Y' = (0.2 + 0.5 - 0.6) / 1 = 0.1
        // W' = 0.5 * (-0.5) = -0.25
        let p = params(1.0, 1.0, 1.0, ChiFunction::constant(1.0));
        let d = spatial_rhs_4d(
            SpatialState4 { u: 0.5, v: 0.6, y: -0.1, w: 0.8 },
            &p,
            2.0,
        );
        assert!((d.u + 0.25).abs() < 1e-15);
        assert_eq!(d.v, -0.1);
        assert!((d.y - 0.1).abs() < 1e-15);
        assert_eq!(d.w, -0.25);
    }

    #[test]
    fn without_chemotaxis_uw_subsystem_ignores_v() {
        // chi = 0 decouples (U, W) from V: same (u, w), different v, same
        // (U', W').
        let p = params(1.3, 0.7, 0.0, ChiFunction::ZERO);
        for k in 0..50 {
            let u = 0.02 * k as f64;
            let w = 0.5 - 0.01 * k as f64;
            let a = spatial_rhs_3d(SpatialState3 { u, v: 0.1, w }, &p, 2.2);
            let b = spatial_rhs_3d(SpatialState3 { u, v: 1.4, w }, &p, 2.2);
            assert_eq!(a.u, b.u);
            assert_eq!(a.w, b.w);
        }
    }

    #[test]
    fn json_round_trip_preserves_params() {
        let p = params(1.0, 2.0, 0.5, ChiFunction::Affine { a: 0.1, b: 0.2 });
        let text = serde_json::to_string(&p).unwrap();
        assert!(text.contains("\"D\":0.5"), "{text}");
        assert!(text.contains("\"type\":\"affine\""), "{text}");
        let q: ModelParams = serde_json::from_str(&text).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn json_schema_matches_documented_shape() {
        let text = r#"{
            "mu": 1.0, "beta": 2.0, "D": 0.0,
            "chi": {"type": "constant", "kappa": 0.5}
        }"#;
        let p: ModelParams = serde_json::from_str(text).unwrap();
        assert_eq!(p.chi, ChiFunction::Constant { kappa: 0.5 });
        p.validate().unwrap();
    }
}
