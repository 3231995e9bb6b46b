//! Numerical laboratory for traveling invasion waves in a chemotaxis
//! reaction-diffusion model.
//!
//! The model couples a logistically growing cell density `u` to a chemical
//! concentration `v`:
//!
//! ```text
//! u_t = u_xx - (u chi(v) v_x)_x + mu u (1 - u)
//! v_t = D v_xx + beta v - u
//! ```
//!
//! with `mu, beta > 0`, `D >= 0`, and a chemotactic sensitivity `chi`
//! admissible when `0 <= chi(v) <= mu` on `[0, 1/beta]`. Traveling waves
//! `(U, V)(x - ct)` connect the invaded state `(1, 1/beta)` to the empty
//! state `(0, 0)`, and the minimum wave speed has the closed form
//! `c* = 2 sqrt(mu)` for `D = 0` and `c* = 2 max{sqrt(mu), sqrt(D beta)}`
//! for `D > 0`, independent of the sensitivity.
//!
//! The crates' modules mirror the pipeline used to certify that statement
//! numerically:
//!
//! * [`model`] - parameters, sensitivity functions, and the spatial ODE
//!   right-hand sides obtained from the traveling-wave ansatz.
//! * [`spectra`] - closed-form speeds, equilibrium spectra, unstable
//!   directions, and the lower-surface quadratic.
//! * [`integrate`] - an embedded Dormand-Prince 5(4) integrator with dense
//!   output and event location.
//! * [`regions`] - trap regions, face-flux certification, and surface
//!   verification.
//! * [`heteroclinic`] - shooting along the one-dimensional unstable
//!   manifold, empirical minimum-speed bisection, and profile extraction.
//! * [`pde`] - method-of-lines simulation, front tracking, and residual
//!   checks of extracted profiles.
//! * [`cli`] - the command-line front end (`speed`, `shoot`, `minspeed`,
//!   `trapcheck`, `surface`, `simulate`, `sweep`) with JSON/CSV/SVG output.
//!
//! Runnable walk-throughs for each capability live in `examples/`.

pub mod cli;
pub mod heteroclinic;
pub mod integrate;
pub mod model;
pub mod pde;
pub mod regions;
pub mod spectra;
