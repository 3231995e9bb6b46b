//! Checks the one-way crossing surface `W = eta U` for two slopes.
//!
//! Orbits inside the trap region can cross the surface upward only when
//! the quadratic `eta^2 + b(U, V) eta + mu (1 - U)` is nonpositive
//! everywhere in the region. The slope `eta = c/2` satisfies this for
//! every admissible model at any speed at or above the minimum; the
//! steeper slope `5c/8` fails at the extinction corner, where the
//! quadratic evaluates to `c^2 (5/8)(5/8 - 1) + mu`, which is +1/16 at
//! `c = 2, mu = 1`.
//!
//! Run with: cargo run --example surface_condition

use kswave::model::{ChiFunction, ModelParams};
use kswave::regions::verify_surface;
use kswave::spectra::{default_eta, five_eighths_eta, min_wave_speed, surface_quadratic};

fn main() {
    let p = ModelParams::new(1.0, 1.0, 0.0, ChiFunction::constant(1.0)).unwrap();
    let c = min_wave_speed(&p).c_star;

    for (label, eta) in [("c/2", default_eta(c)), ("5c/8", five_eighths_eta(c))] {
        let check = verify_surface(&p, c, eta, 200).unwrap();
        println!(
            "eta = {label} = {eta}: holds = {}, worst quadratic value {:+.6e} at {:?}",
            check.holds, check.worst_value, check.worst_point
        );
    }

    let q = surface_quadratic(&p, c, five_eighths_eta(c), 0.0, 0.0, None);
    println!("\nquadratic at the extinction corner for eta = 5c/8: {q}");
    println!("matches c^2 (5/8)(5/8 - 1) + mu = {}", c * c * 0.625 * (0.625 - 1.0) + p.mu);

    // The margin of c/2 grows with the speed: away from the minimum the
    // discriminant of the quadratic strictly clears zero.
    println!();
    for factor in [1.0, 1.5, 3.0] {
        let cf = c * factor;
        let check = verify_surface(&p, cf, default_eta(cf), 200).unwrap();
        println!(
            "c = {cf}: eta = c/2 worst value {:+.6e} (holds = {})",
            check.worst_value, check.holds
        );
    }
}
