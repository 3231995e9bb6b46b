//! Closed-form minimum wave speeds across a small parameter grid.
//!
//! The minimum speed is `2 max{sqrt(mu), sqrt(D beta)}`: the logistic and
//! chemical scales compete, and the sensitivity never enters. For `D = 0`
//! the earlier general bounds are printed next to the exact value; the
//! upper bound is attained only when chemotaxis is weak.
//!
//! Run with: cargo run --example min_speed

use kswave::model::{ChiFunction, ModelParams};
use kswave::spectra::{literature_bounds, min_wave_speed};

fn main() {
    println!("D = 0: exact speed vs the older general bounds");
    println!("{:>6} {:>6} {:>8} {:>10} {:>10} {:>10}", "mu", "beta", "chi", "c*", "lower", "upper");
    for (mu, beta, kappa) in [
        (0.25, 0.5, 0.0),
        (0.25, 2.0, 0.25),
        (1.0, 1.0, 0.5),
        (1.0, 1.0, 1.0),
        (4.0, 0.5, 4.0),
    ] {
        let p = ModelParams::new(mu, beta, 0.0, ChiFunction::constant(kappa)).unwrap();
        let speed = min_wave_speed(&p);
        let bounds = literature_bounds(&p);
        println!(
            "{mu:>6} {beta:>6} {kappa:>8} {:>10.6} {:>10.6} {:>10.6}",
            speed.c_star, bounds.lower, bounds.upper
        );
    }

    println!("\nD > 0: the binding scale switches when D beta overtakes mu");
    println!("{:>6} {:>6} {:>6} {:>10} {:>10}", "mu", "beta", "D", "c*", "binding");
    for (mu, beta, diff) in [(1.0, 1.0, 0.25), (1.0, 1.0, 1.0), (1.0, 4.0, 1.0), (4.0, 4.0, 1.0)] {
        let p = ModelParams::new(mu, beta, diff, ChiFunction::constant(mu)).unwrap();
        let speed = min_wave_speed(&p);
        println!("{mu:>6} {beta:>6} {diff:>6} {:>10.6} {:>10?}", speed.c_star, speed.binding);
    }
}
