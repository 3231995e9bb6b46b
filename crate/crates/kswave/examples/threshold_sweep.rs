//! Sweeps a parameter grid, bisecting the empirical threshold in every
//! cell and tallying the orbit classifications spent along the way.
//!
//! The headline fact is visible in the table: the measured threshold
//! tracks `2 max{sqrt(mu), sqrt(D beta)}` across every cell while the
//! sensitivity column changes nothing.
//!
//! Run with: cargo run --example threshold_sweep

use kswave::heteroclinic::{find_min_speed_empirical, ShootConfig};
use kswave::model::{ChiFunction, ModelParams};
use kswave::spectra::min_wave_speed;

fn main() {
    let mus = [0.25, 1.0, 4.0];
    let betas = [0.5, 2.0];
    let chis = [("0", 0.0), ("mu/2", 0.5), ("mu", 1.0)];
    let tol = 1e-3;

    println!(
        "{:>6} {:>6} {:>6} {:>10} {:>10} {:>9}  outcomes",
        "mu", "beta", "chi", "closed", "measured", "rel err"
    );
    let mut worst: f64 = 0.0;
    for mu in mus {
        for beta in betas {
            for (label, frac) in chis {
                let p = ModelParams::new(mu, beta, 0.0, ChiFunction::constant(frac * mu)).unwrap();
                let closed = min_wave_speed(&p).c_star;
                let emp = find_min_speed_empirical(
                    &p,
                    [0.4 * closed, 2.5 * closed],
                    tol,
                    &ShootConfig::default(),
                )
                .unwrap();
                let rel = (emp.c_min - closed).abs() / closed;
                worst = worst.max(rel);
                println!(
                    "{mu:>6} {beta:>6} {label:>6} {closed:>10.5} {:>10.5} {rel:>9.2e}  {}",
                    emp.c_min, emp.counts
                );
            }
        }
    }
    println!("\nworst relative error over the grid: {worst:.2e} (bisection width {tol})");
}
