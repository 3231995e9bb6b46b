//! Eigenvalues of the wave equations linearized at the extinction state.
//!
//! The stable spectrum at the origin decides whether an orbit can approach
//! extinction monotonically: below the minimum speed a complex pair forces
//! a spiral (negative densities), at and above it every eigenvalue is
//! real. The classification therefore flips exactly at the closed-form
//! speed, which is how the shooting method detects the threshold.
//!
//! Run with: cargo run --example origin_spectrum

use kswave::model::{ChiFunction, ModelParams};
use kswave::spectra::{min_wave_speed, origin_spectrum, SpectrumClass};

fn main() {
    let p = ModelParams::new(1.0, 1.0, 0.0, ChiFunction::constant(0.5)).unwrap();
    let c_star = min_wave_speed(&p).c_star;
    println!("mu = 1, beta = 1, D = 0: minimum speed c* = {c_star}");
    println!("{:>8} {:>14} eigenvalues (re, im)", "c", "class");
    for c in [1.0, 1.5, 1.9, 1.999, 2.0, 2.001, 2.5, 3.0] {
        let report = origin_spectrum(&p, c);
        let class = match report.classification {
            SpectrumClass::AllRealNegative => "all real",
            SpectrumClass::ComplexPresent => "complex pair",
        };
        let eigs = report
            .eigenvalue_pairs()
            .iter()
            .map(|[re, im]| format!("({re:+.4}, {im:+.4})"))
            .collect::<Vec<_>>()
            .join(" ");
        println!("{c:>8} {class:>14} {eigs}");
    }

    // With chemical diffusion the system is four-dimensional and the
    // spectrum gains a root pair from D lambda^2 + c lambda + beta.
    let p = ModelParams::new(1.0, 4.0, 1.0, ChiFunction::constant(1.0)).unwrap();
    let c_star = min_wave_speed(&p).c_star;
    println!("\nmu = 1, beta = 4, D = 1: minimum speed c* = {c_star}");
    for c in [3.0, 4.0, 5.0] {
        let report = origin_spectrum(&p, c);
        let eigs = report
            .eigenvalue_pairs()
            .iter()
            .map(|[re, im]| format!("({re:+.4}, {im:+.4})"))
            .collect::<Vec<_>>()
            .join(" ");
        println!("c = {c}: {eigs}");
    }
}
