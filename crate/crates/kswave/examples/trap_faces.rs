//! Certifies the boundary faces of the trap region by sampled inward flux.
//!
//! The region `0 <= U <= beta V <= 1` (with `rho (U - beta V) <= Y <= 0`
//! when the chemical diffuses, and `W <= c U` as the cap) traps the wave
//! orbit: on every boundary face except the designated exit face `W = 0`,
//! the vector field must point inward. Each face is sampled on a product
//! grid and polished with a Newton step around the worst sample.
//!
//! With chemical diffusion the cap face genuinely leaks for strong
//! sensitivities: beyond `chi > mu / (c rho)` the flux turns negative.
//! The last block shows such a leak; the certification reports it rather
//! than papering over it.
//!
//! Run with: cargo run --example trap_faces

use kswave::model::{ChiFunction, ModelParams};
use kswave::regions::{face_flux_check, region_faces, FLUX_TOL};
use kswave::spectra::{min_wave_speed, rho};

fn certify(p: &ModelParams, c: f64, samples: usize) {
    println!("{:>8} {:>8} {:>14} worst point", "face", "samples", "worst margin");
    for &face in region_faces(p) {
        let rep = face_flux_check(p, c, face, samples).unwrap();
        let verdict = if face.name() == "W0" {
            "exit face"
        } else if rep.worst_margin >= FLUX_TOL {
            "inward"
        } else {
            "LEAKS"
        };
        let point =
            rep.worst_point.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>().join(", ");
        println!(
            "{:>8} {:>8} {:>14.6e} ({point})  {verdict}",
            rep.face.name(),
            rep.samples,
            rep.worst_margin
        );
    }
}

fn main() {
    let p = ModelParams::new(1.0, 1.0, 0.0, ChiFunction::constant(1.0)).unwrap();
    let c = min_wave_speed(&p).c_star + 0.5;
    println!("D = 0, chi = mu, c = {c}: every non-exit face holds\n");
    certify(&p, c, 2000);

    let p = ModelParams::new(1.0, 1.0, 1.0, ChiFunction::constant(0.25)).unwrap();
    let c = 4.0;
    println!("\nD = 1, weak sensitivity, c = {c}: the 4-dimensional region holds\n");
    certify(&p, c, 2000);

    let p = ModelParams::new(1.0, 1.0, 1.0, ChiFunction::constant(1.0)).unwrap();
    let c = 2.0;
    let r = rho(&p, c).unwrap();
    println!(
        "\nD = 1, chi = {} > mu / (c rho) = {:.4}, c = {c}: the cap face leaks\n",
        1.0,
        1.0 / (c * r)
    );
    certify(&p, c, 2000);
}
