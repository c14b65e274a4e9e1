//! Gaussian beams on the outer equator: predicted quasi-eigenvalues, measured defects
//! and the distance to the nearest exact eigenvalue.

use quasimodes::beams::{build_beam_with, check_spectrum_capture, fit_width_exponent};
use quasimodes::geodesic::{outer_equator, poincare_map};
use quasimodes::surface::{make_flat_factor, ConformalFamily, SurfaceOfRevolution};

fn main() -> quasimodes::Result<()> {
    let torus = SurfaceOfRevolution::torus(2.0, 1.0)?;
    let factor = make_flat_factor(&torus, 8, 0.1)?;
    let family = ConformalFamily::uniform(torus, factor, 3)?;
    let g = outer_equator(&family.base)?;
    let p = poincare_map(&g)?;
    let mut beams = Vec::new();
    println!(
        "{:>3} {:>12} {:>8} {:>10} {:>10}",
        "m", "lambda_m", "sigma", "C_m", "dist"
    );
    for m in (10..=40).step_by(5) {
        let beam = build_beam_with(&g, &p, m, 0)?;
        let cap = check_spectrum_capture(&beam, &family, 0.5, 1.0, 1024)?;
        println!(
            "{m:>3} {:>12.4} {:>8.4} {:>10.4} {:>10.4}",
            beam.lambda_m, beam.sigma, cap.c_m, cap.distance
        );
        beams.push(beam);
    }
    if let Some(fit) = fit_width_exponent(&beams) {
        println!("log sigma ~ {:.4} log lambda", fit.slope);
    }
    Ok(())
}
