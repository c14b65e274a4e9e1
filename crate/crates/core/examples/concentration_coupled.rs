//! Bad sets for a factor that breaks rotation invariance, on the full two-dimensional grid.
//! Coarse on purpose: a few m and t values only.

use quasimodes::conclab::{bad_set_audit, build_mode_defect_scheme, measure_masses, QRule, Resolution};
use quasimodes::surface::{make_coupled_factor, ConformalFamily, SurfaceOfRevolution};

fn main() -> quasimodes::Result<()> {
    let torus = SurfaceOfRevolution::torus(2.0, 1.0)?;
    let factor = make_coupled_factor(&torus, 8, 0.1, 0.3)?;
    let family = ConformalFamily::uniform(torus, factor, 5)?;
    let resolution = Resolution::Coupled { n_s: 96, n_phi: 48 };
    let scheme = build_mode_defect_scheme(&family, &[6, 8], 1.1, QRule::InverseSqrt, resolution)?;
    let report = measure_masses(&scheme, &family, resolution)?;
    let audit = bad_set_audit(&report, &scheme, &[1.0, 0.3, 0.1]);
    for row in &audit.rows {
        println!(
            "m = {}  eps = {:<4}  |Y| = {:.3}  bound = {:.3}  {}",
            row.m, row.epsilon, row.measured, row.bound, row.verdict
        );
    }
    Ok(())
}
