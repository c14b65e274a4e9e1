//! Eigenvalue branches under a conformal family: monotonicity and the Hadamard derivative.

use quasimodes::flow::{build_branches, monotonicity_audit, HadamardProbe};
use quasimodes::surface::{make_flat_factor, ConformalFamily, SurfaceOfRevolution};

fn main() -> quasimodes::Result<()> {
    let torus = SurfaceOfRevolution::torus(2.0, 1.0)?;
    let factor = make_flat_factor(&torus, 8, 0.1)?;
    let family = ConformalFamily::uniform(torus, factor, 51)?;
    let table = build_branches(&family, 14.0, 256)?;
    println!(
        "{} branches, {} monotonicity violations",
        table.j_max(),
        monotonicity_audit(&table).len()
    );

    let probe = HadamardProbe::new(&family, 14.0, 256);
    let spec = probe.spectrum_at(0.5)?;
    println!(
        "{:>3} {:>12} {:>14} {:>14} {:>10}",
        "j", "mu", "predicted", "richardson", "relative"
    );
    for j in probe.guarded_branches(&spec, 10) {
        let r = probe.check_on(&spec, j, 1e-3)?;
        println!(
            "{j:>3} {:>12.6} {:>14.6e} {:>14.6e} {:>10.2e}",
            r.mu, r.predicted, r.richardson, r.relative
        );
    }
    Ok(())
}
