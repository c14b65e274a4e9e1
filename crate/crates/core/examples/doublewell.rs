//! Tunnelling doublets of a symmetric double well against single-well quasi-modes.

use quasimodes::doublewell::{splitting_sweep, DoubleWellProblem};

fn main() -> quasimodes::Result<()> {
    let (reports, fit) = splitting_sweep(&DoubleWellProblem::new(0.1), &[0.2, 0.15, 0.1, 0.08])?;
    for r in &reports {
        println!(
            "hbar = {:<5} splitting = {:.3e}  overlaps = ({:.3}, {:.3})  single-mode distance = {:.3}",
            r.hbar, r.splitting, r.overlap_even, r.overlap_odd, r.min_single_mode_distance
        );
    }
    if let Some(fit) = fit {
        println!(
            "log splitting = {:.4} / hbar + {:.4}   R^2 = {:.5}",
            fit.slope, fit.intercept, fit.r_squared
        );
    }
    Ok(())
}
