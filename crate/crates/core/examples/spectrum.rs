//! Lowest Laplace eigenvalues of a torus, by sectors and on the full grid.

use quasimodes::spectral::{assemble_coupled, global_spectrum};
use quasimodes::surface::{ConformalFactor, ConformalFamily, SurfaceOfRevolution};

fn main() -> quasimodes::Result<()> {
    let torus = SurfaceOfRevolution::torus(2.0, 1.0)?;
    let family = ConformalFamily::uniform(torus, ConformalFactor::zero(), 2)?;
    let sectors = global_spectrum(&family, 0.0, 3.0, 512)?;
    let grid = assemble_coupled(&family, 0.0, 128, 64)?.lowest(sectors.len())?;
    println!("{:>3} {:>14} {:>14}  label", "j", "sectors", "full grid");
    for (j, (mu, label)) in sectors.values.iter().zip(&sectors.labels).enumerate() {
        let full = grid.pairs.get(j).map_or(f64::NAN, |p| p.mu);
        println!(
            "{j:>3} {mu:>14.8} {full:>14.8}  n={} k={} {:?}",
            label.n, label.k, label.parity
        );
    }
    Ok(())
}
