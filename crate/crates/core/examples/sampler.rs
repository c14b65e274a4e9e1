//! Random conformal factors from the cube measure, with their cone certificates.

use quasimodes::conclab::{sample_conformal_factor, CubeMeasureSpec};
use quasimodes::surface::SurfaceOfRevolution;

fn main() -> quasimodes::Result<()> {
    let torus = SurfaceOfRevolution::torus(2.0, 1.0)?;
    let spec = CubeMeasureSpec::default();
    println!("relative norm tail: {:.2e}", spec.relative_tail());
    for seed in 0..5 {
        let s = sample_conformal_factor(&torus, &spec, seed)?;
        println!(
            "seed {seed}: c = {:.3e}  min f / d^N = {:.3e}  max f = {:.3e}",
            s.cone_constant,
            s.cone_margin,
            s.factor.max_value()
        );
    }
    Ok(())
}
