//! Equators of a torus of revolution, their Poincaré maps and classification.

use quasimodes::geodesic::{
    find_equators, is_elliptic_generic, poincare_map, DEFAULT_MAX_DENOMINATOR, DEFAULT_TOLERANCE,
};
use quasimodes::surface::SurfaceOfRevolution;

fn main() -> quasimodes::Result<()> {
    let torus = SurfaceOfRevolution::torus(2.0, 1.0)?;
    for g in find_equators(&torus).equators() {
        let p = poincare_map(g)?;
        let class = is_elliptic_generic(&p, DEFAULT_MAX_DENOMINATOR, DEFAULT_TOLERANCE);
        println!(
            "s = {:.6}  r = {:.3}  {:?}  trace = {:+.6}  winding = {:.9}  -> {:?}",
            g.s_gamma,
            g.radius(),
            g.kind,
            p.trace(),
            p.winding_theta_full,
            class
        );
    }
    println!("2 pi sqrt(3) = {:.9}", 2.0 * std::f64::consts::PI * 3f64.sqrt());
    Ok(())
}
