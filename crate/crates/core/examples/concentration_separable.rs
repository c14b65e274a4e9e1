//! Mass of the exact modes in envelope windows around the sector ground states,
//! for a rotation-invariant factor vanishing to order 8 on the outer equator.

use quasimodes::conclab::{bad_set_audit, build_envelope_scheme, measure_masses, QRule, Resolution};
use quasimodes::surface::{make_flat_factor, ConformalFamily, SurfaceOfRevolution};

fn main() -> quasimodes::Result<()> {
    let torus = SurfaceOfRevolution::torus(2.0, 1.0)?;
    let factor = make_flat_factor(&torus, 8, 0.1)?;
    let family = ConformalFamily::uniform(torus, factor, 21)?;
    let ms: Vec<u32> = (10..=40).step_by(5).collect();
    let scheme = build_envelope_scheme(&family, &ms, 1e-8, QRule::InverseSqrt, 256)?;
    let report = measure_masses(&scheme, &family, Resolution::Separable { n_s: 256 })?;
    for &m in &ms {
        let q = scheme.interval(m).map_or(f64::NAN, |i| i.q);
        let sup = report.sup_masses(m).into_iter().fold(0.0, f64::max);
        println!("m = {m:>2}  sup mass = {sup:.3e}  sup mass / q = {:.3e}", sup / q);
    }
    let audit = bad_set_audit(&report, &scheme, &[1.0, 0.3, 0.1]);
    println!("K_explicit = {:.3}  in cone: {}", audit.k_explicit, audit.in_cone);
    Ok(())
}
