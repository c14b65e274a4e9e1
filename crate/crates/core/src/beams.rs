//! Lowest-order Gaussian beams on a stable equator.
//!
//! The beam `e^{i m phi} H_{m1}(x / sigma) e^{-x^2 / 2 sigma^2}` lives in angular
//! sector `m`, with `x` the signed profile distance to the equator and `sigma`
//! from the harmonic approximation of `m^2 / r(s)^2`. Its defect is measured
//! with the same sector discretization that produces the exact spectrum.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geodesic::{
    is_elliptic_generic, poincare_map, Classification, ClosedGeodesic, PoincareData, DEFAULT_MAX_DENOMINATOR,
    DEFAULT_TOLERANCE,
};
use crate::spectral::{assemble_sector, count_in_window, Discretization, SectorOperator, SpectralWindow};
use crate::stats::{linear_fit, LineFit};
use crate::surface::ConformalFamily;

/// Tube radii for localization masses, in units of `L_s / 2 pi`.
pub const LOCALIZATION_DELTAS: [f64; 4] = [0.1, 0.2, 0.4, 0.8];
/// The beam width must span this many grid spacings.
pub const MIN_SAMPLES_PER_WIDTH: f64 = 8.0;

#[derive(Debug, Clone, Serialize)]
pub struct GaussianBeam {
    pub m: u32,
    pub m1: u32,
    pub alpha: f64,
    pub lambda_m: f64,
    pub sigma: f64,
    pub s_gamma: f64,
    pub period: f64,
    pub maslov_p: u8,
}

/// `((2 pi m + alpha) / T)^2` with `alpha = (m1 + 1/2) winding + p pi`.
pub fn quasi_eigenvalue(m: u32, m1: u32, winding: f64, maslov_p: u8, period: f64) -> (f64, f64) {
    let alpha = (m1 as f64 + 0.5) * winding + maslov_p as f64 * PI;
    let lambda = ((2.0 * PI * m as f64 + alpha) / period).powi(2);
    (alpha, lambda)
}

pub fn build_beam(geodesic: &ClosedGeodesic, m: u32, m1: u32) -> Result<GaussianBeam> {
    let p = poincare_map(geodesic)?;
    build_beam_with(geodesic, &p, m, m1)
}

/// Beam from precomputed Poincaré data; refuses anything but an elliptic generic geodesic.
pub fn build_beam_with(geodesic: &ClosedGeodesic, p: &PoincareData, m: u32, m1: u32) -> Result<GaussianBeam> {
    let class = is_elliptic_generic(p, DEFAULT_MAX_DENOMINATOR, DEFAULT_TOLERANCE);
    if class != Classification::EllipticGeneric {
        return Err(Error::NotEllipticGeneric(format!("{class:?}")));
    }
    if m == 0 {
        return Err(Error::InvalidArgument("beam needs m >= 1".into()));
    }
    let surface = &geodesic.surface;
    let r0 = surface.radius(geodesic.s_gamma);
    let kappa = -surface.radius_d2(geodesic.s_gamma);
    if !(kappa > 0.0) {
        return Err(Error::NotEllipticGeneric("equator is not a strict maximum of r".into()));
    }
    let sigma = (r0.powi(3) / ((m as f64).powi(2) * kappa)).powf(0.25);
    let (alpha, lambda_m) = quasi_eigenvalue(m, m1, p.winding_theta_full, p.maslov_p, geodesic.period);
    Ok(GaussianBeam {
        m,
        m1,
        alpha,
        lambda_m,
        sigma,
        s_gamma: geodesic.s_gamma,
        period: geodesic.period,
        maslov_p: p.maslov_p,
    })
}

/// Physicists' Hermite polynomial.
pub fn hermite(n: u32, x: f64) -> f64 {
    let (mut h0, mut h1) = (1.0, 2.0 * x);
    if n == 0 {
        return h0;
    }
    for k in 1..n {
        let h2 = 2.0 * x * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

impl GaussianBeam {
    /// Unnormalized transverse profile at signed distance `x` from the equator.
    pub fn profile_at(&self, x: f64) -> f64 {
        let y = x / self.sigma;
        hermite(self.m1, y) * (-0.5 * y * y).exp()
    }

    /// Profile on the operator's grid, normalized in `dx_t`.
    pub fn sample(&self, family: &ConformalFamily, op: &SectorOperator) -> Vec<f64> {
        let mut u: Vec<f64> =
            op.s.iter()
                .map(|&s| self.profile_at(family.base.wrapped_offset(s, self.s_gamma)))
                .collect();
        let norm = op.norm_sq(&u).sqrt();
        u.iter_mut().for_each(|v| *v /= norm);
        u
    }

    fn check_resolution(&self, op: &SectorOperator) -> Result<()> {
        let limit = MIN_SAMPLES_PER_WIDTH * op.h;
        if self.sigma < limit {
            return Err(Error::UnderResolved {
                sigma: self.sigma,
                limit,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DefectReport {
    pub m: u32,
    pub m1: u32,
    pub t: f64,
    pub lambda_m: f64,
    pub sigma: f64,
    /// `||(Delta_t - lambda_m) u|| / ||u||` in `L^2(dx_t)`
    pub c_m: f64,
    /// tube radii `delta`
    pub deltas: Vec<f64>,
    /// mass of `|u|^2` outside `d(., gamma) <= delta`
    pub localization: Vec<f64>,
}

pub fn measure_defect(beam: &GaussianBeam, family: &ConformalFamily, t: f64, n_s: usize) -> Result<DefectReport> {
    let op = assemble_sector(family, beam.m, t, n_s)?;
    measure_defect_on(beam, family, &op)
}

/// Defect on an already assembled sector operator (which must be sector `beam.m`).
pub fn measure_defect_on(beam: &GaussianBeam, family: &ConformalFamily, op: &SectorOperator) -> Result<DefectReport> {
    if op.n != beam.m {
        return Err(Error::InvalidArgument(format!(
            "beam m = {} measured on sector {}",
            beam.m, op.n
        )));
    }
    beam.check_resolution(op)?;
    let u = beam.sample(family, op);
    let c_m = op.defect(beam.lambda_m, &u);
    let a = family.base.transverse_scale();
    let deltas: Vec<f64> = LOCALIZATION_DELTAS.iter().map(|d| d * a).collect();
    let localization = deltas
        .iter()
        .map(|&delta| {
            op.s.iter()
                .zip(&u)
                .zip(&op.weight)
                .filter(|((s, _), _)| family.base.wrapped_offset(**s, beam.s_gamma).abs() > delta)
                .map(|((_, v), w)| v * v * w)
                .sum()
        })
        .collect();
    Ok(DefectReport {
        m: beam.m,
        m1: beam.m1,
        t: op.t,
        lambda_m: beam.lambda_m,
        sigma: beam.sigma,
        c_m,
        deltas,
        localization,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CaptureReport {
    pub m: u32,
    pub t: f64,
    pub c_m: f64,
    pub window: SpectralWindow,
    /// eigenvalues of sector `m` inside the window (inertia count)
    pub count: usize,
    pub captured: bool,
    /// distance from `lambda_m` to the nearest sector-`m` eigenvalue
    pub distance: f64,
}

/// Window `lambda_m +- c C_m` and whether it holds an eigenvalue. The spectral theorem
/// forces `distance <= C_m`, so `c >= 1` must always capture.
pub fn check_spectrum_capture(
    beam: &GaussianBeam,
    family: &ConformalFamily,
    t: f64,
    c_safety: f64,
    n_s: usize,
) -> Result<CaptureReport> {
    if !(c_safety >= 1.0) {
        return Err(Error::InvalidArgument(format!("safety factor {c_safety} < 1")));
    }
    let op = assemble_sector(family, beam.m, t, n_s)?;
    let defect = measure_defect_on(beam, family, &op)?;
    let window = SpectralWindow::new(beam.lambda_m, c_safety * defect.c_m)?;
    let count = count_in_window(&op, &window)?;
    let distance = op
        .eigenvalues()?
        .iter()
        .map(|mu| (mu - beam.lambda_m).abs())
        .fold(f64::INFINITY, f64::min);
    Ok(CaptureReport {
        m: beam.m,
        t,
        c_m: defect.c_m,
        window,
        count,
        captured: count > 0,
        distance,
    })
}

/// Slope of `log sigma_m` against `log lambda_m`.
pub fn fit_width_exponent(beams: &[GaussianBeam]) -> Option<LineFit> {
    let x: Vec<f64> = beams.iter().map(|b| b.lambda_m.ln()).collect();
    let y: Vec<f64> = beams.iter().map(|b| b.sigma.ln()).collect();
    linear_fit(&x, &y)
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayFit {
    pub m: u32,
    pub mu: f64,
    /// `c` in `|v| ~ exp(-c d^2)`
    pub rate: f64,
    /// `rate / sqrt(mu)`; roughly constant under Gaussian-beam scaling
    pub rate_over_sqrt_mu: f64,
    pub r_squared: f64,
}

/// Fit `log |v| = a - c d^2` on the exact sector-`m` ground state inside the tube `d <= 0.8 a`.
pub fn fit_decay_exponent(family: &ConformalFamily, s_gamma: f64, m: u32, t: f64, n_s: usize) -> Result<DecayFit> {
    let op = assemble_sector(family, m, t, n_s)?;
    let sol = crate::spectral::solve_sector(&op, 1)?;
    let pair = &sol.pairs[0];
    let peak = pair.vector.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let tube = 0.8 * family.base.transverse_scale();
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for (s, v) in op.s.iter().zip(&pair.vector) {
        let d = family.base.wrapped_offset(*s, s_gamma).abs();
        if d <= tube && v.abs() > 1e-10 * peak {
            x.push(d * d);
            y.push(v.abs().ln());
        }
    }
    let fit = linear_fit(&x, &y).ok_or_else(|| Error::InvalidArgument("too few samples for a decay fit".into()))?;
    Ok(DecayFit {
        m,
        mu: pair.mu,
        rate: -fit.slope,
        rate_over_sqrt_mu: -fit.slope / pair.mu.sqrt(),
        r_squared: fit.r_squared,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesic::{find_equators, outer_equator};
    use crate::spectral::solve_sector;
    use crate::surface::{make_flat_factor, ConformalFactor, SurfaceOfRevolution};

    fn setup() -> (ClosedGeodesic, ConformalFamily) {
        let s = SurfaceOfRevolution::torus(2.0, 1.0).unwrap();
        let g = outer_equator(&s).unwrap();
        let f = make_flat_factor(&s, 8, 0.1).unwrap();
        (g, ConformalFamily::uniform(s, f, 11).unwrap())
    }

    #[test]
    fn hermite_values() {
        assert_eq!(hermite(0, 0.3), 1.0);
        assert_eq!(hermite(1, 0.3), 0.6);
        assert!((hermite(3, 0.5) - (8.0 * 0.125 - 12.0 * 0.5)).abs() < 1e-14);
    }

    #[test]
    fn torus_m10_quasi_eigenvalue() {
        let (g, fam) = setup();
        let b = build_beam(&g, 10, 0).unwrap();
        assert!((b.alpha - PI * 3f64.sqrt()).abs() < 1e-6);
        let want = ((20.0 * PI + PI * 3f64.sqrt()) / (6.0 * PI)).powi(2);
        assert!((b.lambda_m - want).abs() < 1e-6);
        assert!((b.lambda_m - 13.12).abs() < 5e-3);
        let op = assemble_sector(&fam, 10, 0.0, 512).unwrap();
        let nu = solve_sector(&op, 1).unwrap().pairs[0].mu;
        assert!((b.lambda_m - nu).abs() < 1.0);
    }

    #[test]
    fn profile_shapes() {
        let (g, _) = setup();
        let b0 = build_beam(&g, 10, 0).unwrap();
        let b1 = build_beam(&g, 10, 1).unwrap();
        assert!(b0.profile_at(0.0) > b0.profile_at(0.01));
        assert!(b0.profile_at(0.0) > b0.profile_at(-0.01));
        assert_eq!(b1.profile_at(0.0), 0.0);
    }

    #[test]
    fn refuses_hyperbolic_geodesic() {
        let s = SurfaceOfRevolution::torus(2.0, 1.0).unwrap();
        let inner = find_equators(&s).equators()[1].clone();
        assert!(matches!(build_beam(&inner, 10, 0), Err(Error::NotEllipticGeneric(_))));
    }

    #[test]
    fn unit_norm_at_t_zero() {
        let (g, fam) = setup();
        let b = build_beam(&g, 10, 0).unwrap();
        let op = assemble_sector(&fam, 10, 0.0, 512).unwrap();
        let u = b.sample(&fam, &op);
        assert!((op.norm_sq(&u) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn defect_bounded_by_conformal_factor() {
        let (g, fam) = setup();
        let b = build_beam(&g, 10, 0).unwrap();
        let c0 = measure_defect(&b, &fam, 0.0, 512).unwrap().c_m;
        let fmax = fam.factor.max_value();
        for t in [0.5, 1.0] {
            let ct = measure_defect(&b, &fam, t, 512).unwrap().c_m;
            let ratio = ct / c0;
            assert!(ratio >= (-fmax).exp() && ratio <= fmax.exp(), "t = {t}: {ratio}");
        }
    }

    #[test]
    fn relative_defect_decreases_and_localizes() {
        let (g, fam) = setup();
        let r10 = measure_defect(&build_beam(&g, 10, 0).unwrap(), &fam, 0.0, 512).unwrap();
        let r40 = measure_defect(&build_beam(&g, 40, 0).unwrap(), &fam, 0.0, 512).unwrap();
        assert!(r40.c_m / r40.lambda_m < r10.c_m / r10.lambda_m);
        assert!(r40.localization.windows(2).all(|w| w[0] >= w[1]));
        // Gaussian tail oracle: |u|^2 ~ exp(-x^2 / sigma^2) leaves erfc(delta / sigma) outside the tube;
        // the r(s) weight only tilts it slightly
        for r in [&r10, &r40] {
            let tail = erfc(r.deltas[3] / r.sigma);
            assert!(
                (r.localization[3] / tail - 1.0).abs() < 0.3,
                "{} vs {tail}",
                r.localization[3]
            );
        }
        let r70 = measure_defect(&build_beam(&g, 70, 0).unwrap(), &fam, 0.0, 512).unwrap();
        assert!(r70.localization[3] <= 1e-4);
    }

    /// Complementary error function by Simpson quadrature of the tail.
    fn erfc(z: f64) -> f64 {
        let (b, n) = (z + 12.0, 20_000);
        let h = (b - z) / n as f64;
        let g = |x: f64| (-x * x).exp();
        let mut acc = g(z) + g(b);
        for i in 1..n {
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * g(z + i as f64 * h);
        }
        acc * h / 3.0 * 2.0 / PI.sqrt()
    }

    #[test]
    fn under_resolved_guard() {
        let (g, fam) = setup();
        let b = build_beam(&g, 80, 0).unwrap();
        assert!(matches!(
            measure_defect(&b, &fam, 0.0, 64),
            Err(Error::UnderResolved { .. })
        ));
    }

    #[test]
    fn capture_at_m10() {
        let (g, fam) = setup();
        let b = build_beam(&g, 10, 0).unwrap();
        let rep = check_spectrum_capture(&b, &fam, 0.0, 1.1, 512).unwrap();
        assert!(rep.captured);
        assert!(rep.distance <= rep.c_m);
    }

    #[test]
    fn width_scaling_slope() {
        let (g, _) = setup();
        let beams: Vec<GaussianBeam> = (10..=80).step_by(10).map(|m| build_beam(&g, m, 0).unwrap()).collect();
        let fit = fit_width_exponent(&beams).unwrap();
        assert!((fit.slope + 0.25).abs() < 0.05);
    }

    #[test]
    fn decay_rate_grows_with_mu() {
        let s = SurfaceOfRevolution::torus(2.0, 1.0).unwrap();
        let fam = ConformalFamily::uniform(s, ConformalFactor::zero(), 2).unwrap();
        let a = fit_decay_exponent(&fam, 0.0, 10, 0.0, 512).unwrap();
        let b = fit_decay_exponent(&fam, 0.0, 40, 0.0, 512).unwrap();
        assert!(a.rate > 0.0 && b.rate > a.rate);
    }
}
