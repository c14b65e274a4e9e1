//! Equatorial closed geodesics, the Jacobi equation along them and the
//! elliptic-generic test on the linearized Poincaré map.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::surface::SurfaceOfRevolution;

/// Fixed RK4 steps per period; comfortably above `T / 1e4`.
pub const JACOBI_STEPS: usize = 20_000;
pub const DEFAULT_MAX_DENOMINATOR: u32 = 50;
pub const DEFAULT_TOLERANCE: f64 = 1e-3;
/// `|r''|` below this marks a degenerate critical point.
const DEGENERATE_CURVATURE: f64 = 1e-10;
/// Largest Richardson error estimate accepted on the monodromy entries, relative.
const RICHARDSON_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalKind {
    /// local maximum of `r`
    Stable,
    /// local minimum of `r`
    Unstable,
    Degenerate,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosedGeodesic {
    pub s_gamma: f64,
    /// length `2 pi r(s_gamma)`
    pub period: f64,
    pub kind: CriticalKind,
    #[serde(skip)]
    pub surface: SurfaceOfRevolution,
}

impl ClosedGeodesic {
    pub fn radius(&self) -> f64 {
        self.surface.radius(self.s_gamma)
    }

    /// Gaussian curvature along the geodesic, as a function of its arc length.
    pub fn curvature_at(&self, _tau: f64) -> f64 {
        self.surface.gauss_curvature(self.s_gamma)
    }
}

#[derive(Debug, Clone)]
pub enum EquatorSearch {
    Found(Vec<ClosedGeodesic>),
    /// `r' = 0` identically: every parallel is a geodesic
    DegenerateProfile,
}

impl EquatorSearch {
    pub fn equators(&self) -> &[ClosedGeodesic] {
        match self {
            EquatorSearch::Found(v) => v,
            EquatorSearch::DegenerateProfile => &[],
        }
    }
}

pub fn find_equators(surface: &SurfaceOfRevolution) -> EquatorSearch {
    let l = surface.profile_period();
    let n = 4096;
    let h = l / n as f64;
    let ds: Vec<f64> = (0..=n).map(|i| surface.radius_d1(i as f64 * h)).collect();
    let flat = (0..n).all(|i| ds[i].abs() < 1e-12 && surface.radius_d2(i as f64 * h).abs() < DEGENERATE_CURVATURE);
    if flat {
        return EquatorSearch::DegenerateProfile;
    }
    let mut roots: Vec<f64> = Vec::new();
    for i in 0..n {
        let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
        if ds[i] == 0.0 {
            roots.push(a);
        } else if ds[i + 1] != 0.0 && ds[i].signum() != ds[i + 1].signum() {
            roots.push(bisect(|s| surface.radius_d1(s), a, b));
        }
    }
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-9 * l);
    if roots.len() > 1 && (roots[roots.len() - 1] - l).abs() < 1e-9 * l {
        roots.pop();
    }
    EquatorSearch::Found(
        roots
            .into_iter()
            .map(|s| {
                let r2 = surface.radius_d2(s);
                let kind = if r2.abs() < DEGENERATE_CURVATURE {
                    CriticalKind::Degenerate
                } else if r2 < 0.0 {
                    CriticalKind::Stable
                } else {
                    CriticalKind::Unstable
                };
                ClosedGeodesic {
                    s_gamma: s,
                    period: 2.0 * PI * surface.radius(s),
                    kind,
                    surface: surface.clone(),
                }
            })
            .collect(),
    )
}

/// Stable equator of largest radius.
pub fn outer_equator(surface: &SurfaceOfRevolution) -> Result<ClosedGeodesic> {
    find_equators(surface)
        .equators()
        .iter()
        .filter(|g| g.kind == CriticalKind::Stable)
        .max_by(|a, b| a.radius().total_cmp(&b.radius()))
        .cloned()
        .ok_or_else(|| Error::InvalidSurface("no stable equator".into()))
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 || b - a < 1e-15 * b.abs().max(1.0) {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

#[derive(Debug, Clone, Serialize)]
pub struct PoincareData {
    /// row-major fundamental matrix of `J'' + K J = 0` over the period
    pub monodromy: [[f64; 2]; 2],
    /// reduced angle in `(0, 2 pi)`, elliptic case only
    pub rotation_angle_theta: Option<f64>,
    pub winding_theta_full: f64,
    pub maslov_p: u8,
    /// Richardson estimate of the integration error on the monodromy
    pub integration_error: f64,
}

impl PoincareData {
    /// Exact rotation by `theta`, for feeding the classifier directly.
    pub fn from_rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let reduced = theta.rem_euclid(2.0 * PI);
        PoincareData {
            monodromy: [[c, s], [-s, c]],
            rotation_angle_theta: (reduced > 0.0).then_some(reduced),
            winding_theta_full: theta,
            maslov_p: 0,
            integration_error: 0.0,
        }
    }

    pub fn trace(&self) -> f64 {
        self.monodromy[0][0] + self.monodromy[1][1]
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.monodromy;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    /// Moduli of the two eigenvalues.
    pub fn eigenvalue_moduli(&self) -> (f64, f64) {
        let tr = self.trace();
        let det = self.determinant();
        let disc = tr * tr - 4.0 * det;
        if disc < 0.0 {
            let m = det.sqrt();
            (m, m)
        } else {
            let r = disc.sqrt();
            ((0.5 * (tr - r)).abs(), (0.5 * (tr + r)).abs())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "class", content = "q")]
pub enum Classification {
    EllipticGeneric,
    RootOfUnitySuspect(u32),
    Hyperbolic,
    Parabolic,
}

/// Integrate `J'' + K(tau) J = 0` over `[0, period]` with `steps` RK4 steps.
/// Returns the monodromy and the clockwise winding of `(J, J'/omega)` for the
/// solution starting at `(1, 0)`.
fn rk4_monodromy(curvature: &dyn Fn(f64) -> f64, period: f64, steps: usize, omega: f64) -> ([[f64; 2]; 2], f64) {
    let h = period / steps as f64;
    let rhs = |tau: f64, y: [f64; 2]| [y[1], -curvature(tau) * y[0]];
    let step = |tau: f64, y: [f64; 2]| {
        let k1 = rhs(tau, y);
        let k2 = rhs(tau + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = rhs(tau + 0.5 * h, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = rhs(tau + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        [
            y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ]
    };
    let mut a = [1.0, 0.0];
    let mut b = [0.0, 1.0];
    let mut winding = 0.0;
    let mut angle = 0.0_f64;
    for k in 0..steps {
        let tau = k as f64 * h;
        a = step(tau, a);
        b = step(tau, b);
        let next = (a[1] / omega).atan2(a[0]);
        let mut d = next - angle;
        if d > PI {
            d -= 2.0 * PI;
        } else if d < -PI {
            d += 2.0 * PI;
        }
        winding -= d;
        angle = next;
    }
    ([[a[0], b[0]], [a[1], b[1]]], winding)
}

/// Poincaré data for an arbitrary curvature profile along a closed curve of length `period`.
pub fn poincare_from_curvature(curvature: &dyn Fn(f64) -> f64, period: f64) -> Result<PoincareData> {
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::Integration(format!("period {period} is not positive")));
    }
    let probe = 64;
    let mean_k = (0..probe)
        .map(|i| curvature(period * i as f64 / probe as f64))
        .sum::<f64>()
        / probe as f64;
    let omega = if mean_k.abs() > 1e-12 { mean_k.abs().sqrt() } else { 1.0 };
    let (m, raw) = rk4_monodromy(curvature, period, JACOBI_STEPS, omega);
    let (m_half, _) = rk4_monodromy(curvature, period, 2 * JACOBI_STEPS, omega);
    let scale = m.iter().flatten().fold(1.0_f64, |s, v| s.max(v.abs()));
    let err = m
        .iter()
        .flatten()
        .zip(m_half.iter().flatten())
        .map(|(x, y)| (x - y).abs() / 15.0)
        .fold(0.0, f64::max);
    if !err.is_finite() || err > RICHARDSON_TOL * scale {
        return Err(Error::Integration(format!(
            "Richardson error {err:e} exceeds tolerance at {JACOBI_STEPS} steps"
        )));
    }
    let tr = m_half[0][0] + m_half[1][1];
    // acos is ill-conditioned next to |tr| = 2; keep the raw winding there
    let (winding, reduced) = if tr.abs() < 2.0 - 1e-6 {
        let phi = (0.5 * tr).acos();
        let k = (raw / (2.0 * PI)).round();
        let snapped = [-1.0, 0.0, 1.0]
            .iter()
            .flat_map(|dk| {
                let base = 2.0 * PI * (k + dk);
                [base - phi, base + phi]
            })
            .min_by(|x, y| (x - raw).abs().total_cmp(&(y - raw).abs()))
            .unwrap_or(raw);
        let red = snapped.rem_euclid(2.0 * PI);
        (snapped, (red > 0.0).then_some(red))
    } else if tr.abs() <= 2.0 {
        let red = raw.rem_euclid(2.0 * PI);
        (raw, (red > 1e-9 && red < 2.0 * PI - 1e-9).then_some(red))
    } else {
        (raw, None)
    };
    Ok(PoincareData {
        monodromy: m_half,
        rotation_angle_theta: reduced,
        winding_theta_full: winding,
        maslov_p: 0,
        integration_error: err,
    })
}

pub fn poincare_map(geodesic: &ClosedGeodesic) -> Result<PoincareData> {
    poincare_map_periods(geodesic, 1)
}

/// Integrate over `periods` traversals of the geodesic.
pub fn poincare_map_periods(geodesic: &ClosedGeodesic, periods: u32) -> Result<PoincareData> {
    let k = |tau: f64| geodesic.curvature_at(tau);
    poincare_from_curvature(&k, geodesic.period * periods as f64)
}

/// Elliptic generic up to denominator `max_q`: `|trace| < 2 - tol` and the eigenvalue's
/// `q`-th power stays away from 1, i.e. `|q theta / 2 pi - p| > tol` for all `q <= max_q`.
pub fn is_elliptic_generic(p: &PoincareData, max_q: u32, tol: f64) -> Classification {
    let tr = p.trace();
    if tr.abs() > 2.0 + tol {
        return Classification::Hyperbolic;
    }
    if tr.abs() >= 2.0 - tol {
        return Classification::Parabolic;
    }
    let theta = match p.rotation_angle_theta {
        Some(t) => t,
        None => (0.5 * tr).acos(),
    };
    let x = theta / (2.0 * PI);
    for q in 1..=max_q.max(1) {
        let qx = q as f64 * x;
        if (qx - qx.round()).abs() <= tol {
            return Classification::RootOfUnitySuspect(q);
        }
    }
    Classification::EllipticGeneric
}
