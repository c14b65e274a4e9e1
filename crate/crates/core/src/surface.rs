//! Closed surfaces of revolution with torus topology and their conformal deformations.
//!
//! A surface is described by the distance `r(s)` to the rotation axis as a
//! periodic function of the profile arc length `s`. The metric is
//! `ds^2 + r(s)^2 dphi^2`; the deformed metric is `exp(-t f) g0`, with area form
//! `r exp(-t f) ds dphi` and Laplacian `exp(t f) Delta_0`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Samples used when validating a profile.
const VALIDATION_GRID: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileKind {
    /// `r(s) = major + minor cos(s / minor)`, profile period `2 pi minor`.
    TorusOfRevolution { major: f64, minor: f64 },
    /// Constant radius `rho` over a profile of length `length`.
    FlatTorus { rho: f64, length: f64 },
    /// `r(s) = mean + sum_k cosines[k-1] cos(2 pi k s / length)`.
    CustomFourier { mean: f64, cosines: Vec<f64>, length: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SurfaceOfRevolution {
    kind: ProfileKind,
}

impl SurfaceOfRevolution {
    pub fn new(kind: ProfileKind) -> Result<Self> {
        match &kind {
            ProfileKind::TorusOfRevolution { major, minor } => {
                if !(*minor > 0.0 && major > minor) {
                    return Err(Error::InvalidSurface(format!(
                        "torus needs major > minor > 0, got major = {major}, minor = {minor}"
                    )));
                }
            }
            ProfileKind::FlatTorus { rho, length } => {
                if !(*rho > 0.0 && *length > 0.0) {
                    return Err(Error::InvalidSurface(format!(
                        "flat torus needs rho > 0 and length > 0, got {rho}, {length}"
                    )));
                }
            }
            ProfileKind::CustomFourier { length, .. } => {
                if !(*length > 0.0) {
                    return Err(Error::InvalidSurface(format!("profile length {length} <= 0")));
                }
            }
        }
        let surface = SurfaceOfRevolution { kind };
        surface.validate_profile()?;
        Ok(surface)
    }

    pub fn torus(major: f64, minor: f64) -> Result<Self> {
        Self::new(ProfileKind::TorusOfRevolution { major, minor })
    }

    pub fn flat(rho: f64, length: f64) -> Result<Self> {
        Self::new(ProfileKind::FlatTorus { rho, length })
    }

    pub fn fourier(mean: f64, cosines: Vec<f64>, length: f64) -> Result<Self> {
        Self::new(ProfileKind::CustomFourier { mean, cosines, length })
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    fn validate_profile(&self) -> Result<()> {
        let l = self.profile_period();
        for i in 0..VALIDATION_GRID {
            let s = l * i as f64 / VALIDATION_GRID as f64;
            let r = self.radius(s);
            let dr = self.radius_d1(s);
            if !(r > 0.0) {
                return Err(Error::InvalidSurface(format!("r({s}) = {r} touches the axis")));
            }
            if dr * dr > 1.0 + 1e-12 {
                return Err(Error::InvalidSurface(format!(
                    "r'({s})^2 = {} > 1, not an arc-length profile",
                    dr * dr
                )));
            }
        }
        Ok(())
    }

    /// Profile period `L_s`.
    pub fn profile_period(&self) -> f64 {
        match &self.kind {
            ProfileKind::TorusOfRevolution { minor, .. } => 2.0 * PI * minor,
            ProfileKind::FlatTorus { length, .. } => *length,
            ProfileKind::CustomFourier { length, .. } => *length,
        }
    }

    /// `L_s / 2 pi`; equals the tube radius for a torus of revolution.
    pub fn transverse_scale(&self) -> f64 {
        self.profile_period() / (2.0 * PI)
    }

    pub fn radius(&self, s: f64) -> f64 {
        match &self.kind {
            ProfileKind::TorusOfRevolution { major, minor } => major + minor * (s / minor).cos(),
            ProfileKind::FlatTorus { rho, .. } => *rho,
            ProfileKind::CustomFourier { mean, cosines, length } => {
                let w = 2.0 * PI / length;
                mean + cosines
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c * (w * (k + 1) as f64 * s).cos())
                    .sum::<f64>()
            }
        }
    }

    pub fn radius_d1(&self, s: f64) -> f64 {
        match &self.kind {
            ProfileKind::TorusOfRevolution { minor, .. } => -(s / minor).sin(),
            ProfileKind::FlatTorus { .. } => 0.0,
            ProfileKind::CustomFourier { cosines, length, .. } => {
                let w = 2.0 * PI / length;
                -cosines
                    .iter()
                    .enumerate()
                    .map(|(k, c)| {
                        let wk = w * (k + 1) as f64;
                        c * wk * (wk * s).sin()
                    })
                    .sum::<f64>()
            }
        }
    }

    pub fn radius_d2(&self, s: f64) -> f64 {
        match &self.kind {
            ProfileKind::TorusOfRevolution { minor, .. } => -(s / minor).cos() / minor,
            ProfileKind::FlatTorus { .. } => 0.0,
            ProfileKind::CustomFourier { cosines, length, .. } => {
                let w = 2.0 * PI / length;
                -cosines
                    .iter()
                    .enumerate()
                    .map(|(k, c)| {
                        let wk = w * (k + 1) as f64;
                        c * wk * wk * (wk * s).cos()
                    })
                    .sum::<f64>()
            }
        }
    }

    /// Gaussian curvature `K = -r''(s) / r(s)`.
    pub fn gauss_curvature(&self, s: f64) -> f64 {
        -self.radius_d2(s) / self.radius(s)
    }

    /// `(min r, max r)` over a dense profile sample.
    pub fn radius_range(&self) -> (f64, f64) {
        let l = self.profile_period();
        (0..VALIDATION_GRID)
            .map(|i| self.radius(l * i as f64 / VALIDATION_GRID as f64))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r), hi.max(r)))
    }

    /// Location of the largest radius (the outer equator), refined by golden section.
    pub fn outer_equator(&self) -> f64 {
        let l = self.profile_period();
        let n = 4096;
        let h = l / n as f64;
        let best = (0..n)
            .max_by(|&a, &b| self.radius(a as f64 * h).total_cmp(&self.radius(b as f64 * h)))
            .unwrap_or(0);
        if self.radius_d1(best as f64 * h) == 0.0 {
            return best as f64 * h;
        }
        let (mut a, mut b) = ((best as f64 - 1.0) * h, (best as f64 + 1.0) * h);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..100 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if self.radius(c) > self.radius(d) {
                b = d;
            } else {
                a = c;
            }
        }
        (0.5 * (a + b)).rem_euclid(l)
    }

    /// Signed profile distance from `s` to `s0`, wrapped into `(-L/2, L/2]`.
    pub fn wrapped_offset(&self, s: f64, s0: f64) -> f64 {
        let l = self.profile_period();
        let mut d = (s - s0).rem_euclid(l);
        if d > 0.5 * l {
            d -= l;
        }
        d
    }
}

/// How a factor vanishes on the geodesic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Vanishing {
    /// `f(s_gamma) != 0`
    NotVanishing,
    /// all derivatives below this even order vanish at `s_gamma`
    Order(u32),
    /// identically zero
    Infinite,
}

/// Periodic shape functions used by sampled factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trig {
    Cos(u32),
    Sin(u32),
}

impl Trig {
    fn eval(self, x: f64) -> f64 {
        match self {
            Trig::Cos(k) => (k as f64 * x).cos(),
            Trig::Sin(k) => (k as f64 * x).sin(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum FactorShape {
    Zero,
    Constant {
        value: f64,
    },
    /// `amplitude * sin((s - s_gamma) / 2a)^N`
    Flat {
        order: u32,
        amplitude: f64,
    },
    /// Flat profile times `1 + coupling cos(phi)`; breaks rotation invariance.
    FlatCoupled {
        order: u32,
        amplitude: f64,
        coupling: f64,
    },
    /// `sin((s - s_gamma)/2a)^N * sum_i c_i (1 + trig_i / 2) / 2`.
    Series {
        order: u32,
        terms: Vec<(f64, Trig)>,
    },
}

/// Nonnegative conformal factor `f`, with its vanishing data on the geodesic `s = s_gamma`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConformalFactor {
    pub shape: FactorShape,
    pub gamma_location: f64,
    /// `a` in `(s - s_gamma) / a`; the surface's `L_s / 2 pi`
    pub scale: f64,
}

impl ConformalFactor {
    pub fn zero() -> Self {
        ConformalFactor {
            shape: FactorShape::Zero,
            gamma_location: 0.0,
            scale: 1.0,
        }
    }

    pub fn constant(value: f64) -> Result<Self> {
        if !(value >= 0.0) {
            return Err(Error::InvalidFactor(format!("constant {value} < 0")));
        }
        Ok(ConformalFactor {
            shape: FactorShape::Constant { value },
            gamma_location: 0.0,
            scale: 1.0,
        })
    }

    /// Generic constructor for shapes anchored at `s_gamma`.
    pub fn anchored(surface: &SurfaceOfRevolution, s_gamma: f64, shape: FactorShape) -> Result<Self> {
        match &shape {
            FactorShape::Flat { order, amplitude } | FactorShape::FlatCoupled { order, amplitude, .. } => {
                check_order(*order)?;
                if !(*amplitude > 0.0) {
                    return Err(Error::InvalidFactor(format!("amplitude {amplitude} <= 0")));
                }
                if let FactorShape::FlatCoupled { coupling, .. } = &shape {
                    if !(coupling.abs() < 1.0) {
                        return Err(Error::InvalidFactor(format!(
                            "|coupling| = {} must be < 1 to keep f >= 0",
                            coupling.abs()
                        )));
                    }
                }
            }
            FactorShape::Series { order, terms } => {
                check_order(*order)?;
                if terms.iter().any(|(c, _)| !(*c >= 0.0)) {
                    return Err(Error::InvalidFactor("negative series coefficient".into()));
                }
                if terms.iter().all(|(c, _)| *c == 0.0) {
                    return Err(Error::InvalidFactor("series factor is identically zero".into()));
                }
            }
            FactorShape::Constant { value } => {
                if !(*value >= 0.0) {
                    return Err(Error::InvalidFactor(format!("constant {value} < 0")));
                }
            }
            FactorShape::Zero => {}
        }
        Ok(ConformalFactor {
            shape,
            gamma_location: s_gamma,
            scale: surface.transverse_scale(),
        })
    }

    pub fn vanishing(&self) -> Vanishing {
        match &self.shape {
            FactorShape::Zero => Vanishing::Infinite,
            FactorShape::Constant { value } if *value == 0.0 => Vanishing::Infinite,
            FactorShape::Constant { .. } => Vanishing::NotVanishing,
            FactorShape::Flat { order, .. }
            | FactorShape::FlatCoupled { order, .. }
            | FactorShape::Series { order, .. } => Vanishing::Order(*order),
        }
    }

    pub fn is_separable(&self) -> bool {
        !matches!(self.shape, FactorShape::FlatCoupled { .. })
    }

    pub fn is_identically_zero(&self) -> bool {
        self.vanishing() == Vanishing::Infinite
    }

    /// `sin(x / 2)^N` with `x = (s - s_gamma) / a`, i.e. `((1 - cos x) / 2)^(N/2)`.
    fn flat_profile(&self, s: f64, order: u32) -> f64 {
        let x = (s - self.gamma_location) / self.scale;
        (0.5 * (1.0 - x.cos())).powi(order as i32 / 2)
    }

    pub fn value(&self, s: f64, phi: f64) -> f64 {
        match &self.shape {
            FactorShape::Zero => 0.0,
            FactorShape::Constant { value } => *value,
            FactorShape::Flat { order, amplitude } => amplitude * self.flat_profile(s, *order),
            FactorShape::FlatCoupled {
                order,
                amplitude,
                coupling,
            } => amplitude * self.flat_profile(s, *order) * (1.0 + coupling * phi.cos()),
            FactorShape::Series { order, terms } => {
                let x = (s - self.gamma_location) / self.scale;
                let base = self.flat_profile(s, *order);
                base * terms
                    .iter()
                    .map(|(c, trig)| c * 0.5 * (1.0 + 0.5 * trig.eval(x)))
                    .sum::<f64>()
            }
        }
    }

    /// Value of a rotation-invariant factor; `phi` is irrelevant.
    pub fn value_s(&self, s: f64) -> f64 {
        self.value(s, 0.0)
    }

    /// Upper bound on `f` (exact for the closed-form shapes).
    pub fn max_value(&self) -> f64 {
        match &self.shape {
            FactorShape::Zero => 0.0,
            FactorShape::Constant { value } => *value,
            FactorShape::Flat { amplitude, .. } => *amplitude,
            FactorShape::FlatCoupled {
                amplitude, coupling, ..
            } => amplitude * (1.0 + coupling.abs()),
            FactorShape::Series { terms, .. } => terms.iter().map(|(c, _)| 0.75 * c).sum(),
        }
    }

    /// Cone test `f(s, phi) >= c d(s, gamma)^N` on an `n_s x n_phi` grid; returns the
    /// largest admissible `c` when it is positive. `d` is the profile distance to `gamma`.
    pub fn cone_certificate(&self, surface: &SurfaceOfRevolution, n_s: usize, n_phi: usize) -> Option<f64> {
        let Vanishing::Order(order) = self.vanishing() else {
            return None;
        };
        let l = surface.profile_period();
        let mut best = f64::INFINITY;
        for i in 0..n_s {
            let s = l * i as f64 / n_s as f64;
            let d = surface.wrapped_offset(s, self.gamma_location).abs();
            if d < 1e-12 * l {
                continue;
            }
            let dn = d.powi(order as i32);
            for j in 0..n_phi.max(1) {
                let phi = 2.0 * PI * j as f64 / n_phi.max(1) as f64;
                best = best.min(self.value(s, phi) / dn);
            }
        }
        (best > 0.0 && best.is_finite()).then_some(best)
    }
}

fn check_order(order: u32) -> Result<()> {
    if order < 2 || !order.is_multiple_of(2) {
        return Err(Error::InvalidFactor(format!(
            "vanishing order must be even and >= 2, got {order}"
        )));
    }
    Ok(())
}

/// Flat factor `amplitude ((1 - cos((s - s_gamma)/a)) / 2)^(N/2)` on the outer equator.
pub fn make_flat_factor(surface: &SurfaceOfRevolution, order: u32, amplitude: f64) -> Result<ConformalFactor> {
    ConformalFactor::anchored(surface, surface.outer_equator(), FactorShape::Flat { order, amplitude })
}

/// The symmetry-broken factor `flat(s) (1 + coupling cos phi)`.
pub fn make_coupled_factor(
    surface: &SurfaceOfRevolution,
    order: u32,
    amplitude: f64,
    coupling: f64,
) -> Result<ConformalFactor> {
    ConformalFactor::anchored(
        surface,
        surface.outer_equator(),
        FactorShape::FlatCoupled {
            order,
            amplitude,
            coupling,
        },
    )
}

/// The deformation `g_t = exp(-t f) g0` sampled on a grid of `t` in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConformalFamily {
    pub base: SurfaceOfRevolution,
    pub factor: ConformalFactor,
    t_grid: Vec<f64>,
}

impl ConformalFamily {
    pub fn new(base: SurfaceOfRevolution, factor: ConformalFactor, t_grid: Vec<f64>) -> Result<Self> {
        let ok = t_grid.len() >= 2
            && t_grid[0] == 0.0
            && *t_grid.last().unwrap() == 1.0
            && t_grid.windows(2).all(|w| w[1] > w[0]);
        if !ok {
            return Err(Error::InvalidArgument(
                "t grid must be strictly increasing from 0 to 1".into(),
            ));
        }
        Ok(ConformalFamily { base, factor, t_grid })
    }

    /// Uniform grid with `points` values including both endpoints.
    pub fn uniform(base: SurfaceOfRevolution, factor: ConformalFactor, points: usize) -> Result<Self> {
        Self::new(base, factor, uniform_grid(points))
    }

    pub fn t_grid(&self) -> &[f64] {
        &self.t_grid
    }

    pub fn with_t_grid(&self, t_grid: Vec<f64>) -> Result<Self> {
        Self::new(self.base.clone(), self.factor.clone(), t_grid)
    }
}

pub fn uniform_grid(points: usize) -> Vec<f64> {
    let points = points.max(2);
    (0..points)
        .map(|k| {
            if k + 1 == points {
                1.0
            } else {
                k as f64 / (points - 1) as f64
            }
        })
        .collect()
}

/// Density of `dx_t = r exp(-t f) ds dphi`.
pub fn area_element(family: &ConformalFamily, t: f64, s: f64, phi: f64) -> f64 {
    family.base.radius(s) * (-t * family.factor.value(s, phi)).exp()
}

/// Total area of `g_t` by the periodic trapezoidal rule.
pub fn total_area(family: &ConformalFamily, t: f64, n_s: usize, n_phi: usize) -> f64 {
    let l = family.base.profile_period();
    let hs = l / n_s as f64;
    let hp = 2.0 * PI / n_phi as f64;
    let mut sum = 0.0;
    for i in 0..n_s {
        let s = i as f64 * hs;
        for j in 0..n_phi {
            sum += area_element(family, t, s, j as f64 * hp);
        }
    }
    sum * hs * hp
}
