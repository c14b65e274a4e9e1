//! Discretizations of `Delta_t` on a surface of revolution and their eigenproblems.
//!
//! Rotation-invariant factors split into angular sectors, each a periodic
//! Sturm-Liouville problem in `s`; factors depending on `phi` use the full
//! `(s, phi)` grid. Both produce a pencil `A v = mu W v` with `W` the discrete
//! area `r exp(-t f)`, so eigenvectors are normalized in `dx_t`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{Pencil, RawPair};

pub mod coupled;
pub mod global;
pub mod sector;
pub mod window;

pub use coupled::{assemble_coupled, CoupledOperator, COUPLED_BUDGET};
pub use global::{global_spectrum, GlobalSpectrum, CUTOFF_TOLERANCE};
pub use sector::{assemble_sector, assemble_sector_symbol, discrete_symbol, solve_sector, SectorOperator};
pub use window::{count_in_window, eigs_in_window, separable_window, SectorHit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Separable(u32),
    Coupled,
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Backend::Separable(n) => write!(f, "separable({n})"),
            Backend::Coupled => write!(f, "coupled"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Cos,
    Sin,
}

/// Sector `n`, index `k` within the sector, and the angular partner for `n >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ModeLabel {
    pub n: u32,
    pub k: usize,
    pub parity: Parity,
}

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub mu: f64,
    /// grid values in natural order, `sum v^2 W = 1`
    pub vector: Vec<f64>,
    /// `||A v - mu W v|| / ||W v||`
    pub residual: f64,
}

impl From<RawPair> for EigenPair {
    fn from(p: RawPair) -> Self {
        EigenPair {
            mu: p.mu,
            vector: p.vector,
            residual: p.residual,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EigenSolution {
    pub t: f64,
    pub backend: Backend,
    /// ascending
    pub pairs: Vec<EigenPair>,
    pub n_s: usize,
    pub n_phi: usize,
    /// inertia difference for windowed solves
    pub certified_count: Option<usize>,
}

impl EigenSolution {
    pub fn values(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.mu).collect()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// `[center - half_width, center + half_width]`
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralWindow {
    pub center: f64,
    pub half_width: f64,
}

impl SpectralWindow {
    pub fn new(center: f64, half_width: f64) -> Result<Self> {
        if !(half_width > 0.0) || !center.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "window needs a finite center and positive half width, got {center} +- {half_width}"
            )));
        }
        Ok(SpectralWindow { center, half_width })
    }

    pub fn from_bounds(lo: f64, hi: f64) -> Result<Self> {
        Self::new(0.5 * (lo + hi), 0.5 * (hi - lo))
    }

    pub fn lo(&self) -> f64 {
        self.center - self.half_width
    }

    pub fn hi(&self) -> f64 {
        self.center + self.half_width
    }

    pub fn contains(&self, mu: f64) -> bool {
        mu >= self.lo() && mu <= self.hi()
    }
}

/// Common view of the two discretizations.
pub trait Discretization: Sync {
    fn pencil(&self) -> &Pencil;
    fn t(&self) -> f64;
    fn backend(&self) -> Backend;
    /// `(n_s, n_phi)`; `n_phi = 1` for a sector
    fn grid(&self) -> (usize, usize);
    /// Conformal factor at the grid nodes, natural order.
    fn factor_values(&self) -> &[f64];
    /// `W`, natural order.
    fn weights(&self) -> &[f64];

    /// `int f |v|^2 dx_t`
    fn mass(&self, v: &[f64]) -> f64 {
        v.iter()
            .zip(self.factor_values())
            .zip(self.weights())
            .map(|((v, f), w)| f * v * v * w)
            .sum()
    }

    /// `int |v|^2 dx_t`
    fn norm_sq(&self, v: &[f64]) -> f64 {
        v.iter().zip(self.weights()).map(|(v, w)| v * v * w).sum()
    }

    /// `int u v dx_t`
    fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        u.iter().zip(v).zip(self.weights()).map(|((u, v), w)| u * v * w).sum()
    }

    /// `||(Delta_t - lambda) u||` in `L^2(dx_t)`.
    fn defect(&self, lambda: f64, u: &[f64]) -> f64 {
        let au = self.pencil().apply(u);
        au.iter()
            .zip(u)
            .zip(self.weights())
            .map(|((a, u), w)| (a - lambda * w * u).powi(2) / w)
            .sum::<f64>()
            .sqrt()
    }
}

pub(crate) fn into_solution(
    op: &dyn Discretization,
    pairs: Vec<RawPair>,
    certified_count: Option<usize>,
) -> EigenSolution {
    let (n_s, n_phi) = op.grid();
    EigenSolution {
        t: op.t(),
        backend: op.backend(),
        pairs: pairs.into_iter().map(EigenPair::from).collect(),
        n_s,
        n_phi,
        certified_count,
    }
}
