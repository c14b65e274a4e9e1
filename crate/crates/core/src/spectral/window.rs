//! Eigenpairs inside a window, certified by inertia counts.

use rayon::prelude::*;

use super::{assemble_sector, into_solution, Discretization, EigenPair, EigenSolution, SpectralWindow};
use crate::error::{Error, Result};
use crate::surface::ConformalFamily;

/// Every eigenpair in the window; `certified_count` is the inertia difference.
pub fn eigs_in_window(op: &dyn Discretization, window: &SpectralWindow) -> Result<EigenSolution> {
    check_positive(window)?;
    let (pairs, count) = op.pencil().in_interval_certified(window.lo(), window.hi())?;
    Ok(into_solution(op, pairs, Some(count)))
}

/// Number of eigenvalues in the window, without eigenvectors.
pub fn count_in_window(op: &dyn Discretization, window: &SpectralWindow) -> Result<usize> {
    check_positive(window)?;
    op.pencil().count_in(window.lo(), window.hi())
}

fn check_positive(window: &SpectralWindow) -> Result<()> {
    if window.lo() <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "window [{}, {}] must lie above zero",
            window.lo(),
            window.hi()
        )));
    }
    Ok(())
}

/// An eigenpair of sector `n`; for `n >= 1` it stands for the cosine and sine modes.
#[derive(Debug, Clone)]
pub struct SectorHit {
    pub n: u32,
    pub multiplicity: usize,
    pub pair: EigenPair,
    pub mass: f64,
}

/// All eigenpairs of a rotation-invariant family in the window, over every sector
/// that can reach it (`n^2 / r_max^2 <= hi`).
pub fn separable_window(
    family: &ConformalFamily,
    t: f64,
    n_s: usize,
    window: &SpectralWindow,
) -> Result<Vec<SectorHit>> {
    check_positive(window)?;
    let (_, r_max) = family.base.radius_range();
    let n_max = (window.hi().sqrt() * r_max).floor() as u32;
    let per_sector: Vec<Result<Vec<SectorHit>>> = (0..=n_max)
        .into_par_iter()
        .map(|n| {
            let op = assemble_sector(family, n, t, n_s)?;
            if count_in_window(&op, window)? == 0 {
                return Ok(Vec::new());
            }
            let sol = eigs_in_window(&op, window)?;
            Ok(sol
                .pairs
                .into_iter()
                .map(|pair| SectorHit {
                    n,
                    multiplicity: if n == 0 { 1 } else { 2 },
                    mass: op.mass(&pair.vector),
                    pair,
                })
                .collect())
        })
        .collect();
    let mut hits = Vec::new();
    for r in per_sector {
        hits.extend(r?);
    }
    Ok(hits)
}
