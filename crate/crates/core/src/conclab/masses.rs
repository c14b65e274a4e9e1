//! Masses `int f |phi|^2 dx_t` of every exact mode in each window, over the t-grid.

use rayon::prelude::*;
use serde::Serialize;

use super::{count_below, IntervalScheme, Resolution};
use crate::error::{Error, Result};
use crate::spectral::{assemble_coupled, eigs_in_window, separable_window, Discretization};
use crate::surface::ConformalFamily;

/// Grid used for the cone test of the factor.
const CONE_GRID: (usize, usize) = (1024, 64);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeMass {
    pub mu: f64,
    pub mass: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MassSample {
    pub m: u32,
    pub t: f64,
    /// every eigenvalue in `I_m`, with multiplicity, ascending
    pub modes: Vec<ModeMass>,
    pub sup_mass: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConcentrationReport {
    pub resolution: Resolution,
    pub t_grid: Vec<f64>,
    /// sorted by `(m, t)`
    pub samples: Vec<MassSample>,
    /// `(m, N_m)`: branches that can visit `I_m`, i.e. `#{mu(0) <= hi} - #{mu(1) < lo}`
    pub visiting: Vec<(u32, usize)>,
    /// largest `c` with `f >= c d^N` on the test grid, if any
    pub cone_constant: Option<f64>,
}

impl ConcentrationReport {
    pub fn samples_for(&self, m: u32) -> impl Iterator<Item = &MassSample> {
        self.samples.iter().filter(move |s| s.m == m)
    }

    pub fn sup_masses(&self, m: u32) -> Vec<f64> {
        self.samples_for(m).map(|s| s.sup_mass).collect()
    }

    pub fn visiting_branches(&self, m: u32) -> Option<usize> {
        self.visiting.iter().find(|v| v.0 == m).map(|v| v.1)
    }
}

/// Windowed solve at every `(m, t)`; a window without eigenvalues invalidates the scheme.
pub fn measure_masses(
    scheme: &IntervalScheme,
    family: &ConformalFamily,
    resolution: Resolution,
) -> Result<ConcentrationReport> {
    if let Resolution::Separable { .. } = resolution {
        if !family.factor.is_separable() {
            return Err(Error::CoupledFactor);
        }
    }
    let t_grid = family.t_grid().to_vec();
    let jobs: Vec<(usize, usize)> = (0..scheme.intervals.len())
        .flat_map(|a| (0..t_grid.len()).map(move |b| (a, b)))
        .collect();
    let samples: Vec<Result<MassSample>> = jobs
        .par_iter()
        .map(|&(a, b)| {
            let iv = &scheme.intervals[a];
            let t = t_grid[b];
            let window = iv.window()?;
            let mut modes = match resolution {
                Resolution::Separable { n_s } => {
                    let mut out = Vec::new();
                    for hit in separable_window(family, t, n_s, &window)? {
                        for _ in 0..hit.multiplicity {
                            out.push(ModeMass {
                                mu: hit.pair.mu,
                                mass: hit.mass,
                                residual: hit.pair.residual,
                            });
                        }
                    }
                    out
                }
                Resolution::Coupled { n_s, n_phi } => {
                    let op = assemble_coupled(family, t, n_s, n_phi)?;
                    eigs_in_window(&op, &window)?
                        .pairs
                        .iter()
                        .map(|p| ModeMass {
                            mu: p.mu,
                            mass: op.mass(&p.vector),
                            residual: p.residual,
                        })
                        .collect()
                }
            };
            if modes.is_empty() {
                return Err(Error::CaptureFailure {
                    m: iv.m,
                    t,
                    lo: iv.lo(),
                    hi: iv.hi(),
                });
            }
            modes.sort_by(|x, y| x.mu.total_cmp(&y.mu));
            let sup_mass = modes.iter().map(|x| x.mass).fold(f64::NEG_INFINITY, f64::max);
            Ok(MassSample {
                m: iv.m,
                t,
                modes,
                sup_mass,
            })
        })
        .collect();
    let samples = samples.into_iter().collect::<Result<Vec<_>>>()?;

    let visiting = scheme
        .intervals
        .par_iter()
        .map(|iv| {
            let above = count_below(family, 0.0, iv.hi(), resolution)?;
            let below = count_below(family, 1.0, iv.lo(), resolution)?;
            Ok((iv.m, above.saturating_sub(below)))
        })
        .collect::<Result<Vec<_>>>()?;

    let n_phi = if family.factor.is_separable() { 1 } else { CONE_GRID.1 };
    Ok(ConcentrationReport {
        resolution,
        t_grid,
        samples,
        visiting,
        cone_constant: family.factor.cone_certificate(&family.base, CONE_GRID.0, n_phi),
    })
}
