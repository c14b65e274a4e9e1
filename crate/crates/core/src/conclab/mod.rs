//! The concentration experiment: t-independent windows `I_m`, masses of every
//! exact mode inside them along the family, bad-set measures, and random factors.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::spectral::{assemble_coupled, assemble_sector, Discretization};
use crate::surface::ConformalFamily;

pub mod badset;
pub mod masses;
pub mod sampler;
pub mod scheme;

pub use badset::{bad_indicator, bad_set_audit, good_set_estimate, BadSetAudit, BadSetRow, Verdict, DEFAULT_EPSILONS};
pub use masses::{measure_masses, ConcentrationReport, MassSample, ModeMass};
pub use sampler::{sample_conformal_factor, CubeMeasureSpec, SampledFactor};
pub use scheme::{
    build_beam_scheme, build_envelope_scheme, build_mode_defect_scheme, IntervalScheme, Provenance, QRule,
    SchemeInterval, Summability, PROBE_TIMES,
};

/// Which discretization carries the experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Resolution {
    Separable { n_s: usize },
    Coupled { n_s: usize, n_phi: usize },
}

impl Resolution {
    pub fn n_s(&self) -> usize {
        match *self {
            Resolution::Separable { n_s } | Resolution::Coupled { n_s, .. } => n_s,
        }
    }
}

/// Number of eigenvalues of `Delta_t` (with multiplicity) below `sigma`.
pub fn count_below(family: &ConformalFamily, t: f64, sigma: f64, resolution: Resolution) -> Result<usize> {
    match resolution {
        Resolution::Separable { n_s } => {
            let (_, r_max) = family.base.radius_range();
            let n_max = (sigma.max(0.0).sqrt() * r_max).floor() as u32;
            let mut total = 0;
            for n in 0..=n_max {
                let op = assemble_sector(family, n, t, n_s)?;
                let c = op.count_below(sigma)?;
                total += if n == 0 { c } else { 2 * c };
            }
            Ok(total)
        }
        Resolution::Coupled { n_s, n_phi } => {
            let op = assemble_coupled(family, t, n_s, n_phi)?;
            op.pencil().count_below(sigma)
        }
    }
}
