//! Windows `I_m = [lambda_m - l_m, lambda_m + l_m]` fixed for all `t`, and the scale `q_m`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::Resolution;
use crate::beams::{measure_defect_on, GaussianBeam};
use crate::error::{Error, Result};
use crate::spectral::{
    assemble_coupled, assemble_sector, assemble_sector_symbol, discrete_symbol, solve_sector, Discretization,
    SpectralWindow,
};
use crate::stats::median;
use crate::surface::{ConformalFactor, ConformalFamily};

/// Deformation parameters at which defects are probed.
pub const PROBE_TIMES: [f64; 3] = [0.0, 0.5, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum Provenance {
    /// `l_m = c max_t C_m(t)` for the Gaussian beam
    BeamDefect {
        c: f64,
    },
    /// extremes of the sector ground branch, padded
    Envelope {
        pad: f64,
    },
    /// `l_m = c max_t C_m(t)` for the exact `t = 0` sector ground state
    ModeDefect {
        c: f64,
    },
    Manual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QRule {
    /// `q_m = m^(-1/2)`
    InverseSqrt,
    /// `q_m = sqrt(median mass of the generating mode over the probe times)`
    MedianMass,
}

#[derive(Debug, Clone, Serialize)]
pub struct SchemeInterval {
    pub m: u32,
    pub lambda: f64,
    pub half_width: f64,
    pub q: f64,
    /// `(t, defect)` at the probe times; empty for envelope and manual windows
    pub probes: Vec<(f64, f64)>,
    /// mass of the generating mode at the probe times
    pub reference_mass: Vec<f64>,
}

impl SchemeInterval {
    pub fn lo(&self) -> f64 {
        self.lambda - self.half_width
    }

    pub fn hi(&self) -> f64 {
        self.lambda + self.half_width
    }

    pub fn window(&self) -> Result<SpectralWindow> {
        SpectralWindow::new(self.lambda, self.half_width)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summability {
    pub sum_l: f64,
    pub sum_l_over_q: f64,
    /// `l_m / q_m` decreasing over the last half of the range
    pub tail_decreasing: bool,
    pub q_decreasing: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct IntervalScheme {
    pub provenance: Provenance,
    pub q_rule: QRule,
    pub intervals: Vec<SchemeInterval>,
}

impl IntervalScheme {
    /// Windows given directly as `(m, lambda_m, l_m)`.
    pub fn manual(entries: &[(u32, f64, f64)], q_rule: QRule) -> Result<Self> {
        if q_rule != QRule::InverseSqrt {
            return Err(Error::InvalidArgument("manual windows carry no masses for q_m".into()));
        }
        let intervals = entries
            .iter()
            .map(|&(m, lambda, l)| {
                check_entry(m, lambda, l)?;
                Ok(SchemeInterval {
                    m,
                    lambda,
                    half_width: l,
                    q: inverse_sqrt(m),
                    probes: Vec::new(),
                    reference_mass: Vec::new(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(IntervalScheme {
            provenance: Provenance::Manual,
            q_rule,
            intervals,
        })
    }

    pub fn ms(&self) -> Vec<u32> {
        self.intervals.iter().map(|i| i.m).collect()
    }

    pub fn interval(&self, m: u32) -> Option<&SchemeInterval> {
        self.intervals.iter().find(|i| i.m == m)
    }

    /// Every `step`-th window, for extracting a summable subsequence.
    pub fn thinned(&self, step: usize) -> Self {
        IntervalScheme {
            provenance: self.provenance,
            q_rule: self.q_rule,
            intervals: self.intervals.iter().step_by(step.max(1)).cloned().collect(),
        }
    }

    pub fn summability(&self) -> Summability {
        let ratio: Vec<f64> = self.intervals.iter().map(|i| i.half_width / i.q).collect();
        let tail = &ratio[ratio.len() / 2..];
        Summability {
            sum_l: self.intervals.iter().map(|i| i.half_width).sum(),
            sum_l_over_q: ratio.iter().sum(),
            tail_decreasing: tail.windows(2).all(|w| w[1] < w[0]),
            q_decreasing: self.intervals.windows(2).all(|w| w[1].q < w[0].q),
        }
    }
}

fn inverse_sqrt(m: u32) -> f64 {
    (m as f64).powf(-0.5)
}

fn check_entry(m: u32, lambda: f64, l: f64) -> Result<()> {
    if m == 0 || !(l > 0.0) || !(lambda - l > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "window m = {m}: lambda = {lambda}, l = {l} must give 0 < lambda - l and l > 0"
        )));
    }
    Ok(())
}

fn q_value(rule: QRule, m: u32, masses: &[f64]) -> f64 {
    match rule {
        QRule::InverseSqrt => inverse_sqrt(m),
        QRule::MedianMass => median(masses).max(0.0).sqrt(),
    }
}

/// `(m, lambda_m, l_m, probes, reference masses)`
type Row = (u32, f64, f64, Vec<(f64, f64)>, Vec<f64>);

fn assemble(provenance: Provenance, q_rule: QRule, rows: Vec<Row>) -> Result<IntervalScheme> {
    let mut intervals = Vec::with_capacity(rows.len());
    for (m, lambda, l, probes, reference_mass) in rows {
        check_entry(m, lambda, l)?;
        let q = q_value(q_rule, m, &reference_mass);
        if !(q > 0.0) {
            return Err(Error::InvalidArgument(format!("q_{m} = {q} is not positive")));
        }
        intervals.push(SchemeInterval {
            m,
            lambda,
            half_width: l,
            q,
            probes,
            reference_mass,
        });
    }
    Ok(IntervalScheme {
        provenance,
        q_rule,
        intervals,
    })
}

fn check_safety(c: f64) -> Result<()> {
    if !(c >= 1.0) {
        return Err(Error::InvalidArgument(format!("safety factor {c} < 1")));
    }
    Ok(())
}

/// Beam windows `lambda_m +- c max_t C_m(t)` on sector `m`.
pub fn build_beam_scheme(
    family: &ConformalFamily,
    beams: &[GaussianBeam],
    c: f64,
    q_rule: QRule,
    n_s: usize,
) -> Result<IntervalScheme> {
    check_safety(c)?;
    let mut rows = Vec::new();
    for beam in beams {
        let mut probes = Vec::new();
        let mut masses = Vec::new();
        for t in PROBE_TIMES {
            let op = assemble_sector(family, beam.m, t, n_s)?;
            let d = measure_defect_on(beam, family, &op)?;
            probes.push((t, d.c_m));
            masses.push(op.mass(&beam.sample(family, &op)));
        }
        let l = c * probes.iter().map(|p| p.1).fold(0.0, f64::max);
        rows.push((beam.m, beam.lambda_m, l, probes, masses));
    }
    assemble(Provenance::BeamDefect { c }, q_rule, rows)
}

/// Windows spanning the sector-`m` ground branch from `t = 0` to `t = 1`; every
/// branch increases, so the window holds it for all `t`.
pub fn build_envelope_scheme(
    family: &ConformalFamily,
    ms: &[u32],
    pad: f64,
    q_rule: QRule,
    n_s: usize,
) -> Result<IntervalScheme> {
    if !(pad > 0.0) {
        return Err(Error::InvalidArgument(format!("pad {pad} must be positive")));
    }
    let mut rows = Vec::new();
    for &m in ms {
        let mut ends = Vec::new();
        let mut masses = Vec::new();
        for t in PROBE_TIMES {
            let op = assemble_sector(family, m, t, n_s)?;
            let pair = solve_sector(&op, 1)?.pairs.remove(0);
            masses.push(op.mass(&pair.vector));
            ends.push(pair.mu);
        }
        let (lo, hi) = (ends[0], ends[PROBE_TIMES.len() - 1]);
        rows.push((m, 0.5 * (lo + hi), 0.5 * (hi - lo) + pad, Vec::new(), masses));
    }
    assemble(Provenance::Envelope { pad }, q_rule, rows)
}

/// Windows around the exact `t = 0` sector-`m` ground state, widened by `c` times its
/// largest defect along the family. For a coupled grid the state is lifted as
/// `v(s) cos(m phi)` with the grid's own angular symbol, so it is exact at `t = 0`.
pub fn build_mode_defect_scheme(
    family: &ConformalFamily,
    ms: &[u32],
    c: f64,
    q_rule: QRule,
    resolution: Resolution,
) -> Result<IntervalScheme> {
    check_safety(c)?;
    let reference = ConformalFamily::new(family.base.clone(), ConformalFactor::zero(), vec![0.0, 1.0])?;
    let mut rows = Vec::new();
    for &m in ms {
        let n_s = resolution.n_s();
        let symbol = match resolution {
            Resolution::Separable { .. } => (m as f64).powi(2),
            Resolution::Coupled { n_phi, .. } => discrete_symbol(m, n_phi),
        };
        let op0 = assemble_sector_symbol(&reference, m, symbol, 0.0, n_s)?;
        let ground = solve_sector(&op0, 1)?.pairs.remove(0);
        let lambda = ground.mu;
        let mut probes = Vec::new();
        let mut masses = Vec::new();
        for t in PROBE_TIMES {
            let (defect, mass) = match resolution {
                Resolution::Separable { n_s } => {
                    let op = assemble_sector(family, m, t, n_s)?;
                    let u = normalized(&op, ground.vector.clone());
                    (op.defect(lambda, &u), op.mass(&u))
                }
                Resolution::Coupled { n_s, n_phi } => {
                    let op = assemble_coupled(family, t, n_s, n_phi)?;
                    let mut u = vec![0.0; n_s * n_phi];
                    for (i, v) in ground.vector.iter().enumerate() {
                        for j in 0..n_phi {
                            let phi = 2.0 * PI * j as f64 / n_phi as f64;
                            u[op.index(i, j)] = v * (m as f64 * phi).cos();
                        }
                    }
                    let u = normalized(&op, u);
                    (op.defect(lambda, &u), op.mass(&u))
                }
            };
            probes.push((t, defect));
            masses.push(mass);
        }
        let l = c * probes.iter().map(|p| p.1).fold(0.0, f64::max);
        rows.push((m, lambda, l, probes, masses));
    }
    assemble(Provenance::ModeDefect { c }, q_rule, rows)
}

fn normalized(op: &dyn Discretization, mut u: Vec<f64>) -> Vec<f64> {
    let norm = op.norm_sq(&u).sqrt();
    u.iter_mut().for_each(|v| *v /= norm);
    u
}
