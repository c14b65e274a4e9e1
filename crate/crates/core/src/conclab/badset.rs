//! Bad sets `Y_eps^m = {t : some mode in I_m has mass >= eps q_m}` as t-grid fractions,
//! against `K l_m / (eps q_m)`.
//!
//! `K_explicit = max_m 2 N_m / (lambda_m - l_m)` comes from the sojourn argument: a bad
//! branch climbs at rate `mu M >= (lambda_m - l_m) eps q_m`, so each of the `N_m` branches
//! that can reach the window spends at most `2 l_m / ((lambda_m - l_m) eps q_m)` in it.
//! `K_fit` is the smallest constant covering every row and `K_lsq` the least-squares one.

use std::fmt;

use serde::{Serialize, Serializer};

use super::{ConcentrationReport, IntervalScheme};

pub const DEFAULT_EPSILONS: [f64; 3] = [1.0, 0.3, 0.1];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Within,
    Exceeded,
    HypothesesViolated,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Within => "within",
            Verdict::Exceeded => "exceeded",
            Verdict::HypothesesViolated => "hypotheses violated (f not in cone)",
        })
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BadSetRow {
    pub m: u32,
    pub epsilon: f64,
    /// grid fraction of `Y_eps^m`
    pub measured: f64,
    /// `l_m / (eps q_m)`
    pub scale: f64,
    /// `K_explicit * scale`
    pub bound: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct BadSetAudit {
    pub rows: Vec<BadSetRow>,
    pub k_explicit: f64,
    pub k_fit: f64,
    pub k_lsq: f64,
    pub in_cone: bool,
    /// `Y_eps'^m` inside `Y_eps^m` for every `eps < eps'`, on the grid indicators
    pub monotone_in_epsilon: bool,
    /// `(eps, 1 - |{t : sup-mass >= eps q_m for some m}|)`
    pub good_set: Vec<(f64, f64)>,
}

/// Grid indicator of `Y_eps^m`.
pub fn bad_indicator(report: &ConcentrationReport, m: u32, threshold: f64) -> Vec<bool> {
    report.samples_for(m).map(|s| s.sup_mass >= threshold).collect()
}

/// Fraction of the grid where no window from `m0` on holds a mode of mass `>= eps q_m`.
pub fn good_set_estimate(report: &ConcentrationReport, scheme: &IntervalScheme, epsilon: f64, m0: u32) -> f64 {
    let n = report.t_grid.len();
    let mut bad = vec![false; n];
    for iv in scheme.intervals.iter().filter(|iv| iv.m >= m0) {
        for (k, b) in bad_indicator(report, iv.m, epsilon * iv.q).into_iter().enumerate() {
            bad[k] |= b;
        }
    }
    1.0 - bad.iter().filter(|b| **b).count() as f64 / n as f64
}

pub fn bad_set_audit(report: &ConcentrationReport, scheme: &IntervalScheme, epsilons: &[f64]) -> BadSetAudit {
    let n = report.t_grid.len() as f64;
    let in_cone = report.cone_constant.is_some();
    let k_explicit = scheme
        .intervals
        .iter()
        .map(|iv| {
            let visiting = report.visiting_branches(iv.m).unwrap_or(0) as f64;
            2.0 * visiting / iv.lo()
        })
        .fold(0.0, f64::max);

    let mut eps_sorted = epsilons.to_vec();
    eps_sorted.sort_by(f64::total_cmp);
    let mut rows = Vec::new();
    let mut monotone = true;
    for iv in &scheme.intervals {
        let indicators: Vec<Vec<bool>> = eps_sorted
            .iter()
            .map(|e| bad_indicator(report, iv.m, e * iv.q))
            .collect();
        for w in indicators.windows(2) {
            monotone &= w[1].iter().zip(&w[0]).all(|(big, small)| !big || *small);
        }
        for &epsilon in epsilons {
            let k = eps_sorted.iter().position(|e| *e == epsilon).unwrap_or(0);
            let measured = indicators[k].iter().filter(|b| **b).count() as f64 / n;
            let scale = iv.half_width / (epsilon * iv.q);
            let bound = k_explicit * scale;
            let verdict = if !in_cone {
                Verdict::HypothesesViolated
            } else if measured <= bound {
                Verdict::Within
            } else {
                Verdict::Exceeded
            };
            rows.push(BadSetRow {
                m: iv.m,
                epsilon,
                measured,
                scale,
                bound,
                verdict,
            });
        }
    }
    let k_fit = rows.iter().map(|r| r.measured / r.scale).fold(0.0, f64::max);
    let sxx: f64 = rows.iter().map(|r| r.scale * r.scale).sum();
    let sxy: f64 = rows.iter().map(|r| r.scale * r.measured).sum();
    let k_lsq = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let m0 = scheme.intervals.first().map_or(0, |iv| iv.m);
    let good_set = epsilons
        .iter()
        .map(|&e| (e, good_set_estimate(report, scheme, e, m0)))
        .collect();
    BadSetAudit {
        rows,
        k_explicit,
        k_fit,
        k_lsq,
        in_cone,
        monotone_in_epsilon: monotone,
        good_set,
    }
}
