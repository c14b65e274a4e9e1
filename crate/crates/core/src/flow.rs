//! Eigenvalue branches `mu_j(t)` along the conformal family: tables, the Hadamard
//! derivative check, monotonicity and the sojourn-time bound.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{assemble_sector, global_spectrum, GlobalSpectrum, ModeLabel};
use crate::surface::ConformalFamily;

/// Branches needed for a meaningful table.
pub const MIN_BRANCHES: usize = 30;
/// Default relative gap below which the derivative check refuses a branch.
pub const DEFAULT_GAP_FLOOR: f64 = 1e-3;
/// Relative slack for monotonicity, applied to `max(mu, 1)`.
pub const MONOTONE_TOLERANCE: f64 = 1e-9;
/// Relative slack for piecewise-linear grid effects in the sojourn check.
pub const SOJOURN_GRID_TOLERANCE: f64 = 1e-2;

#[derive(Debug, Clone, Serialize)]
pub struct BranchTable {
    pub t_grid: Vec<f64>,
    /// `mu[k][j]` is `mu_j(t_k)`, `j < j_max`, ascending in `j`
    pub mu: Vec<Vec<f64>>,
    /// `int f phi_j^2 dx_t`
    pub mass: Vec<Vec<f64>>,
    /// distance to the nearest other mode, ignoring the angular partner
    pub gap: Vec<Vec<f64>>,
    #[serde(skip)]
    pub labels: Vec<Vec<ModeLabel>>,
}

impl BranchTable {
    /// Table from raw values only (masses and gaps left empty).
    pub fn from_values(t_grid: Vec<f64>, mu: Vec<Vec<f64>>) -> Self {
        BranchTable {
            t_grid,
            mu,
            mass: Vec::new(),
            gap: Vec::new(),
            labels: Vec::new(),
        }
    }

    pub fn j_max(&self) -> usize {
        self.mu.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// `mu_j` over the grid.
    pub fn branch(&self, j: usize) -> Vec<f64> {
        self.mu.iter().map(|row| row[j]).collect()
    }

    pub fn branch_mass(&self, j: usize) -> Vec<f64> {
        self.mass.iter().map(|row| row[j]).collect()
    }
}

/// Sorted-index branches below `lambda_max` on the grid; `J_max` is the count at the
/// last grid point, which is the smallest since every eigenvalue increases.
pub fn build_branches(family: &ConformalFamily, lambda_max: f64, n_s: usize) -> Result<BranchTable> {
    let t_grid = family.t_grid().to_vec();
    let spectra: Vec<Result<GlobalSpectrum>> = t_grid
        .par_iter()
        .map(|&t| global_spectrum(family, t, lambda_max, n_s))
        .collect();
    let spectra: Vec<GlobalSpectrum> = spectra.into_iter().collect::<Result<_>>()?;
    let j_max = spectra.iter().map(GlobalSpectrum::len).min().unwrap_or(0);
    if j_max < MIN_BRANCHES {
        return Err(Error::InvalidArgument(format!(
            "cutoff {lambda_max} yields {j_max} branches, need at least {MIN_BRANCHES}"
        )));
    }
    let mut table = BranchTable {
        t_grid,
        mu: Vec::new(),
        mass: Vec::new(),
        gap: Vec::new(),
        labels: Vec::new(),
    };
    for g in &spectra {
        table.mu.push(g.values[..j_max].to_vec());
        table.mass.push(g.masses[..j_max].to_vec());
        table.gap.push((0..j_max).map(|j| g.gap(j)).collect());
        table.labels.push(g.labels[..j_max].to_vec());
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation {
    pub j: usize,
    pub k: usize,
    pub drop: f64,
}

/// Entries with `mu_j(t_{k+1}) < mu_j(t_k) - 1e-9 max(mu_j, 1)`.
pub fn monotonicity_audit(table: &BranchTable) -> Vec<Violation> {
    let mut out = Vec::new();
    for k in 0..table.mu.len().saturating_sub(1) {
        let (a, b) = (&table.mu[k], &table.mu[k + 1]);
        for j in 0..a.len().min(b.len()) {
            let tol = MONOTONE_TOLERANCE * a[j].abs().max(1.0);
            if b[j] < a[j] - tol {
                out.push(Violation {
                    j,
                    k,
                    drop: a[j] - b[j],
                });
            }
        }
    }
    out
}

/// Entries breaking `|mu_j(t_{k+1}) - mu_j(t_k)| <= mu_j(t_{k+1}) max f dt (1 + 1e-2)`.
pub fn lipschitz_audit(table: &BranchTable, max_f: f64) -> Vec<Violation> {
    let mut out = Vec::new();
    for k in 0..table.mu.len().saturating_sub(1) {
        let dt = table.t_grid[k + 1] - table.t_grid[k];
        for j in 0..table.j_max() {
            let (a, b) = (table.mu[k][j], table.mu[k + 1][j]);
            let bound = b.abs() * max_f * dt * (1.0 + 1e-2) + MONOTONE_TOLERANCE * b.abs().max(1.0);
            if (b - a).abs() > bound {
                out.push(Violation { j, k, drop: b - a });
            }
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct HadamardReport {
    pub j: usize,
    pub label: ModeLabel,
    pub t: f64,
    pub delta: f64,
    pub mu: f64,
    pub mass: f64,
    /// `mu M`
    pub predicted: f64,
    pub fd: f64,
    pub fd_half: f64,
    pub richardson: f64,
    pub residual: f64,
    pub residual_half: f64,
    pub residual_richardson: f64,
    /// `residual_richardson / max(mu, 1)`
    pub relative: f64,
}

/// Finite-difference probe of `mu_j'(t) = mu_j(t) int f phi_j^2 dx_t`.
#[derive(Debug, Clone)]
pub struct HadamardProbe<'a> {
    pub family: &'a ConformalFamily,
    pub lambda_max: f64,
    pub n_s: usize,
    pub gap_floor: f64,
}

impl<'a> HadamardProbe<'a> {
    pub fn new(family: &'a ConformalFamily, lambda_max: f64, n_s: usize) -> Self {
        HadamardProbe {
            family,
            lambda_max,
            n_s,
            gap_floor: DEFAULT_GAP_FLOOR,
        }
    }

    pub fn spectrum_at(&self, t: f64) -> Result<GlobalSpectrum> {
        global_spectrum(self.family, t, self.lambda_max, self.n_s)
    }

    pub fn check(&self, j: usize, t: f64, delta: f64) -> Result<HadamardReport> {
        self.check_on(&self.spectrum_at(t)?, j, delta)
    }

    /// Check branch `j` of a spectrum already computed at its `t`.
    pub fn check_on(&self, spec: &GlobalSpectrum, j: usize, delta: f64) -> Result<HadamardReport> {
        let t = spec.t;
        if j >= spec.len() {
            return Err(Error::InvalidArgument(format!("branch {j} above the cutoff")));
        }
        if !(delta > 0.0) || t - delta < 0.0 || t + delta > 1.0 {
            return Err(Error::InvalidArgument(format!(
                "t +- delta = {t} +- {delta} leaves [0, 1]"
            )));
        }
        let mu = spec.values[j];
        let gap = spec.gap(j);
        let floor = self.gap_floor * mu.abs();
        if !(gap > floor) {
            return Err(Error::NearCrossing { j, t, gap, floor });
        }
        let label = spec.labels[j];
        let branch = |tt: f64| -> Result<f64> {
            let op = assemble_sector(self.family, label.n, tt, self.n_s)?;
            Ok(op.eigenvalues()?[label.k])
        };
        let fd = (branch(t + delta)? - branch(t - delta)?) / (2.0 * delta);
        let h = 0.5 * delta;
        let fd_half = (branch(t + h)? - branch(t - h)?) / (2.0 * h);
        let richardson = (4.0 * fd_half - fd) / 3.0;
        let mass = spec.masses[j];
        let predicted = mu * mass;
        let residual_richardson = (richardson - predicted).abs();
        Ok(HadamardReport {
            j,
            label,
            t,
            delta,
            mu,
            mass,
            predicted,
            fd,
            fd_half,
            richardson,
            residual: (fd - predicted).abs(),
            residual_half: (fd_half - predicted).abs(),
            residual_richardson,
            relative: residual_richardson / mu.abs().max(1.0),
        })
    }

    /// Up to `count` branches at `t` that pass the gap guard, lowest first, skipping `mu = 0`.
    pub fn guarded_branches(&self, spec: &GlobalSpectrum, count: usize) -> Vec<usize> {
        (0..spec.len())
            .filter(|&j| spec.values[j] > 1e-8 && spec.gap(j) > self.gap_floor * spec.values[j])
            .take(count)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SojournVerdict {
    Within,
    Exceeded,
    HypothesisUnmet,
}

#[derive(Debug, Clone, Serialize)]
pub struct SojournReport {
    /// `|{t : F(t) in I}|` for the piecewise-linear interpolant
    pub measured: f64,
    /// `|I| / m_floor`
    pub bound: f64,
    /// smallest chord slope on the grid
    pub min_slope: f64,
    pub verdict: SojournVerdict,
}

/// Time spent by `F` in `[lo, hi]`, against the bound `|I| / m_floor` that holds when `F' >= m_floor`.
pub fn sojourn_measure(t_grid: &[f64], values: &[f64], lo: f64, hi: f64, m_floor: f64) -> SojournReport {
    let mut measured = 0.0;
    let mut min_slope = f64::INFINITY;
    for k in 0..t_grid.len().saturating_sub(1) {
        let (t0, t1) = (t_grid[k], t_grid[k + 1]);
        let (f0, f1) = (values[k], values[k + 1]);
        let dt = t1 - t0;
        min_slope = min_slope.min((f1 - f0) / dt);
        measured += if f1 == f0 {
            if f0 >= lo && f0 <= hi {
                dt
            } else {
                0.0
            }
        } else {
            // fraction of the segment where the line lies in [lo, hi]
            let (a, b) = ((lo - f0) / (f1 - f0), (hi - f0) / (f1 - f0));
            let (a, b) = (a.min(b).max(0.0), a.max(b).min(1.0));
            (b - a).max(0.0) * dt
        };
    }
    let bound = (hi - lo) / m_floor;
    let verdict = if !(m_floor > 0.0) || min_slope < m_floor * (1.0 - SOJOURN_GRID_TOLERANCE) {
        SojournVerdict::HypothesisUnmet
    } else if measured <= bound * (1.0 + SOJOURN_GRID_TOLERANCE) {
        SojournVerdict::Within
    } else {
        SojournVerdict::Exceeded
    };
    SojournReport {
        measured,
        bound,
        min_slope,
        verdict,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::solve_sector;
    use crate::surface::{make_flat_factor, uniform_grid, ConformalFactor, SurfaceOfRevolution};

    fn torus() -> SurfaceOfRevolution {
        SurfaceOfRevolution::torus(2.0, 1.0).unwrap()
    }

    #[test]
    fn zero_factor_gives_constant_branches() {
        let fam = ConformalFamily::uniform(torus(), ConformalFactor::zero(), 3).unwrap();
        let table = build_branches(&fam, 12.0, 128).unwrap();
        assert!(table.j_max() >= MIN_BRANCHES);
        for j in 0..table.j_max() {
            let b = table.branch(j);
            assert!(b.iter().all(|v| (v - b[0]).abs() <= 1e-12 * b[0].max(1.0)));
        }
    }

    #[test]
    fn constant_factor_rescales() {
        let c = 0.4;
        let fam = ConformalFamily::uniform(torus(), ConformalFactor::constant(c).unwrap(), 5).unwrap();
        let table = build_branches(&fam, 16.0, 128).unwrap();
        for k in 0..4 {
            let dt = table.t_grid[k + 1] - table.t_grid[k];
            for j in 1..table.j_max() {
                let ratio = table.mu[k + 1][j] / table.mu[k][j];
                assert!((ratio - (c * dt).exp()).abs() < 1e-8);
            }
        }
        assert!(monotonicity_audit(&table).is_empty());
        assert!(lipschitz_audit(&table, c).is_empty());
    }

    #[test]
    fn detector_flags_synthetic_drop() {
        let table = BranchTable::from_values(
            vec![0.0, 0.5, 1.0],
            vec![vec![1.0, 2.0], vec![1.1, 1.9], vec![1.2, 2.1]],
        );
        let v = monotonicity_audit(&table);
        assert_eq!(v.len(), 1);
        assert_eq!((v[0].j, v[0].k), (1, 0));
    }

    #[test]
    fn hadamard_constant_factor_closed_form() {
        let c = 0.3;
        let fam = ConformalFamily::uniform(torus(), ConformalFactor::constant(c).unwrap(), 2).unwrap();
        let probe = HadamardProbe::new(&fam, 10.0, 128);
        let spec = probe.spectrum_at(0.5).unwrap();
        for j in probe.guarded_branches(&spec, 5) {
            let r = probe.check_on(&spec, j, 1e-2).unwrap();
            assert!((r.mass - c).abs() < 1e-12);
            assert!(r.residual_richardson <= 1e-6 * r.mu);
            // raw residual mu c (sinh(c d) / (c d) - 1) ~ mu c^3 d^2 / 6
            let want = r.mu * c * ((c * 1e-2).sinh() / (c * 1e-2) - 1.0);
            assert!((r.residual - want).abs() < 1e-3 * want + 1e-12);
            assert!((r.residual / r.residual_half - 4.0).abs() < 0.8);
        }
    }

    #[test]
    fn hadamard_zero_factor() {
        let fam = ConformalFamily::uniform(torus(), ConformalFactor::zero(), 2).unwrap();
        let probe = HadamardProbe::new(&fam, 10.0, 128);
        let r = probe.check(3, 0.5, 1e-3).unwrap();
        assert_eq!(r.predicted, 0.0);
        assert!(r.residual < 1e-9);
    }

    #[test]
    fn hadamard_flat_factor_sector_ten() {
        let s = torus();
        let f = make_flat_factor(&s, 8, 0.1).unwrap();
        let fam = ConformalFamily::uniform(s, f, 2).unwrap();
        let probe = HadamardProbe::new(&fam, 14.0, 256);
        let spec = probe.spectrum_at(0.5).unwrap();
        let j = spec
            .position(ModeLabel {
                n: 10,
                k: 0,
                parity: crate::spectral::Parity::Cos,
            })
            .unwrap();
        let r = probe.check_on(&spec, j, 1e-3).unwrap();
        assert!(r.relative <= 1e-4, "{r:?}");
    }

    #[test]
    fn near_crossing_is_refused() {
        let fam = ConformalFamily::uniform(
            SurfaceOfRevolution::flat(1.0, 2.0 * std::f64::consts::PI).unwrap(),
            ConformalFactor::zero(),
            2,
        )
        .unwrap();
        let probe = HadamardProbe::new(&fam, 10.0, 128);
        // mu = 1 is shared by sector 0 (k = 1, 2) and sector 1 (k = 0)
        let spec = probe.spectrum_at(0.5).unwrap();
        assert!(matches!(
            probe.check_on(&spec, 1, 1e-3),
            Err(Error::NearCrossing { .. })
        ));
    }

    #[test]
    fn sojourn_linear_and_degenerate() {
        let t = uniform_grid(101);
        let mu = 3.0;
        let f: Vec<f64> = t.iter().map(|x| mu * x).collect();
        let r = sojourn_measure(&t, &f, 0.0, mu / 2.0, mu);
        assert!((r.measured - 0.5).abs() < 1e-12);
        assert!((r.bound - 0.5).abs() < 1e-12);
        assert_eq!(r.verdict, SojournVerdict::Within);

        let flat = vec![1.0; 101];
        let r = sojourn_measure(&t, &flat, 0.5, 1.5, 0.1);
        assert_eq!(r.verdict, SojournVerdict::HypothesisUnmet);
        assert!((r.measured - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sector_ten_branch_barely_moves() {
        let s = torus();
        let f = make_flat_factor(&s, 8, 0.1).unwrap();
        let fam = ConformalFamily::uniform(s, f, 2).unwrap();
        let nu = |t: f64, n: u32, k: usize| {
            solve_sector(&assemble_sector(&fam, n, t, 256).unwrap(), k + 1)
                .unwrap()
                .pairs[k]
                .mu
        };
        let drift = nu(1.0, 10, 0) - nu(0.0, 10, 0);
        assert!((0.0..1e-2).contains(&drift));
        // a transversally excited mode of comparable size feels the factor
        let generic = nu(1.0, 0, 6) - nu(0.0, 0, 6);
        assert!(generic > 10.0 * drift);
    }
}
