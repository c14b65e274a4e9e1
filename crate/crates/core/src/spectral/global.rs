//! Ordered spectrum `mu_1(t) <= mu_2(t) <= ...` up to a cutoff, merged over sectors.

use rayon::prelude::*;

use super::{assemble_sector, solve_sector, Discretization, ModeLabel, Parity};
use crate::error::Result;
use crate::surface::ConformalFamily;

/// Relative slack on the cutoff, so values equal to it in the continuum are kept.
pub const CUTOFF_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct GlobalSpectrum {
    pub t: f64,
    pub lambda_max: f64,
    /// ascending, with multiplicity
    pub values: Vec<f64>,
    pub labels: Vec<ModeLabel>,
    pub residuals: Vec<f64>,
    /// `int f phi^2 dx_t` of each mode
    pub masses: Vec<f64>,
    /// sector profile `v(s)` of each mode, `dx_t`-normalized
    pub vectors: Vec<Vec<f64>>,
}

impl GlobalSpectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Distance to the nearest other mode, ignoring the angular partner of the same sector mode.
    pub fn gap(&self, j: usize) -> f64 {
        let me = self.labels[j];
        self.values
            .iter()
            .zip(&self.labels)
            .enumerate()
            .filter(|(i, (_, l))| *i != j && !(l.n == me.n && l.k == me.k))
            .map(|(_, (v, _))| (v - self.values[j]).abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// Index of a labelled mode.
    pub fn position(&self, label: ModeLabel) -> Option<usize> {
        self.labels.iter().position(|l| *l == label)
    }
}

/// Largest sector that can hold eigenvalues below `lambda_max`.
pub fn sector_limit(family: &ConformalFamily, lambda_max: f64) -> u32 {
    let (_, r_max) = family.base.radius_range();
    (lambda_max.sqrt() * r_max).ceil() as u32 + 2
}

/// Every eigenvalue `<= lambda_max` of a rotation-invariant family, with sector labels,
/// masses and sector eigenvectors. Sectors `n >= 1` contribute a cosine and a sine copy.
pub fn global_spectrum(family: &ConformalFamily, t: f64, lambda_max: f64, n_s: usize) -> Result<GlobalSpectrum> {
    let cutoff = lambda_max * (1.0 + CUTOFF_TOLERANCE);
    let n_max = sector_limit(family, lambda_max);
    type Row = (f64, ModeLabel, f64, f64, Vec<f64>);
    let sectors: Vec<Result<Vec<Row>>> = (0..=n_max)
        .into_par_iter()
        .map(|n| {
            let op = assemble_sector(family, n, t, n_s)?;
            let count = op.count_below(cutoff)?;
            if count == 0 {
                return Ok(Vec::new());
            }
            let sol = solve_sector(&op, count)?;
            let mut rows = Vec::new();
            for (k, pair) in sol.pairs.into_iter().enumerate() {
                if pair.mu > cutoff {
                    continue;
                }
                let mass = op.mass(&pair.vector);
                let parities: &[Parity] = if n == 0 {
                    &[Parity::Cos]
                } else {
                    &[Parity::Cos, Parity::Sin]
                };
                for &parity in parities {
                    rows.push((
                        pair.mu,
                        ModeLabel { n, k, parity },
                        pair.residual,
                        mass,
                        pair.vector.clone(),
                    ));
                }
            }
            Ok(rows)
        })
        .collect();
    let mut rows = Vec::new();
    for s in sectors {
        rows.extend(s?);
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut out = GlobalSpectrum {
        t,
        lambda_max,
        values: Vec::with_capacity(rows.len()),
        labels: Vec::with_capacity(rows.len()),
        residuals: Vec::with_capacity(rows.len()),
        masses: Vec::with_capacity(rows.len()),
        vectors: Vec::with_capacity(rows.len()),
    };
    for (mu, label, res, mass, v) in rows {
        out.values.push(mu);
        out.labels.push(label);
        out.residuals.push(res);
        out.masses.push(mass);
        out.vectors.push(v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{make_flat_factor, ConformalFactor, SurfaceOfRevolution};
    use std::f64::consts::PI;

    #[test]
    fn flat_torus_lattice_count() {
        let s = SurfaceOfRevolution::flat(1.0, 2.0 * PI).unwrap();
        let fam = ConformalFamily::uniform(s, ConformalFactor::zero(), 2).unwrap();
        let g = global_spectrum(&fam, 0.0, 100.0, 256).unwrap();
        let mut lattice = 0;
        for j in -10i32..=10 {
            for k in -10i32..=10 {
                if j * j + k * k <= 100 {
                    lattice += 1;
                }
            }
        }
        assert_eq!(lattice, 317);
        assert_eq!(g.len(), lattice);
        let weyl = g.len() as f64 / (4.0 * PI * PI * 100.0 / (4.0 * PI));
        assert!((weyl - 1.009).abs() < 1e-3);
        assert!(g.values[0].abs() < 1e-8);
    }

    #[test]
    fn flat_factor_raises_every_eigenvalue() {
        let s = SurfaceOfRevolution::torus(2.0, 1.0).unwrap();
        let f = make_flat_factor(&s, 8, 0.1).unwrap();
        let fam = ConformalFamily::uniform(s, f, 2).unwrap();
        let a = global_spectrum(&fam, 0.0, 20.0, 256).unwrap();
        let b = global_spectrum(&fam, 1.0, 20.0, 256).unwrap();
        assert!(b.len() <= a.len());
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!(*y >= x - 1e-9 * x.max(1.0));
        }
        assert!(a.masses.iter().all(|&m| (0.0..=0.1 + 1e-12).contains(&m)));
    }
}
