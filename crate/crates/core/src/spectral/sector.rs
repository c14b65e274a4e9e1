//! Angular sector `n` of `Delta_t` for rotation-invariant factors.
//!
//! Flux form on a periodic `s` grid: `A_ii = (r_{i+1/2} + r_{i-1/2}) / h + h n^2 / r_i`,
//! `A_{i,i+1} = -r_{i+1/2} / h`, `W_i = r_i exp(-t f_i) h`.

use std::f64::consts::PI;

use super::{into_solution, Backend, Discretization, EigenSolution};
use crate::error::{Error, Result};
use crate::linalg::{interleave_permutation, interleave_position, Pencil, SymBand};
use crate::surface::ConformalFamily;

pub const MIN_SECTOR_GRID: usize = 64;
/// Largest grid for which every eigenvalue is computed by full reduction.
pub const MAX_SECTOR_GRID: usize = 4096;

#[derive(Debug, Clone)]
pub struct SectorOperator {
    pub n: u32,
    /// angular eigenvalue in place of `n^2`
    pub symbol: f64,
    pub t: f64,
    pub h: f64,
    pub s: Vec<f64>,
    pub radius: Vec<f64>,
    pub factor: Vec<f64>,
    pub weight: Vec<f64>,
    pencil: Pencil,
}

pub fn assemble_sector(family: &ConformalFamily, n: u32, t: f64, n_s: usize) -> Result<SectorOperator> {
    assemble_sector_symbol(family, n, (n as f64).powi(2), t, n_s)
}

/// Eigenvalue of `-d^2/dphi^2` on `cos(n phi)` for the periodic 3-point stencil with `n_phi` nodes.
pub fn discrete_symbol(n: u32, n_phi: usize) -> f64 {
    let h = 2.0 * PI / n_phi as f64;
    (2.0 * (0.5 * n as f64 * h).sin() / h).powi(2)
}

/// Sector operator with an explicit angular symbol (e.g. `discrete_symbol`).
pub fn assemble_sector_symbol(
    family: &ConformalFamily,
    n: u32,
    symbol: f64,
    t: f64,
    n_s: usize,
) -> Result<SectorOperator> {
    if !family.factor.is_separable() {
        return Err(Error::CoupledFactor);
    }
    if n_s < MIN_SECTOR_GRID || !n_s.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "sector grid needs an even N_s >= {MIN_SECTOR_GRID}, got {n_s}"
        )));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!("t = {t} outside [0, 1]")));
    }
    let surface = &family.base;
    let h = surface.profile_period() / n_s as f64;
    let s: Vec<f64> = (0..n_s).map(|i| i as f64 * h).collect();
    let radius: Vec<f64> = s.iter().map(|&x| surface.radius(x)).collect();
    let mid: Vec<f64> = s.iter().map(|&x| surface.radius(x + 0.5 * h)).collect();
    let factor: Vec<f64> = s.iter().map(|&x| family.factor.value_s(x)).collect();
    let weight: Vec<f64> = (0..n_s).map(|i| radius[i] * (-t * factor[i]).exp() * h).collect();

    let perm = interleave_permutation(n_s);
    let mut a = SymBand::zeros(n_s, 2);
    let mut w = vec![0.0; n_s];
    for i in 0..n_s {
        let p = interleave_position(i, n_s);
        let prev = (i + n_s - 1) % n_s;
        let next = (i + 1) % n_s;
        a.set(p, p, (mid[i] + mid[prev]) / h + h * symbol / radius[i]);
        a.set(p, interleave_position(next, n_s), -mid[i] / h);
        w[p] = weight[i];
    }
    Ok(SectorOperator {
        n,
        symbol,
        t,
        h,
        s,
        radius,
        factor,
        weight,
        pencil: Pencil::new(a, w, perm),
    })
}

impl SectorOperator {
    pub fn n_s(&self) -> usize {
        self.s.len()
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.pencil.apply(v)
    }

    pub fn count_below(&self, sigma: f64) -> Result<usize> {
        self.pencil.count_below(sigma)
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        self.pencil.all_eigenvalues()
    }
}

impl Discretization for SectorOperator {
    fn pencil(&self) -> &Pencil {
        &self.pencil
    }

    fn t(&self) -> f64 {
        self.t
    }

    fn backend(&self) -> Backend {
        Backend::Separable(self.n)
    }

    fn grid(&self) -> (usize, usize) {
        (self.n_s(), 1)
    }

    fn factor_values(&self) -> &[f64] {
        &self.factor
    }

    fn weights(&self) -> &[f64] {
        &self.weight
    }
}

/// The `k_max` smallest sector eigenpairs, `dx_t`-normalized.
pub fn solve_sector(op: &SectorOperator, k_max: usize) -> Result<EigenSolution> {
    if op.n_s() > MAX_SECTOR_GRID {
        return Err(Error::InvalidArgument(format!(
            "N_s = {} exceeds the full-reduction limit {MAX_SECTOR_GRID}",
            op.n_s()
        )));
    }
    let pairs = op.pencil.lowest(k_max)?;
    Ok(into_solution(op, pairs, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{make_flat_factor, ConformalFactor, SurfaceOfRevolution};

    fn flat_family() -> ConformalFamily {
        let s = SurfaceOfRevolution::flat(1.0, 2.0 * PI).unwrap();
        ConformalFamily::uniform(s, ConformalFactor::zero(), 2).unwrap()
    }

    fn torus_family() -> ConformalFamily {
        let s = SurfaceOfRevolution::torus(2.0, 1.0).unwrap();
        ConformalFamily::uniform(s, ConformalFactor::zero(), 2).unwrap()
    }

    #[test]
    fn flat_sector_is_periodic_laplacian() {
        let op = assemble_sector(&flat_family(), 0, 0.0, 64).unwrap();
        let h = op.h;
        // A v for v = e_0: diagonal 2/h, neighbors -1/h including the wrap
        let mut e0 = vec![0.0; 64];
        e0[0] = 1.0;
        let col = op.apply(&e0);
        assert!((col[0] - 2.0 / h).abs() < 1e-12);
        assert!((col[1] + 1.0 / h).abs() < 1e-12);
        assert!((col[63] + 1.0 / h).abs() < 1e-12);
        assert!(col[2..63].iter().all(|&x| x == 0.0));
        assert!(op.weight.iter().all(|&w| (w - h).abs() < 1e-15));
    }

    #[test]
    fn flat_sector_potential() {
        let zero = assemble_sector(&flat_family(), 0, 0.0, 64).unwrap();
        let three = assemble_sector(&flat_family(), 3, 0.0, 64).unwrap();
        let v: Vec<f64> = (0..64).map(|i| (i as f64).sin()).collect();
        let a0 = zero.apply(&v);
        let a3 = three.apply(&v);
        for i in 0..64 {
            // h n^2 / r times v, divided by W = h
            assert!(((a3[i] - a0[i]) / three.weight[i] - 9.0 * v[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn torus_rows_sum_to_zero() {
        let op = assemble_sector(&torus_family(), 0, 0.0, 512).unwrap();
        let ones = vec![1.0; 512];
        assert!(op.apply(&ones).iter().all(|x| x.abs() < 1e-10));
    }

    #[test]
    fn rejects_bad_grids_and_coupled_factors() {
        assert!(assemble_sector(&flat_family(), 0, 0.0, 63).is_err());
        assert!(assemble_sector(&flat_family(), 0, 0.0, 32).is_err());
        let s = SurfaceOfRevolution::torus(2.0, 1.0).unwrap();
        let f = crate::surface::make_coupled_factor(&s, 8, 0.1, 0.3).unwrap();
        let fam = ConformalFamily::uniform(s, f, 2).unwrap();
        assert!(matches!(assemble_sector(&fam, 0, 0.0, 64), Err(Error::CoupledFactor)));
    }

    #[test]
    fn flat_sector_spectrum_and_convergence() {
        // continuum values n^2 + k^2; discrete k-part (2 sin(k h / 2) / h)^2
        for n in [0u32, 2] {
            let mut errs = Vec::new();
            for n_s in [256, 512] {
                let op = assemble_sector(&flat_family(), n, 0.0, n_s).unwrap();
                let sol = solve_sector(&op, 7).unwrap();
                let want = [0, 1, 1, 2, 2, 3, 3];
                let mut e = 0.0_f64;
                for (pair, k) in sol.pairs.iter().zip(want) {
                    let exact = (n * n + k * k) as f64;
                    e = e.max((pair.mu - exact).abs());
                    assert!(pair.residual <= 1e-8 * pair.mu.max(1.0));
                }
                errs.push(e);
            }
            if errs[1] > 0.0 {
                let ratio = errs[0] / errs[1];
                assert!((ratio - 4.0).abs() < 0.6, "ratio {ratio}");
            }
        }
    }

    #[test]
    fn zero_mode_is_constant_and_normalized() {
        let fam = {
            let s = SurfaceOfRevolution::torus(2.0, 1.0).unwrap();
            let f = make_flat_factor(&s, 8, 0.1).unwrap();
            ConformalFamily::uniform(s, f, 2).unwrap()
        };
        let op = assemble_sector(&fam, 0, 0.7, 256).unwrap();
        let sol = solve_sector(&op, 4).unwrap();
        assert!(sol.pairs[0].mu.abs() < 1e-8);
        let v = &sol.pairs[0].vector;
        let spread = v.iter().fold(0.0_f64, |m, x| m.max((x - v[0]).abs()));
        assert!(spread < 1e-8);
        for a in 0..4 {
            for b in 0..4 {
                let ip = op.inner(&sol.pairs[a].vector, &sol.pairs[b].vector);
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((ip - want).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn torus_sector_ten_ground_state() {
        let mut nu = Vec::new();
        for n_s in [512, 1024] {
            let op = assemble_sector(&torus_family(), 10, 0.0, n_s).unwrap();
            nu.push(solve_sector(&op, 1).unwrap().pairs[0].mu);
        }
        assert!(nu[1] > 100.0 / 9.0 && nu[1] < 100.0);
        assert!((nu[0] - nu[1]).abs() < 1e-4 * nu[1]);
    }

    #[test]
    fn deterministic_output() {
        let a = solve_sector(&assemble_sector(&torus_family(), 4, 0.0, 128).unwrap(), 5).unwrap();
        let b = solve_sector(&assemble_sector(&torus_family(), 4, 0.0, 128).unwrap(), 5).unwrap();
        for (x, y) in a.pairs.iter().zip(&b.pairs) {
            assert_eq!(x.mu.to_bits(), y.mu.to_bits());
            assert_eq!(x.vector, y.vector);
        }
    }
}
