//! Five-point flux-form `Delta_t` on the periodic `(s, phi)` grid, for factors
//! that break rotation invariance.

use std::f64::consts::PI;

use super::{into_solution, Backend, Discretization, EigenSolution};
use crate::error::{Error, Result};
use crate::linalg::{interleave_position, Pencil, SymBand};
use crate::surface::ConformalFamily;

/// Largest `N_s * N_phi` accepted.
pub const COUPLED_BUDGET: usize = 32_768;

#[derive(Debug, Clone)]
pub struct CoupledOperator {
    pub t: f64,
    pub n_s: usize,
    pub n_phi: usize,
    pub h_s: f64,
    pub h_phi: f64,
    /// `f(s_i, phi_j)` at natural index `i * n_phi + j`
    pub factor: Vec<f64>,
    pub weight: Vec<f64>,
    pencil: Pencil,
}

pub fn assemble_coupled(family: &ConformalFamily, t: f64, n_s: usize, n_phi: usize) -> Result<CoupledOperator> {
    let unknowns = n_s.saturating_mul(n_phi);
    if unknowns > COUPLED_BUDGET {
        return Err(Error::MemoryBudget {
            unknowns,
            limit: COUPLED_BUDGET,
        });
    }
    if n_s < 4 || n_phi < 4 {
        return Err(Error::InvalidArgument(format!(
            "coupled grid {n_s} x {n_phi} is too small"
        )));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!("t = {t} outside [0, 1]")));
    }
    let surface = &family.base;
    let h_s = surface.profile_period() / n_s as f64;
    let h_phi = 2.0 * PI / n_phi as f64;
    let radius: Vec<f64> = (0..n_s).map(|i| surface.radius(i as f64 * h_s)).collect();
    let mid: Vec<f64> = (0..n_s).map(|i| surface.radius((i as f64 + 0.5) * h_s)).collect();

    let natural = |i: usize, j: usize| i * n_phi + j;
    // interleave the larger direction so the band is twice the smaller one
    let s_outer = n_phi <= n_s;
    let position = |i: usize, j: usize| {
        if s_outer {
            interleave_position(i, n_s) * n_phi + j
        } else {
            interleave_position(j, n_phi) * n_s + i
        }
    };
    let bw = 2 * n_phi.min(n_s);
    let n = unknowns;
    let mut perm = vec![0; n];
    let mut factor = vec![0.0; n];
    let mut weight = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut a = SymBand::zeros(n, bw);
    for i in 0..n_s {
        let s = i as f64 * h_s;
        let prev = (i + n_s - 1) % n_s;
        let next = (i + 1) % n_s;
        for j in 0..n_phi {
            let phi = j as f64 * h_phi;
            let k = natural(i, j);
            let p = position(i, j);
            perm[p] = k;
            let f = family.factor.value(s, phi);
            factor[k] = f;
            weight[k] = radius[i] * (-t * f).exp() * h_s * h_phi;
            w[p] = weight[k];
            let ang = h_s / (radius[i] * h_phi);
            a.add(p, p, (mid[i] + mid[prev]) * h_phi / h_s + 2.0 * ang);
            a.add(p, position(next, j), -mid[i] * h_phi / h_s);
            a.add(p, position(i, (j + 1) % n_phi), -ang);
        }
    }
    Ok(CoupledOperator {
        t,
        n_s,
        n_phi,
        h_s,
        h_phi,
        factor,
        weight,
        pencil: Pencil::new(a, w, perm),
    })
}

impl CoupledOperator {
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n_phi + j
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.pencil.apply(v)
    }

    /// The `k` smallest eigenpairs by spectrum slicing.
    pub fn lowest(&self, k: usize) -> Result<EigenSolution> {
        let total_area: f64 = self.weight.iter().sum();
        // Weyl guess for the k-th eigenvalue
        let guess = 4.0 * PI * k as f64 / total_area;
        let pairs = self.pencil.lowest_by_slicing(k, -1.0, guess)?;
        Ok(into_solution(self, pairs, None))
    }
}

impl Discretization for CoupledOperator {
    fn pencil(&self) -> &Pencil {
        &self.pencil
    }

    fn t(&self) -> f64 {
        self.t
    }

    fn backend(&self) -> Backend {
        Backend::Coupled
    }

    fn grid(&self) -> (usize, usize) {
        (self.n_s, self.n_phi)
    }

    fn factor_values(&self) -> &[f64] {
        &self.factor
    }

    fn weights(&self) -> &[f64] {
        &self.weight
    }
}
