//! Symmetric semiclassical double well `H = -hbar^2 d^2/dx^2 + V(x)`.
//!
//! Exact eigenfunctions are even or odd, so they sit in both wells at once, while
//! harmonic quasi-modes built in one well are only close to the span of a doublet.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beams::hermite;
use crate::error::{Error, Result};
use crate::linalg::{Pencil, SymBand};
use crate::spectral::Parity;
use crate::stats::{linear_fit, LineFit};

/// Smallest grid accepted.
pub const MIN_GRID: usize = 2000;
/// Largest eigenvalue shift allowed when the box is doubled.
pub const TRUNCATION_TOLERANCE: f64 = 1e-10;

/// `V(x) = b ((x / a)^2 - 1)^2`: zeros at `+-a`, barrier `V(0) = b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuarticWell {
    pub a: f64,
    pub b: f64,
}

impl Default for QuarticWell {
    fn default() -> Self {
        QuarticWell { a: 1.0, b: 1.0 }
    }
}

impl QuarticWell {
    pub fn value(&self, x: f64) -> f64 {
        let y = x / self.a;
        self.b * (y * y - 1.0).powi(2)
    }

    /// `V''(a)`
    pub fn curvature(&self) -> f64 {
        8.0 * self.b / (self.a * self.a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DoubleWellProblem {
    pub potential: QuarticWell,
    pub hbar: f64,
    /// Dirichlet walls at `+-x_cut`
    pub x_cut: f64,
    /// intervals across `[-x_cut, x_cut]`; even, so `x = 0` is a node
    pub n_x: usize,
}

impl DoubleWellProblem {
    pub fn new(hbar: f64) -> Self {
        DoubleWellProblem {
            potential: QuarticWell::default(),
            hbar,
            x_cut: 3.0,
            n_x: MIN_GRID,
        }
    }

    fn check(&self) -> Result<()> {
        let QuarticWell { a, b } = self.potential;
        if !(a > 0.0 && b > 0.0 && self.hbar > 0.0) {
            return Err(Error::InvalidArgument("double well needs a, b, hbar > 0".into()));
        }
        if self.n_x < MIN_GRID || !self.n_x.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "grid {} must be even and >= {MIN_GRID}",
                self.n_x
            )));
        }
        if !(self.x_cut > a) {
            return Err(Error::InvalidArgument(format!(
                "box {} must contain the wells",
                self.x_cut
            )));
        }
        Ok(())
    }

    pub fn h(&self) -> f64 {
        2.0 * self.x_cut / self.n_x as f64
    }

    /// Interior nodes `x_1 .. x_{n_x - 1}`.
    pub fn nodes(&self) -> Vec<f64> {
        let h = self.h();
        (1..self.n_x).map(|i| -self.x_cut + i as f64 * h).collect()
    }

    /// Harmonic frequency `sqrt(V''(a) / 2)` of the well for this operator.
    pub fn frequency(&self) -> f64 {
        (0.5 * self.potential.curvature()).sqrt()
    }

    fn pencil(&self) -> Pencil {
        let x = self.nodes();
        let h = self.h();
        let k = self.hbar * self.hbar / h;
        let mut a = SymBand::zeros(x.len(), 1);
        for (i, &xi) in x.iter().enumerate() {
            a.set(i, i, 2.0 * k + h * self.potential.value(xi));
            if i + 1 < x.len() {
                a.set(i, i + 1, -k);
            }
        }
        Pencil::natural(a, vec![h; x.len()])
    }

    /// `H u` on the grid.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let h = self.h();
        self.pencil().apply(u).iter().map(|v| v / h).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WellSolution {
    pub problem: DoubleWellProblem,
    pub energies: Vec<f64>,
    #[serde(skip)]
    pub vectors: Vec<Vec<f64>>,
    pub parity: Vec<Parity>,
    /// `int_{x > 0} phi^2`
    pub right_mass: Vec<f64>,
    /// largest eigenvalue shift under doubling of the box
    pub truncation_shift: f64,
}

impl WellSolution {
    pub fn splitting(&self) -> f64 {
        self.energies[1] - self.energies[0]
    }

    /// Even, odd, even, ... up the computed spectrum.
    pub fn parity_alternates(&self) -> bool {
        self.parity
            .iter()
            .enumerate()
            .all(|(k, p)| *p == if k % 2 == 0 { Parity::Cos } else { Parity::Sin })
    }
}

fn inner(u: &[f64], v: &[f64], h: f64) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>() * h
}

/// Mass on `x > 0`, counting the node at `0` by half.
fn right_mass(u: &[f64], h: f64) -> f64 {
    let mid = u.len() / 2;
    (u[mid + 1..].iter().map(|v| v * v).sum::<f64>() + 0.5 * u[mid] * u[mid]) * h
}

/// Lowest `k_max` eigenpairs; parity is `Cos` for even and `Sin` for odd functions.
pub fn solve_wells(problem: &DoubleWellProblem, k_max: usize) -> Result<WellSolution> {
    problem.check()?;
    let pairs = problem.pencil().lowest(k_max)?;
    let energies: Vec<f64> = pairs.iter().map(|p| p.mu).collect();
    let e_max = energies.last().copied().unwrap_or(0.0);
    if problem.potential.value(problem.x_cut) < 10.0 * e_max {
        return Err(Error::InvalidArgument(format!(
            "V(x_cut) = {} is below 10 E_max = {}",
            problem.potential.value(problem.x_cut),
            10.0 * e_max
        )));
    }
    let doubled = DoubleWellProblem {
        x_cut: 2.0 * problem.x_cut,
        n_x: 2 * problem.n_x,
        ..*problem
    };
    let wide = doubled.pencil().lowest(k_max)?;
    let mut truncation_shift: f64 = 0.0;
    for (index, (e, w)) in energies.iter().zip(&wide).enumerate() {
        let shift = (e - w.mu).abs();
        truncation_shift = truncation_shift.max(shift);
        if shift > TRUNCATION_TOLERANCE {
            return Err(Error::TruncationSensitivity { index, shift });
        }
    }
    let h = problem.h();
    let vectors: Vec<Vec<f64>> = pairs.into_iter().map(|p| p.vector).collect();
    let parity = vectors
        .iter()
        .map(|v| {
            let mirror: Vec<f64> = v.iter().rev().copied().collect();
            if inner(v, &mirror, h) > 0.0 {
                Parity::Cos
            } else {
                Parity::Sin
            }
        })
        .collect();
    let right = vectors.iter().map(|v| right_mass(v, h)).collect();
    Ok(WellSolution {
        problem: *problem,
        energies,
        vectors,
        parity,
        right_mass: right,
        truncation_shift,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Well {
    Left,
    Right,
}

#[derive(Debug, Clone, Serialize)]
pub struct WellQuasimode {
    pub well: Well,
    pub m1: u32,
    /// `(2 m1 + 1) hbar sqrt(V''(a) / 2)`
    pub lambda: f64,
    /// Gaussian width `sqrt(hbar / sqrt(V''(a) / 2))`
    pub width: f64,
    /// `||(H - lambda) u||`
    pub defect: f64,
    /// mass in the other well
    pub leak: f64,
    #[serde(skip)]
    pub vector: Vec<f64>,
}

/// Harmonic-oscillator state `H_m1(y / w) exp(-y^2 / 2 w^2)`, `y = x -+ a`.
pub fn build_well_quasimode(problem: &DoubleWellProblem, well: Well, m1: u32) -> Result<WellQuasimode> {
    problem.check()?;
    let a = problem.potential.a;
    let omega = problem.frequency();
    let width = (problem.hbar / omega).sqrt();
    if !(width < a / 3.0) {
        return Err(Error::WidthPrecondition { width, limit: a / 3.0 });
    }
    let center = match well {
        Well::Left => -a,
        Well::Right => a,
    };
    let h = problem.h();
    let mut u: Vec<f64> = problem
        .nodes()
        .iter()
        .map(|x| {
            let y = (x - center) / width;
            hermite(m1, y) * (-0.5 * y * y).exp()
        })
        .collect();
    let norm = inner(&u, &u, h).sqrt();
    u.iter_mut().for_each(|v| *v /= norm);
    let lambda = (2 * m1 + 1) as f64 * problem.hbar * omega;
    let hu = problem.apply(&u);
    let r: Vec<f64> = hu.iter().zip(&u).map(|(a, b)| a - lambda * b).collect();
    let defect = inner(&r, &r, h).sqrt();
    let toward_right = right_mass(&u, h);
    let leak = match well {
        Well::Left => toward_right,
        Well::Right => 1.0 - toward_right,
    };
    Ok(WellQuasimode {
        well,
        m1,
        lambda,
        width,
        defect,
        leak,
        vector: u,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ArnoldReport {
    pub hbar: f64,
    pub e_even: f64,
    pub e_odd: f64,
    pub splitting: f64,
    pub defect: f64,
    /// `<u, phi_even>^2`
    pub overlap_even: f64,
    pub overlap_odd: f64,
    /// `||u - P u||`, `P` the projection onto the doublet
    pub span_residual: f64,
    /// `min_j ||u - <u, phi_j> phi_j||` over the computed modes
    pub min_single_mode_distance: f64,
    /// `[lambda - defect, lambda + defect]` holds both doublet energies
    pub doublet_in_window: bool,
}

/// Compare a one-well quasimode with the doublet `2 m1, 2 m1 + 1`.
pub fn arnold_audit(solution: &WellSolution, quasimode: &WellQuasimode) -> Result<ArnoldReport> {
    let k = 2 * quasimode.m1 as usize;
    if solution.energies.len() < k + 2 {
        return Err(Error::InvalidArgument(format!(
            "need {} modes for the doublet of m1 = {}",
            k + 2,
            quasimode.m1
        )));
    }
    let h = solution.problem.h();
    let u = &quasimode.vector;
    let overlaps: Vec<f64> = solution.vectors.iter().map(|v| inner(u, v, h).powi(2)).collect();
    let (overlap_even, overlap_odd) = (overlaps[k], overlaps[k + 1]);
    let span_residual = (1.0 - overlap_even - overlap_odd).max(0.0).sqrt();
    let min_single_mode_distance = overlaps
        .iter()
        .map(|o| (1.0 - o).max(0.0).sqrt())
        .fold(f64::INFINITY, f64::min);
    let (e_even, e_odd) = (solution.energies[k], solution.energies[k + 1]);
    let window = |e: f64| (e - quasimode.lambda).abs() <= quasimode.defect;
    Ok(ArnoldReport {
        hbar: solution.problem.hbar,
        e_even,
        e_odd,
        splitting: e_odd - e_even,
        defect: quasimode.defect,
        overlap_even,
        overlap_odd,
        span_residual,
        min_single_mode_distance,
        doublet_in_window: window(e_even) && window(e_odd),
    })
}

/// Audit at each `hbar`, in parallel, plus the fit of `log splitting` against `1 / hbar`.
pub fn splitting_sweep(base: &DoubleWellProblem, hbars: &[f64]) -> Result<(Vec<ArnoldReport>, Option<LineFit>)> {
    let reports = hbars
        .par_iter()
        .map(|&hbar| {
            let problem = DoubleWellProblem { hbar, ..*base };
            let sol = solve_wells(&problem, 6)?;
            let qm = build_well_quasimode(&problem, Well::Right, 0)?;
            arnold_audit(&sol, &qm)
        })
        .collect::<Result<Vec<_>>>()?;
    let x: Vec<f64> = reports.iter().map(|r| 1.0 / r.hbar).collect();
    let y: Vec<f64> = reports.iter().map(|r| r.splitting.ln()).collect();
    Ok((reports, linear_fit(&x, &y)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn potential_shape() {
        let v = QuarticWell::default();
        assert_eq!(v.value(1.0), 0.0);
        assert_eq!(v.value(-1.0), 0.0);
        assert_eq!(v.value(0.0), 1.0);
        let p = DoubleWellProblem::new(0.1);
        let x = p.nodes();
        for (a, b) in x.iter().zip(x.iter().rev()) {
            assert!((v.value(*a) - v.value(*b)).abs() <= 1e-12);
        }
    }

    #[test]
    fn ground_state_near_harmonic_and_resolution_stable() {
        let p = DoubleWellProblem::new(0.1);
        let sol = solve_wells(&p, 6).unwrap();
        let harmonic = p.hbar * p.frequency();
        assert!((sol.energies[0] / harmonic - 1.0).abs() < 0.15);
        let fine = solve_wells(&DoubleWellProblem { n_x: 4000, ..p }, 2).unwrap();
        assert!((fine.energies[0] - sol.energies[0]).abs() < 1e-4 * sol.energies[0]);
        assert!(sol.truncation_shift <= TRUNCATION_TOLERANCE);
    }

    #[test]
    fn parity_and_half_mass() {
        for hbar in [0.15, 0.1] {
            let sol = solve_wells(&DoubleWellProblem::new(hbar), 6).unwrap();
            assert!(sol.parity_alternates(), "{:?}", sol.parity);
            for m in &sol.right_mass[..2] {
                assert!((m - 0.5).abs() <= 1e-6);
            }
        }
    }

    #[test]
    fn quasimode_localizes_and_mirrors() {
        let p = DoubleWellProblem::new(0.1);
        let r = build_well_quasimode(&p, Well::Right, 0).unwrap();
        let l = build_well_quasimode(&p, Well::Left, 0).unwrap();
        assert!(r.leak <= 1e-6);
        for (a, b) in r.vector.iter().zip(l.vector.iter().rev()) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!((r.defect - l.defect).abs() < 1e-12);
        assert!(matches!(
            build_well_quasimode(&DoubleWellProblem::new(0.5), Well::Right, 0),
            Err(Error::WidthPrecondition { .. })
        ));
    }

    #[test]
    fn defect_scales_like_hbar_three_halves() {
        let hbars = [0.2, 0.15, 0.1, 0.08, 0.05];
        let d: Vec<f64> = hbars
            .iter()
            .map(|&h| {
                build_well_quasimode(&DoubleWellProblem::new(h), Well::Right, 0)
                    .unwrap()
                    .defect
            })
            .collect();
        let x: Vec<f64> = hbars.iter().map(|h: &f64| h.ln()).collect();
        let y: Vec<f64> = d.iter().map(|v| v.ln()).collect();
        let fit = linear_fit(&x, &y).unwrap();
        assert!((1.3..=1.7).contains(&fit.slope), "{fit:?}");
    }

    #[test]
    fn quasimode_is_near_the_span_not_a_mode() {
        let p = DoubleWellProblem::new(0.1);
        let sol = solve_wells(&p, 6).unwrap();
        let qm = build_well_quasimode(&p, Well::Right, 0).unwrap();
        let r = arnold_audit(&sol, &qm).unwrap();
        assert!((0.45..=0.55).contains(&r.overlap_even));
        assert!((0.45..=0.55).contains(&r.overlap_odd));
        assert!(r.min_single_mode_distance >= 0.6);
        assert!((r.overlap_even + r.overlap_odd + r.span_residual.powi(2) - 1.0).abs() < 1e-8);
        assert!(r.defect > 100.0 * r.splitting);
        assert!(r.doublet_in_window);

        // the symmetric combination is the even ground state
        let l = build_well_quasimode(&p, Well::Left, 0).unwrap();
        let h = p.h();
        let mut s: Vec<f64> = qm.vector.iter().zip(&l.vector).map(|(a, b)| a + b).collect();
        let norm = inner(&s, &s, h).sqrt();
        s.iter_mut().for_each(|v| *v /= norm);
        let overlap = inner(&s, &sol.vectors[0], h).abs();
        assert!(overlap >= 0.99);
    }

    #[test]
    fn splitting_is_exponential_in_inverse_hbar() {
        let (reports, fit) = splitting_sweep(&DoubleWellProblem::new(0.1), &[0.2, 0.15, 0.1, 0.08]).unwrap();
        let fit = fit.unwrap();
        assert!(fit.slope < 0.0 && fit.r_squared >= 0.99, "{fit:?}");
        assert!(reports.iter().all(|r| r.splitting > 0.0));
    }
}
