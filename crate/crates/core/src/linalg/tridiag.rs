//! Orthogonal reduction to tridiagonal form and the implicit-shift QL iteration.

use super::band::SymBand;
use crate::error::{Error, Result};

/// Iteration budget per eigenvalue in the QL sweep.
pub const QL_SWEEPS: usize = 30;

/// Symmetric tridiagonal matrix: `diag[i]` and `off[i]` coupling `i` and `i + 1`.
#[derive(Debug, Clone)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl Tridiagonal {
    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// All eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let mut d = self.diag.clone();
        let mut e = self.off.clone();
        e.resize(d.len(), 0.0);
        ql_implicit(&mut d, &mut e, None)?;
        d.sort_by(f64::total_cmp);
        Ok(d)
    }
}

/// Implicit QL with Wilkinson-type shifts on a tridiagonal matrix.
///
/// `e[i]` couples `i` and `i + 1`; `e[n - 1]` is workspace. When `z` is given it
/// must hold an `n x n` row-major orthogonal matrix, whose columns are rotated
/// along so that on exit they are the eigenvectors of `Z T Z^T`.
pub(crate) fn ql_implicit(d: &mut [f64], e: &mut [f64], mut z: Option<&mut [f64]>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd || e[m].abs() < f64::MIN_POSITIVE {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_SWEEPS {
                return Err(Error::NoConvergence {
                    what: "implicit QL",
                    iterations: QL_SWEEPS,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    for k in 0..n {
                        let f = z[k * n + i + 1];
                        z[k * n + i + 1] = s * z[k * n + i] + c * f;
                        z[k * n + i] = c * z[k * n + i] - s * f;
                    }
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Reduce a symmetric band matrix to tridiagonal form with Givens rotations,
/// chasing the single out-of-band bulge down the matrix after every elimination.
/// Eigenvalues are preserved; the rotations are not accumulated.
pub fn band_to_tridiagonal(a: &SymBand) -> Tridiagonal {
    let n = a.n();
    let b = a.bandwidth();
    if b <= 1 {
        return Tridiagonal {
            diag: (0..n).map(|i| a.get(i, i)).collect(),
            off: (0..n.saturating_sub(1)).map(|i| a.get(i + 1, i)).collect(),
        };
    }
    let mut w = a.widened(b + 1);
    for j in 0..n.saturating_sub(2) {
        for k in (2..=b).rev() {
            let r = j + k;
            if r >= n {
                continue;
            }
            if w.get(r, j) == 0.0 {
                continue;
            }
            rotate_to_zero(&mut w, r - 1, j, b);
            let mut i = r;
            while i + b < n {
                let row = i + b;
                if w.get(row, i - 1) == 0.0 {
                    break;
                }
                rotate_to_zero(&mut w, row - 1, i - 1, b);
                i += b;
            }
        }
    }
    Tridiagonal {
        diag: (0..n).map(|i| w.get(i, i)).collect(),
        off: (0..n.saturating_sub(1)).map(|i| w.get(i + 1, i)).collect(),
    }
}

/// Rotate rows/columns `p, p + 1` so that entry `(p + 1, col)` vanishes.
fn rotate_to_zero(w: &mut SymBand, p: usize, col: usize, b: usize) {
    let q = p + 1;
    let n = w.n();
    let x = w.get(p, col);
    let y = w.get(q, col);
    let rho = x.hypot(y);
    if rho == 0.0 {
        return;
    }
    let (c, s) = (x / rho, y / rho);
    let lo = p.saturating_sub(b);
    let hi = (p + b + 1).min(n - 1);
    for k in lo..=hi {
        if k == p || k == q {
            continue;
        }
        let apk = w.get(p, k);
        let aqk = w.get(q, k);
        if apk == 0.0 && aqk == 0.0 {
            continue;
        }
        w.set(p, k, c * apk + s * aqk);
        w.set(q, k, -s * apk + c * aqk);
    }
    let (app, aqq, apq) = (w.get(p, p), w.get(q, q), w.get(p, q));
    w.set(p, p, c * c * app + 2.0 * c * s * apq + s * s * aqq);
    w.set(q, q, s * s * app - 2.0 * c * s * apq + c * c * aqq);
    w.set(p, q, c * s * (aqq - app) + (c * c - s * s) * apq);
    w.set(q, col, 0.0);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense::SymmetricEigen;

    #[test]
    fn ql_on_second_difference() {
        // eigenvalues of tridiag(-1, 2, -1) are 2 - 2 cos(k pi / (n + 1))
        let n = 50;
        let t = Tridiagonal {
            diag: vec![2.0; n],
            off: vec![-1.0; n - 1],
        };
        let ev = t.eigenvalues().unwrap();
        for (k, v) in ev.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((v - exact).abs() < 1e-12, "{k}: {v} vs {exact}");
        }
    }

    #[test]
    fn band_reduction_preserves_spectrum() {
        let n = 30;
        let mut a = SymBand::zeros(n, 3);
        let mut seed = 11u64;
        for i in 0..n {
            for j in i.saturating_sub(3)..=i {
                seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
                a.set(i, j, ((seed >> 33) as f64) / (1u64 << 31) as f64 - 0.5);
            }
        }
        let t = band_to_tridiagonal(&a);
        let ev = t.eigenvalues().unwrap();
        let oracle = SymmetricEigen::new(a.to_dense(), n).unwrap();
        for (u, v) in ev.iter().zip(&oracle.values) {
            assert!((u - v).abs() < 1e-12, "{u} vs {v}");
        }
    }
}
