//! Dense symmetric eigensolver: Householder tridiagonalization followed by
//! implicit QL with accumulated rotations. Used for Rayleigh-Ritz projections
//! and as an independent reference in tests.

use super::tridiag::ql_implicit;
use crate::error::Result;

#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub n: usize,
    /// ascending
    pub values: Vec<f64>,
    /// row-major, column `k` is the eigenvector of `values[k]`
    pub vectors: Vec<f64>,
}

impl SymmetricEigen {
    /// `a` is a row-major symmetric `n x n` matrix (only the lower triangle is read).
    pub fn new(a: Vec<f64>, n: usize) -> Result<Self> {
        assert_eq!(a.len(), n * n);
        let mut z = a;
        let mut d = vec![0.0; n];
        let mut e = vec![0.0; n];
        householder(&mut z, &mut d, &mut e, n);
        // shift off-diagonal so that e[i] couples i and i + 1
        for i in 1..n {
            e[i - 1] = e[i];
        }
        if n > 0 {
            e[n - 1] = 0.0;
        }
        ql_implicit(&mut d, &mut e, Some(&mut z))?;

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
        let values = order.iter().map(|&k| d[k]).collect();
        let mut vectors = vec![0.0; n * n];
        for (new, &old) in order.iter().enumerate() {
            for r in 0..n {
                vectors[r * n + new] = z[r * n + old];
            }
        }
        Ok(SymmetricEigen { n, values, vectors })
    }

    pub fn vector(&self, k: usize) -> Vec<f64> {
        (0..self.n).map(|r| self.vectors[r * self.n + k]).collect()
    }
}

/// Householder reduction; on exit `z` holds the accumulated transformation,
/// `d` the diagonal and `e[1..]` the subdiagonal.
fn householder(z: &mut [f64], d: &mut [f64], e: &mut [f64], n: usize) {
    let at = |i: usize, j: usize| i * n + j;
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let scale: f64 = (0..i).map(|k| z[at(i, k)].abs()).sum();
            if scale == 0.0 {
                e[i] = z[at(i, l)];
            } else {
                for k in 0..i {
                    z[at(i, k)] /= scale;
                    h += z[at(i, k)] * z[at(i, k)];
                }
                let f = z[at(i, l)];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                z[at(i, l)] = f - g;
                let mut f = 0.0;
                for j in 0..i {
                    z[at(j, i)] = z[at(i, j)] / h;
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += z[at(j, k)] * z[at(i, k)];
                    }
                    for k in j + 1..i {
                        g += z[at(k, j)] * z[at(i, k)];
                    }
                    e[j] = g / h;
                    f += e[j] * z[at(i, j)];
                }
                let hh = f / (h + h);
                for j in 0..i {
                    let f = z[at(i, j)];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        z[at(j, k)] -= f * e[k] + g * z[at(i, k)];
                    }
                }
            }
        } else {
            e[i] = z[at(i, l)];
        }
        d[i] = h;
    }
    if n > 0 {
        d[0] = 0.0;
        e[0] = 0.0;
    }
    for i in 0..n {
        if d[i] != 0.0 {
            for j in 0..i {
                let mut g = 0.0;
                for k in 0..i {
                    g += z[at(i, k)] * z[at(k, j)];
                }
                for k in 0..i {
                    z[at(k, j)] -= g * z[at(k, i)];
                }
            }
        }
        d[i] = z[at(i, i)];
        z[at(i, i)] = 1.0;
        for j in 0..i {
            z[at(j, i)] = 0.0;
            z[at(i, j)] = 0.0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reconstructs_matrix() {
        let n = 7;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v = ((i * 3 + j * 5) % 7) as f64 - 3.0 + if i == j { 2.0 } else { 0.0 };
                a[i * n + j] = v;
                a[j * n + i] = v;
            }
        }
        let eig = SymmetricEigen::new(a.clone(), n).unwrap();
        for i in 0..n {
            for j in 0..n {
                let r: f64 = (0..n)
                    .map(|k| eig.vectors[i * n + k] * eig.values[k] * eig.vectors[j * n + k])
                    .sum();
                assert!((r - a[i * n + j]).abs() < 1e-12);
            }
        }
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn one_by_one_and_empty() {
        let e = SymmetricEigen::new(vec![4.0], 1).unwrap();
        assert_eq!(e.values, vec![4.0]);
        assert_eq!(e.vectors, vec![1.0]);
        assert!(SymmetricEigen::new(vec![], 0).unwrap().values.is_empty());
    }
}
