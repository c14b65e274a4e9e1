//! Symmetric band storage and a pivot-free `LDL^T` factorization.
//!
//! The factorization is what makes spectrum slicing work: by Sylvester's law
//! of inertia the number of negative entries of `D` in `A - sigma W = L D L^T`
//! equals the number of generalized eigenvalues below `sigma`.

use std::fmt;

/// Symmetric matrix with `|i - j| <= bw` nonzero entries, lower band stored row-major.
#[derive(Clone)]
pub struct SymBand {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl fmt::Debug for SymBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymBand")
            .field("n", &self.n)
            .field("bw", &self.bw)
            .finish()
    }
}

impl SymBand {
    pub fn zeros(n: usize, bw: usize) -> Self {
        SymBand {
            n,
            bw,
            data: vec![0.0; n * (bw + 1)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        if i - j > self.bw {
            None
        } else {
            Some(i * (self.bw + 1) + j + self.bw - i)
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |k| self.data[k])
    }

    /// Panics if `(i, j)` lies outside the band.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("({i}, {j}) outside bandwidth {}", self.bw));
        self.data[k] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("({i}, {j}) outside bandwidth {}", self.bw));
        self.data[k] += v;
    }

    /// Row `i` restricted to columns `i - bw ..= i` (entries left of column 0 are zero).
    #[inline]
    fn row(&self, i: usize) -> &[f64] {
        &self.data[i * (self.bw + 1)..(i + 1) * (self.bw + 1)]
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        y.iter_mut().for_each(|v| *v = 0.0);
        let bw = self.bw;
        for i in 0..self.n {
            let row = self.row(i);
            let lo = i.saturating_sub(bw);
            let mut acc = row[bw] * x[i];
            for j in lo..i {
                let a = row[j + bw - i];
                acc += a * x[j];
                y[j] += a * x[i];
            }
            y[i] += acc;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// `self - sigma * diag(weight)`.
    pub fn shifted(&self, sigma: f64, weight: &[f64]) -> SymBand {
        let mut out = self.clone();
        for (i, w) in weight.iter().enumerate() {
            out.data[i * (self.bw + 1) + self.bw] -= sigma * w;
        }
        out
    }

    /// `diag(s) * self * diag(s)`.
    pub fn scaled(&self, s: &[f64]) -> SymBand {
        let mut out = self.clone();
        let bw = self.bw;
        for i in 0..self.n {
            let lo = i.saturating_sub(bw);
            for j in lo..=i {
                out.data[i * (bw + 1) + j + bw - i] *= s[i] * s[j];
            }
        }
        out
    }

    /// Same matrix in wider storage.
    pub fn widened(&self, bw: usize) -> SymBand {
        assert!(bw >= self.bw);
        let mut out = SymBand::zeros(self.n, bw);
        for i in 0..self.n {
            for j in i.saturating_sub(self.bw)..=i {
                out.set(i, j, self.get(i, j));
            }
        }
        out
    }

    /// Dense row-major copy, for small matrices and tests.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n;
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] = self.get(i, j);
            }
        }
        m
    }
}

/// Relative pivot size below which the factorization is declared broken.
const PIVOT_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PivotBreakdown {
    pub row: usize,
    pub pivot: f64,
}

/// `A = L D L^T` for a symmetric band matrix, no pivoting.
#[derive(Clone)]
pub struct BandLdlt {
    n: usize,
    bw: usize,
    // unit lower factor, same layout as `SymBand` (the diagonal slot is unused)
    l: Vec<f64>,
    d: Vec<f64>,
}

impl BandLdlt {
    pub fn factor(a: &SymBand) -> Result<Self, PivotBreakdown> {
        let n = a.n;
        let bw = a.bw;
        let stride = bw + 1;
        let scale = a.max_abs().max(f64::MIN_POSITIVE);
        let mut l = vec![0.0; n * stride];
        let mut d = vec![0.0; n];
        // w[p] = l_ip * d_p for the current row i
        let mut w = vec![0.0; n];

        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let arow = a.row(i);
            for j in lo..i {
                let jrow = &l[j * stride..(j + 1) * stride];
                // l_jp sits at offset p + bw - j
                let off = lo + bw - j;
                let mut s = arow[j + bw - i];
                for (wp, ljp) in w[lo..j].iter().zip(&jrow[off..off + (j - lo)]) {
                    s -= wp * ljp;
                }
                w[j] = s;
                l[i * stride + j + bw - i] = s / d[j];
            }
            let irow = &l[i * stride..(i + 1) * stride];
            let off = lo + bw - i;
            let mut di = arow[bw];
            for (wp, lip) in w[lo..i].iter().zip(&irow[off..off + (i - lo)]) {
                di -= wp * lip;
            }
            if !di.is_finite() || di.abs() <= PIVOT_FLOOR * scale {
                return Err(PivotBreakdown { row: i, pivot: di });
            }
            d[i] = di;
        }
        Ok(BandLdlt { n, bw, l, d })
    }

    /// Number of negative pivots, i.e. the negative inertia of the factored matrix.
    pub fn negative_count(&self) -> usize {
        self.d.iter().filter(|&&v| v < 0.0).count()
    }

    pub fn pivots(&self) -> &[f64] {
        &self.d
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.n;
        let bw = self.bw;
        let stride = bw + 1;
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let row = &self.l[i * stride..(i + 1) * stride];
            let off = lo + bw - i;
            let mut s = x[i];
            for (lij, xj) in row[off..off + (i - lo)].iter().zip(&x[lo..i]) {
                s -= lij * xj;
            }
            x[i] = s;
        }
        for (xi, di) in x.iter_mut().zip(&self.d) {
            *xi /= di;
        }
        for i in (0..n).rev() {
            let lo = i.saturating_sub(bw);
            let row = &self.l[i * stride..(i + 1) * stride];
            let off = lo + bw - i;
            let xi = x[i];
            for (lij, xj) in row[off..off + (i - lo)].iter().zip(x[lo..i].iter_mut()) {
                *xj -= lij * xi;
            }
        }
    }
}
