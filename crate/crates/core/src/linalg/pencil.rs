//! Generalized symmetric pencils `A v = mu W v` with a band `A` and a positive
//! diagonal `W`: inertia counts, full spectra of small problems, and spectrum
//! slicing with shift-invert subspace iteration.

use super::band::{BandLdlt, SymBand};
use super::dense::SymmetricEigen;
use super::tridiag::band_to_tridiagonal;
use crate::error::{Error, Result};

/// Shift perturbation applied after a pivot breakdown, relative to `max(1, |sigma|)`.
pub const SHIFT_PERTURBATION: f64 = 1e-8;
pub const MAX_SHIFT_RETRIES: usize = 3;
/// Largest eigenvalue count handled by a single shift-invert solve before the window is split.
pub const MAX_SLICE: usize = 10;
const MAX_ITERATIONS: usize = 400;
const STRICT_TOL: f64 = 1e-11;
const ACCEPT_TOL: f64 = 1e-9;
/// A stalled iteration is also accepted at this many ulps of `||W^-1 A||`.
const ROUNDOFF_ULPS: f64 = 1e4;
const CLUSTER_GAP: f64 = 1e-6;

/// One eigenpair in natural ordering, normalized so that `v^T W v = 1`.
#[derive(Debug, Clone)]
pub struct RawPair {
    pub mu: f64,
    pub vector: Vec<f64>,
    /// `||A v - mu W v|| / ||W v||`
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct Pencil {
    a: SymBand,
    w: Vec<f64>,
    /// `perm[p]` is the natural index stored at band position `p`
    perm: Vec<usize>,
}

impl Pencil {
    /// `a` and `w` must already be in band ordering.
    pub fn new(a: SymBand, w: Vec<f64>, perm: Vec<usize>) -> Self {
        assert_eq!(a.n(), w.len());
        assert_eq!(a.n(), perm.len());
        debug_assert!(w.iter().all(|&x| x > 0.0));
        Pencil { a, w, perm }
    }

    pub fn natural(a: SymBand, w: Vec<f64>) -> Self {
        let n = a.n();
        Pencil::new(a, w, (0..n).collect())
    }

    pub fn n(&self) -> usize {
        self.a.n()
    }

    pub fn stiffness(&self) -> &SymBand {
        &self.a
    }

    /// Factor `A - sigma W`, nudging the shift on pivot breakdown. Returns the shift used.
    pub fn factor_at(&self, sigma: f64) -> Result<(BandLdlt, f64)> {
        let mut shift = sigma;
        for attempt in 0..=MAX_SHIFT_RETRIES {
            match BandLdlt::factor(&self.a.shifted(shift, &self.w)) {
                Ok(f) => return Ok((f, shift)),
                Err(_) if attempt < MAX_SHIFT_RETRIES => {
                    shift += SHIFT_PERTURBATION * sigma.abs().max(1.0);
                }
                Err(_) => break,
            }
        }
        Err(Error::Breakdown {
            shift,
            retries: MAX_SHIFT_RETRIES,
        })
    }

    /// Number of eigenvalues strictly below `sigma` (up to the retry perturbation).
    pub fn count_below(&self, sigma: f64) -> Result<usize> {
        Ok(self.factor_at(sigma)?.0.negative_count())
    }

    /// Every eigenvalue, ascending, through `W^{-1/2} A W^{-1/2}`, band reduction and QL.
    pub fn all_eigenvalues(&self) -> Result<Vec<f64>> {
        let s: Vec<f64> = self.w.iter().map(|w| 1.0 / w.sqrt()).collect();
        band_to_tridiagonal(&self.a.scaled(&s)).eigenvalues()
    }

    /// The `k` smallest eigenpairs. Eigenvalues come from QL; vectors from
    /// block inverse iteration, one block per cluster of (near-)degenerate values.
    pub fn lowest(&self, k: usize) -> Result<Vec<RawPair>> {
        let values = self.all_eigenvalues()?;
        let k = k.min(values.len());
        // extend the last cluster past k so degenerate partners are not split
        let mut end = k;
        while end > 0 && end < values.len() && is_close(values[end - 1], values[end]) {
            end += 1;
        }
        let mut out = Vec::with_capacity(end);
        let mut start = 0;
        while start < end {
            let mut stop = start + 1;
            while stop < end && is_close(values[stop - 1], values[stop]) {
                stop += 1;
            }
            let cluster = &values[start..stop];
            // shifting exactly onto the cluster makes the solve ill-conditioned;
            // stay below it by a fraction of the gap to the neighbours
            let below = if start > 0 {
                cluster[0] - values[start - 1]
            } else {
                f64::INFINITY
            };
            let above = values
                .get(stop)
                .map_or(f64::INFINITY, |v| v - cluster[cluster.len() - 1]);
            let offset = (0.25 * below.min(above)).min(1e-3 * cluster[0].abs().max(1.0));
            let mut pairs = self.subspace(cluster[0] - offset, cluster.len(), Select::Nearest)?;
            // keep the QL values, which are the more accurate of the two
            for (pair, &mu) in pairs.iter_mut().zip(cluster) {
                pair.mu = mu;
                pair.residual = self.residual(mu, &pair.vector);
            }
            out.extend(pairs);
            start = stop;
        }
        out.truncate(k);
        Ok(out)
    }

    /// Every eigenpair with `lo <= mu <= hi`, certified by two inertia counts.
    pub fn in_interval(&self, lo: f64, hi: f64) -> Result<Vec<RawPair>> {
        Ok(self.in_interval_certified(lo, hi)?.0)
    }

    /// As `in_interval`, also returning the inertia difference that certifies the count.
    pub fn in_interval_certified(&self, lo: f64, hi: f64) -> Result<(Vec<RawPair>, usize)> {
        let (lo, hi, c_lo, c_hi) = self.inertia_bracket(lo, hi)?;
        let pairs = self.slice(lo, hi, c_lo, c_hi)?;
        let count = c_hi.saturating_sub(c_lo);
        if pairs.len() != count {
            return Err(Error::NoConvergence {
                what: "interval eigenpair count",
                iterations: pairs.len(),
            });
        }
        Ok((pairs, count))
    }

    /// Number of eigenvalues in `[lo, hi]` from two inertia counts.
    pub fn count_in(&self, lo: f64, hi: f64) -> Result<usize> {
        let (_, _, c_lo, c_hi) = self.inertia_bracket(lo, hi)?;
        Ok(c_hi.saturating_sub(c_lo))
    }

    fn inertia_bracket(&self, lo: f64, hi: f64) -> Result<(f64, f64, usize, usize)> {
        if hi < lo {
            return Err(Error::InvalidArgument(format!("empty interval [{lo}, {hi}]")));
        }
        let (f_lo, lo) = self.factor_at(lo)?;
        let c_lo = f_lo.negative_count();
        drop(f_lo);
        let (f_hi, hi) = self.factor_at(hi)?;
        Ok((lo, hi, c_lo, f_hi.negative_count()))
    }

    fn slice(&self, lo: f64, hi: f64, c_lo: usize, c_hi: usize) -> Result<Vec<RawPair>> {
        let k = c_hi.saturating_sub(c_lo);
        if k == 0 {
            return Ok(Vec::new());
        }
        if k > MAX_SLICE && hi - lo > 1e-12 * hi.abs().max(1.0) {
            let (f_mid, mid) = self.factor_at(0.5 * (lo + hi))?;
            let c_mid = f_mid.negative_count();
            drop(f_mid);
            let mut left = self.slice(lo, mid, c_lo, c_mid)?;
            left.extend(self.slice(mid, hi, c_mid, c_hi)?);
            return Ok(left);
        }
        let pairs = self.subspace(0.5 * (lo + hi), k, Select::Interval { lo, hi })?;
        Ok(pairs)
    }

    /// The `k` smallest eigenpairs without a full reduction: grow an upper shift until
    /// its inertia reaches `k`, then slice `[floor, shift]`. `floor` must lie below the spectrum.
    pub fn lowest_by_slicing(&self, k: usize, floor: f64, guess: f64) -> Result<Vec<RawPair>> {
        let k = k.min(self.n());
        if k == 0 {
            return Ok(Vec::new());
        }
        let mut hi = guess.max(1e-3);
        let mut count = self.count_below(hi)?;
        while count < k {
            hi *= 2.0;
            count = self.count_below(hi)?;
        }
        let mut pairs = self.in_interval(floor, hi)?;
        pairs.sort_by(|a, b| a.mu.total_cmp(&b.mu));
        pairs.truncate(k);
        Ok(pairs)
    }

    /// `A v` with `v` and the result in natural ordering.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let x = self.to_band(v);
        let mut ax = vec![0.0; x.len()];
        self.a.matvec(&x, &mut ax);
        self.to_natural(&ax)
    }

    /// Diagonal of `W` in natural ordering.
    pub fn weight_natural(&self) -> Vec<f64> {
        self.to_natural(&self.w)
    }

    /// `||A v - mu W v|| / ||W v||` for a vector in natural ordering.
    pub fn residual(&self, mu: f64, v: &[f64]) -> f64 {
        let x = self.to_band(v);
        let mut ax = vec![0.0; x.len()];
        self.a.matvec(&x, &mut ax);
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..x.len() {
            let wx = self.w[i] * x[i];
            num += (ax[i] - mu * wx).powi(2);
            den += wx * wx;
        }
        (num / den).sqrt()
    }

    fn to_band(&self, v: &[f64]) -> Vec<f64> {
        self.perm.iter().map(|&i| v[i]).collect()
    }

    fn to_natural(&self, x: &[f64]) -> Vec<f64> {
        let mut v = vec![0.0; x.len()];
        for (p, &i) in self.perm.iter().enumerate() {
            v[i] = x[p];
        }
        v
    }

    /// `max_i sum_j |a_ij| / w_i`
    fn scaled_norm(&self) -> f64 {
        let n = self.n();
        let bw = self.a.bandwidth();
        (0..n)
            .map(|i| {
                let lo = i.saturating_sub(bw);
                let hi = (i + bw).min(n - 1);
                (lo..=hi).map(|j| self.a.get(i, j).abs()).sum::<f64>() / self.w[i]
            })
            .fold(0.0, f64::max)
    }

    fn w_dot(&self, x: &[f64], y: &[f64]) -> f64 {
        x.iter().zip(y).zip(&self.w).map(|((a, b), w)| a * b * w).sum()
    }

    /// Shift-invert subspace iteration with Rayleigh-Ritz at `sigma`, returning `k` pairs.
    fn subspace(&self, sigma: f64, k: usize, select: Select) -> Result<Vec<RawPair>> {
        let n = self.n();
        let block = match select {
            Select::Nearest => (k + 3).min(n),
            Select::Interval { .. } => (2 * k + 4).min(n),
        };
        let (fac, sigma) = self.factor_at(sigma)?;
        let mut rng = 0x9e37_79b9_7f4a_7c15_u64 ^ (n as u64).wrapping_mul(0x2545_f491_4f6c_dd1d);
        let mut x: Vec<Vec<f64>> = (0..block)
            .map(|_| (0..n).map(|_| unit_noise(&mut rng)).collect())
            .collect();

        let accept = ACCEPT_TOL.max(ROUNDOFF_ULPS * f64::EPSILON * self.scaled_norm());
        let mut history: Vec<f64> = Vec::new();
        for iteration in 0..MAX_ITERATIONS {
            let mut y: Vec<Vec<f64>> = x
                .iter()
                .map(|col| {
                    let mut v: Vec<f64> = col.iter().zip(&self.w).map(|(a, w)| a * w).collect();
                    fac.solve_in_place(&mut v);
                    v
                })
                .collect();
            for _ in 0..2 {
                for a in 0..y.len() {
                    for b in 0..a {
                        let proj = self.w_dot(&y[b], &y[a]);
                        let (head, tail) = y.split_at_mut(a);
                        for (ya, yb) in tail[0].iter_mut().zip(&head[b]) {
                            *ya -= proj * yb;
                        }
                    }
                    let mut norm = self.w_dot(&y[a], &y[a]).sqrt();
                    if !(norm > 1e-300) {
                        y[a] = (0..n).map(|_| unit_noise(&mut rng)).collect();
                        norm = self.w_dot(&y[a], &y[a]).sqrt();
                    }
                    y[a].iter_mut().for_each(|v| *v /= norm);
                }
            }
            let ay: Vec<Vec<f64>> = y
                .iter()
                .map(|col| {
                    let mut out = vec![0.0; n];
                    self.a.matvec(col, &mut out);
                    out
                })
                .collect();
            let p = y.len();
            let mut h = vec![0.0; p * p];
            for a in 0..p {
                for b in 0..=a {
                    let v: f64 = y[a].iter().zip(&ay[b]).map(|(u, v)| u * v).sum();
                    let u: f64 = y[b].iter().zip(&ay[a]).map(|(u, v)| u * v).sum();
                    h[a * p + b] = 0.5 * (u + v);
                    h[b * p + a] = 0.5 * (u + v);
                }
            }
            let ritz = SymmetricEigen::new(h, p)?;
            let mut xs = vec![vec![0.0; n]; p];
            let mut axs = vec![vec![0.0; n]; p];
            for c in 0..p {
                for r in 0..p {
                    let z = ritz.vectors[r * p + c];
                    if z == 0.0 {
                        continue;
                    }
                    for i in 0..n {
                        xs[c][i] += z * y[r][i];
                        axs[c][i] += z * ay[r][i];
                    }
                }
            }
            let residual = |c: usize| {
                let theta = ritz.values[c];
                let mut num = 0.0;
                let mut den = 0.0;
                for i in 0..n {
                    let wx = self.w[i] * xs[c][i];
                    num += (axs[c][i] - theta * wx).powi(2);
                    den += wx * wx;
                }
                (num / den).sqrt()
            };

            let chosen: Option<Vec<usize>> = match select {
                Select::Nearest => {
                    let mut idx: Vec<usize> = (0..p).collect();
                    idx.sort_by(|&i, &j| {
                        (ritz.values[i] - sigma)
                            .abs()
                            .total_cmp(&(ritz.values[j] - sigma).abs())
                    });
                    idx.truncate(k);
                    idx.sort();
                    Some(idx)
                }
                Select::Interval { lo, hi } => {
                    let idx: Vec<usize> = (0..p)
                        .filter(|&c| ritz.values[c] >= lo && ritz.values[c] <= hi)
                        .collect();
                    (idx.len() == k).then_some(idx)
                }
            };
            if let Some(idx) = chosen {
                let res: Vec<f64> = idx.iter().map(|&c| residual(c)).collect();
                let worst = idx
                    .iter()
                    .zip(&res)
                    .map(|(&c, r)| r / ritz.values[c].abs().max(1.0))
                    .fold(0.0_f64, f64::max);
                history.push(worst);
                let stalled = history.len() > 6 && {
                    let recent = history[history.len() - 1];
                    let before = history[history.len() - 6];
                    recent > 0.5 * before
                };
                if worst <= STRICT_TOL || (stalled && worst <= accept) {
                    let mut out: Vec<RawPair> = idx
                        .iter()
                        .zip(&res)
                        .map(|(&c, &r)| RawPair {
                            mu: ritz.values[c],
                            vector: fix_sign(self.to_natural(&xs[c])),
                            residual: r,
                        })
                        .collect();
                    out.sort_by(|a, b| a.mu.total_cmp(&b.mu));
                    return Ok(out);
                }
            } else {
                history.clear();
            }
            if iteration + 1 == MAX_ITERATIONS {
                break;
            }
            x = xs;
        }
        Err(Error::NoConvergence {
            what: "shift-invert subspace iteration",
            iterations: MAX_ITERATIONS,
        })
    }
}

#[derive(Debug, Clone, Copy)]
enum Select {
    Nearest,
    Interval { lo: f64, hi: f64 },
}

fn is_close(a: f64, b: f64) -> bool {
    (b - a).abs() <= CLUSTER_GAP * a.abs().max(b.abs()).max(1.0)
}

fn unit_noise(state: &mut u64) -> f64 {
    *state ^= *state << 13;
    *state ^= *state >> 7;
    *state ^= *state << 17;
    (*state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
}

/// First entry above `1e-8 max|v|` is made positive.
pub fn fix_sign(mut v: Vec<f64>) -> Vec<f64> {
    let peak = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-8 * peak) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    v
}

/// Position of natural index `i` in the interleaved order `0, n-1, 1, n-2, ...`,
/// which turns a periodic tridiagonal coupling into bandwidth two.
pub fn interleave_position(i: usize, n: usize) -> usize {
    if i < n.div_ceil(2) {
        2 * i
    } else {
        2 * (n - 1 - i) + 1
    }
}

/// `perm[p]` = natural index at interleaved position `p`.
pub fn interleave_permutation(n: usize) -> Vec<usize> {
    let mut perm = vec![0; n];
    for i in 0..n {
        perm[interleave_position(i, n)] = i;
    }
    perm
}

#[cfg(test)]
mod tests {
    use super::*;

    fn periodic_laplacian(n: usize) -> Pencil {
        let perm = interleave_permutation(n);
        let mut pos = vec![0; n];
        for (p, &i) in perm.iter().enumerate() {
            pos[i] = p;
        }
        let mut a = SymBand::zeros(n, 2);
        for i in 0..n {
            let j = (i + 1) % n;
            a.add(pos[i], pos[i], 2.0);
            a.add(pos[i], pos[j], -1.0);
        }
        Pencil::new(a, vec![1.0; n], perm)
    }

    #[test]
    fn interleave_is_a_permutation_with_short_links() {
        for n in [3, 4, 9, 64] {
            let perm = interleave_permutation(n);
            let mut seen = vec![false; n];
            perm.iter().for_each(|&i| seen[i] = true);
            assert!(seen.iter().all(|&s| s));
            for i in 0..n {
                let d = interleave_position(i, n).abs_diff(interleave_position((i + 1) % n, n));
                assert!(d <= 2, "n={n} i={i} d={d}");
            }
        }
    }

    #[test]
    fn periodic_spectrum_and_degenerate_vectors() {
        let n = 64;
        let p = periodic_laplacian(n);
        let pairs = p.lowest(5).unwrap();
        let exact = |k: usize| 2.0 - 2.0 * (2.0 * std::f64::consts::PI * k as f64 / n as f64).cos();
        let want = [exact(0), exact(1), exact(1), exact(2), exact(2)];
        for (pair, w) in pairs.iter().zip(want) {
            assert!((pair.mu - w).abs() < 1e-12);
            assert!(pair.residual < 1e-9);
        }
        // the degenerate pair is orthonormal
        let d: f64 = pairs[1].vector.iter().zip(&pairs[2].vector).map(|(a, b)| a * b).sum();
        assert!(d.abs() < 1e-10);
    }

    #[test]
    fn interval_search_is_certified() {
        let p = periodic_laplacian(100);
        let all = p.all_eigenvalues().unwrap();
        let (lo, hi) = (0.05, 0.9);
        let want: Vec<f64> = all.iter().copied().filter(|v| *v >= lo && *v <= hi).collect();
        let got = p.in_interval(lo, hi).unwrap();
        assert_eq!(got.len(), want.len());
        assert!(want.len() > MAX_SLICE, "exercise the slicing path");
        for (g, w) in got.iter().zip(&want) {
            assert!((g.mu - w).abs() < 1e-10);
        }
        assert!(p.in_interval(0.0005, 0.0006).unwrap().is_empty());
    }

    #[test]
    fn slicing_lowest_agrees_with_reduction() {
        let p = periodic_laplacian(80);
        let a = p.lowest(7).unwrap();
        let b = p.lowest_by_slicing(7, -1.0, 0.01).unwrap();
        assert_eq!(b.len(), 7);
        for (x, y) in a.iter().zip(&b) {
            assert!((x.mu - y.mu).abs() < 1e-10);
        }
        let v = &b[3].vector;
        let av = p.apply(v);
        let w = p.weight_natural();
        let r: f64 = av
            .iter()
            .zip(v)
            .zip(&w)
            .map(|((a, v), w)| (a - b[3].mu * w * v).powi(2))
            .sum();
        assert!(r.sqrt() < 1e-8);
    }
}
