//! Random factors `f = sum_i t_i e_i`, `t_i` uniform on `[0, 1]`, with
//! `e_i = w_i sin(x/2)^N (1 + trig_i(x) / 2) / 2` and `w_i = 2^-i`.
//!
//! Since `sin(x/2) >= |x| / pi` on `[-pi, pi]` and `(1 + trig/2)/2 >= 1/4`, every draw
//! satisfies `f >= c d^N` with `c = sum_i t_i w_i / (4 (pi a)^N)`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::surface::{ConformalFactor, FactorShape, SurfaceOfRevolution, Trig};

/// Points of the cone test along the profile.
pub const CONE_CHECK_POINTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CubeMeasureSpec {
    /// vanishing order `N` on the geodesic
    pub order: u32,
    /// number of basis functions `I_max`
    pub terms: usize,
}

impl Default for CubeMeasureSpec {
    fn default() -> Self {
        CubeMeasureSpec { order: 8, terms: 20 }
    }
}

impl CubeMeasureSpec {
    /// `w_i = 2^-i`, `i = 1..I_max`.
    pub fn weights(&self) -> Vec<f64> {
        (1..=self.terms).map(|i| 0.5f64.powi(i as i32)).collect()
    }

    /// `cos x, sin x, cos 2x, sin 2x, ...`
    pub fn trig(i: usize) -> Trig {
        let k = (i / 2 + 1) as u32;
        if i.is_multiple_of(2) {
            Trig::Cos(k)
        } else {
            Trig::Sin(k)
        }
    }

    /// `sup |e_i| = 3 w_i / 4`.
    pub fn basis_norms(&self) -> Vec<f64> {
        self.weights().iter().map(|w| 0.75 * w).collect()
    }

    /// Tail of the norm series beyond `I_max`, relative to the full sum: `2^-I_max`.
    pub fn relative_tail(&self) -> f64 {
        0.5f64.powi(self.terms as i32)
    }

    fn check(&self) -> Result<()> {
        if self.terms == 0 || self.order < 2 || !self.order.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "cube measure needs terms >= 1 and an even order >= 2, got {} and {}",
                self.terms, self.order
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SampledFactor {
    pub seed: u64,
    pub coefficients: Vec<f64>,
    pub factor: ConformalFactor,
    /// `c` in `f >= c d^N`
    pub cone_constant: f64,
    /// `min f / d^N` over the check grid
    pub cone_margin: f64,
}

impl SampledFactor {
    /// `(s, f(s))` on `n` profile points.
    pub fn profile(&self, surface: &SurfaceOfRevolution, n: usize) -> Vec<(f64, f64)> {
        let l = surface.profile_period();
        (0..n)
            .map(|i| {
                let s = l * i as f64 / n as f64;
                (s, self.factor.value_s(s))
            })
            .collect()
    }
}

/// Pure function of `(spec, seed)`, anchored on the outer equator.
pub fn sample_conformal_factor(
    surface: &SurfaceOfRevolution,
    spec: &CubeMeasureSpec,
    seed: u64,
) -> Result<SampledFactor> {
    spec.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coefficients: Vec<f64> = (0..spec.terms).map(|_| rng.gen::<f64>()).collect();
    sample_from_coefficients(surface, spec, seed, coefficients)
}

fn sample_from_coefficients(
    surface: &SurfaceOfRevolution,
    spec: &CubeMeasureSpec,
    seed: u64,
    coefficients: Vec<f64>,
) -> Result<SampledFactor> {
    let weights = spec.weights();
    let terms: Vec<(f64, Trig)> = coefficients
        .iter()
        .zip(&weights)
        .enumerate()
        .map(|(i, (t, w))| (t * w, CubeMeasureSpec::trig(i)))
        .collect();
    let total: f64 = terms.iter().map(|(c, _)| c).sum();
    if total == 0.0 {
        return Err(Error::InvalidFactor("zero draw: the factor must be non-zero".into()));
    }
    let factor = ConformalFactor::anchored(
        surface,
        surface.outer_equator(),
        FactorShape::Series {
            order: spec.order,
            terms,
        },
    )?;
    let a = surface.transverse_scale();
    let cone_constant = total / (4.0 * (PI * a).powi(spec.order as i32));
    let cone_margin = factor
        .cone_certificate(surface, CONE_CHECK_POINTS, 1)
        .ok_or_else(|| Error::ConeViolation("sampled factor vanishes away from the geodesic".into()))?;
    if cone_margin < cone_constant * (1.0 - 1e-12) {
        return Err(Error::ConeViolation(format!(
            "min f / d^N = {cone_margin:e} below c = {cone_constant:e}"
        )));
    }
    Ok(SampledFactor {
        seed,
        coefficients,
        factor,
        cone_constant,
        cone_margin,
    })
}
