//! Closed-form communication models and curve fits.
//!
//! Volumes are exact integer bit counts in `u128`. The cover-edge transfer
//! term involves the real-valued ratio `k`; it is evaluated exactly from the
//! binary expansion of the `f64` and rounded up once.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::ceil_log2;

/// Exponential fit of the horizontal-edge ratio against RMAT scale,
/// `k = A·e^(−B·scale)`, fitted over scales 6 to 23.
pub const RMAT_K_FIT_A: f64 = 1.1773;
pub const RMAT_K_FIT_B: f64 = 0.036;
/// Triangle count of RMAT graphs as `C·n^E`, fitted up to scale 29.
pub const RMAT_TRIANGLE_COEFF: f64 = 77.422;
pub const RMAT_TRIANGLE_EXPONENT: f64 = 1.125;
/// `⌈log D⌉` assumed for Graph500-scale extrapolations (BFS depth around 7).
pub const EXTRAPOLATION_LOG_D_BITS: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelInputs {
    pub n: u128,
    pub m: u128,
    /// Diameter stand-in; only `⌈log₂ d_hat⌉` enters the formula.
    pub d_hat: u128,
    pub k: f64,
    pub p: u64,
    pub wedges: u128,
}

impl ModelInputs {
    /// Sets `d_hat` so that `⌈log₂ d_hat⌉ = bits`.
    pub fn with_log_d_bits(mut self, bits: u32) -> Self {
        self.d_hat = 1u128 << bits;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.k) {
            return Err(Error::domain(format!("k = {} must lie in [0, 1]", self.k)));
        }
        if self.p == 0 {
            return Err(Error::domain("processor count must be at least 1"));
        }
        if self.m > 0 && self.d_hat == 0 {
            return Err(Error::domain("diameter proxy is 0 for a graph with edges"));
        }
        Ok(())
    }
}

/// Per-category terms of the cover-edge communication volume, in bits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VolumeBreakdown {
    /// `m·(⌈log D⌉ + 3⌈log n⌉)`: level, id pair and degree per traversed edge.
    pub bfs_bits: u128,
    /// `⌈k·m·p·⌈log n⌉⌉`.
    pub cover_bits: u128,
    /// `(p − 1)·⌈log n⌉`.
    pub reduction_bits: u128,
    pub total_bits: u128,
}

/// Splits a non-negative finite `f64` into `mantissa · 2^exponent`.
fn decompose(x: f64) -> (u128, i32) {
    let bits = x.to_bits();
    let raw_exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = (bits & ((1u64 << 52) - 1)) as u128;
    if raw_exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1u128 << 52), raw_exp - 1075)
    }
}

/// `⌈x · factor⌉` computed exactly for `x ≥ 0`.
fn ceil_scaled(x: f64, factor: u128) -> Result<u128> {
    if x == 0.0 || factor == 0 {
        return Ok(0);
    }
    let (mant, exp) = decompose(x);
    let num = mant
        .checked_mul(factor)
        .ok_or(Error::Overflow("cover-edge transfer term"))?;
    if exp >= 0 {
        return num
            .checked_shl(exp as u32)
            .filter(|v| v >> exp == num)
            .ok_or(Error::Overflow("cover-edge transfer term"));
    }
    let shift = (-exp) as u32;
    if shift >= 128 {
        return Ok(u128::from(num > 0));
    }
    let q = num >> shift;
    let rem = num & ((1u128 << shift) - 1);
    Ok(q + u128::from(rem != 0))
}

pub fn cover_edge_volume(inputs: &ModelInputs) -> Result<VolumeBreakdown> {
    inputs.validate()?;
    let overflow = || Error::Overflow("cover-edge communication volume");
    let log_n = ceil_log2(inputs.n) as u128;
    let log_d = ceil_log2(inputs.d_hat) as u128;
    let p = inputs.p as u128;
    let bfs_bits = inputs.m.checked_mul(log_d + 3 * log_n).ok_or_else(overflow)?;
    let factor = inputs
        .m
        .checked_mul(p)
        .and_then(|x| x.checked_mul(log_n))
        .ok_or_else(overflow)?;
    let cover_bits = ceil_scaled(inputs.k, factor)?;
    let reduction_bits = (p - 1) * log_n;
    let total_bits = bfs_bits
        .checked_add(cover_bits)
        .and_then(|x| x.checked_add(reduction_bits))
        .ok_or_else(overflow)?;
    Ok(VolumeBreakdown {
        bfs_bits,
        cover_bits,
        reduction_bits,
        total_bits,
    })
}

/// `m·(⌈log D⌉ + (kp + 3)⌈log n⌉) + (p − 1)⌈log n⌉`, rounded up to whole bits.
pub fn cover_edge_volume_bits(inputs: &ModelInputs) -> Result<u128> {
    cover_edge_volume(inputs).map(|v| v.total_bits)
}

/// Wedge-checking baseline: two vertex ids per wedge query.
pub fn wedge_volume_bits(wedges: u128, n: u128) -> Result<u128> {
    wedges
        .checked_mul(2 * ceil_log2(n) as u128)
        .ok_or(Error::Overflow("wedge communication volume"))
}

pub fn reduction_ratio(previous_bits: u128, new_bits: u128) -> Result<f64> {
    if new_bits == 0 {
        return Err(Error::domain("reduction ratio needs a non-zero new volume"));
    }
    Ok(previous_bits as f64 / new_bits as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    /// Prefactor `A` in `k = A·e^(−B·scale)`.
    pub a: f64,
    /// Decay rate `B`.
    pub b: f64,
    /// Coefficient of determination of the linear fit of `ln k` on scale.
    pub r_squared: f64,
    /// Always `"log"`: R² is measured where the regression is done.
    pub r_squared_space: String,
    pub samples: Vec<(f64, f64)>,
}

impl FitResult {
    pub fn predict(&self, scale: f64) -> f64 {
        self.a * (-self.b * scale).exp()
    }
}

/// Least squares of `ln k` on scale.
pub fn fit_k_exponential(samples: &[(f64, f64)]) -> Result<FitResult> {
    if samples.len() < 3 {
        return Err(Error::domain(format!(
            "exponential fit needs at least 3 samples, got {}",
            samples.len()
        )));
    }
    if let Some(&(s, k)) = samples.iter().find(|(_, k)| !(*k > 0.0) || !k.is_finite()) {
        return Err(Error::domain(format!(
            "k must be positive for the log transform (scale {s}, k {k})"
        )));
    }
    let len = samples.len() as f64;
    let xs: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let x_mean = xs.iter().sum::<f64>() / len;
    let y_mean = ys.iter().sum::<f64>() / len;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - x_mean) * (y - y_mean)).sum();
    if sxx == 0.0 {
        return Err(Error::domain("exponential fit needs at least two distinct scales"));
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let ss_tot: f64 = ys.iter().map(|y| (y - y_mean).powi(2)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (intercept + slope * x)).powi(2))
        .sum();
    let r_squared = if ss_tot == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    Ok(FitResult {
        a: intercept.exp(),
        b: -slope,
        r_squared,
        r_squared_space: "log".into(),
        samples: samples.to_vec(),
    })
}

/// `77.422·n^1.125`.
pub fn estimate_triangles_powerlaw(n: f64) -> Result<f64> {
    if !(n >= 1.0) {
        return Err(Error::domain(format!("vertex count {n} must be at least 1")));
    }
    Ok(RMAT_TRIANGLE_COEFF * n.powf(RMAT_TRIANGLE_EXPONENT))
}

/// `k` predicted by the published RMAT fit at `scale`.
pub fn rmat_k_estimate(scale: f64) -> f64 {
    RMAT_K_FIT_A * (-RMAT_K_FIT_B * scale).exp()
}
