//! Littlewood-Paley partitions of unity and dyadic-block Besov norms.
//!
//! The partition is built by telescoping a smooth radial low-pass `chi`
//! (1 on `|xi| <= 1`, 0 on `|xi| >= 2`): `psi_0 = chi` and
//! `psi_j(xi) = chi(2^-j xi) - chi(2^-j+1 xi)` for `j >= 1`, so `psi_j` is
//! supported in the annulus `2^(j-1) <= |xi| <= 2^(j+1)` and the family sums
//! to one up to the top level `J`, chosen so `2^J` reaches the lattice
//! Nyquist radius.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{self, ScalingFit};
use crate::grid::{inverse, transform, Field, GridSpec};
use crate::smooth;

/// Dyadic multiplier family evaluated on the frequency lattice.
#[derive(Debug, Clone)]
pub struct LPPartition {
    pub spec: GridSpec,
    /// Top level `J`; `multipliers.len() == J + 1`.
    pub top_level: usize,
    pub multipliers: Vec<Vec<f64>>,
}

/// Besov space parameters. Only `p, q` in `{1, 2, inf}` are supported.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesovParams {
    pub alpha: f64,
    pub p: f64,
    pub q: f64,
}

impl BesovParams {
    pub fn new(alpha: f64, p: f64, q: f64) -> Result<Self> {
        for v in [p, q] {
            if !(v == 1.0 || v == 2.0 || v.is_infinite()) {
                return Err(Error::UnsupportedParams(format!(
                    "p and q must be 1, 2 or inf, got {v}"
                )));
            }
        }
        if !alpha.is_finite() {
            return Err(Error::UnsupportedParams("alpha must be finite".into()));
        }
        Ok(Self { alpha, p, q })
    }

    /// Hoelder-scale parameters `B^alpha_{inf,inf}`.
    pub fn holder(alpha: f64) -> Self {
        Self { alpha, p: f64::INFINITY, q: f64::INFINITY }
    }
}

pub fn build_partition(spec: GridSpec) -> Result<LPPartition> {
    let radii: Vec<f64> = (0..spec.len())
        .map(|i| {
            let xi = spec.xi_of_flat(i);
            (xi[0] * xi[0] + xi[1] * xi[1]).sqrt()
        })
        .collect();
    let max_r = radii.iter().copied().fold(0.0, f64::max);
    // Smallest J with 2^J >= max |xi| so the telescoped sum is 1 on the lattice.
    let top_level = max_r.log2().ceil().max(1.0) as usize;

    let mut multipliers = Vec::with_capacity(top_level + 1);
    multipliers.push(radii.iter().map(|&r| smooth::chi(r)).collect::<Vec<f64>>());
    let mut prev: Vec<f64> = multipliers[0].clone();
    for j in 1..=top_level {
        let scale = 2f64.powi(-(j as i32));
        let cur: Vec<f64> = radii.iter().map(|&r| smooth::chi(scale * r)).collect();
        multipliers.push(cur.iter().zip(&prev).map(|(c, p)| (c - p).max(0.0)).collect());
        prev = cur;
    }
    Ok(LPPartition { spec, top_level, multipliers })
}

impl LPPartition {
    /// Value of `psi_j` at integer frequency `k`.
    pub fn multiplier_at(&self, j: usize, k: [i64; 2]) -> f64 {
        self.multipliers[j][self.spec.flat_of_freq(k)]
    }
}

/// Dyadic block `psi_j(D) u`, computed spectrally.
pub fn block(u: &Field, part: &LPPartition, j: usize) -> Result<Field> {
    if j > part.top_level {
        return Err(Error::LevelOutOfRange { j, max: part.top_level });
    }
    u.same_grid(&Field::zeros(part.spec)).map_err(|_| Error::InvalidArgument("partition grid mismatch".into()))?;
    let sf = transform(u)?;
    let psi = &part.multipliers[j];
    let coeffs = sf.coeffs.iter().zip(psi).map(|(c, m)| c * m).collect();
    inverse(&crate::grid::SpectralField { spec: u.spec, coeffs })
}

/// `L^p` norms of every dyadic block, sharing a single forward transform.
pub fn block_norms(u: &Field, part: &LPPartition, p: f64) -> Result<Vec<f64>> {
    let sf = transform(u)?;
    let mut out = Vec::with_capacity(part.top_level + 1);
    for psi in &part.multipliers {
        let coeffs = sf.coeffs.iter().zip(psi).map(|(c, m)| c * m).collect();
        let b = inverse(&crate::grid::SpectralField { spec: u.spec, coeffs })?;
        out.push(b.lp_norm(p));
    }
    Ok(out)
}

/// Besov norm per the dyadic-block definition: for `q = inf` it is
/// `sup_j 2^(j alpha) ||psi_j(D) u||_p`, for finite `q` the corresponding
/// `l^q` sum over levels.
pub fn besov_norm(u: &Field, part: &LPPartition, prm: &BesovParams) -> Result<f64> {
    BesovParams::new(prm.alpha, prm.p, prm.q)?;
    let norms = block_norms(u, part, prm.p)?;
    let weighted = norms
        .iter()
        .enumerate()
        .map(|(j, n)| 2f64.powf(prm.alpha * j as f64) * n);
    if prm.q.is_infinite() {
        Ok(weighted.fold(0.0, f64::max))
    } else {
        Ok(weighted.map(|v| v.powf(prm.q)).sum::<f64>().powf(1.0 / prm.q))
    }
}

/// Fit the dyadic decay exponent of the block sups over the usable window
/// `j in [2, J-2]`: if `||psi_j(D) u||_inf ~ 2^(-j alpha)` the returned slope
/// is `alpha`. Levels near DC and Nyquist are excluded; a capped result marks
/// decay faster than the ladder resolves.
pub fn block_exponent(u: &Field, part: &LPPartition) -> Result<ScalingFit> {
    if part.top_level < 5 {
        return Err(Error::TooFewFitPoints { found: part.top_level.saturating_sub(3), need: fit::MIN_FIT_POINTS });
    }
    let sups = block_norms(u, part, f64::INFINITY)?;
    let samples: Vec<(f64, f64)> = (2..=part.top_level - 2)
        .map(|j| (2f64.powi(-(j as i32)), sups[j]))
        .collect();
    fit::fit_exponent(&samples, u.linf(), fit::CAP_SLOPE)
}
