//! Scale ladders and log-log regression of decay exponents.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// Default cap: decays steeper than this are reported as `capped`.
pub const CAP_SLOPE: f64 = 8.0;

/// Fits landing within this distance below the cap count as saturated;
/// covers regression noise from ladder-top truncation effects.
pub const CAP_SLACK: f64 = 0.4;

/// Relative floor below which a sup value counts as numerically zero.
pub const ZERO_FLOOR: f64 = 1e-12;

/// Minimum number of usable ladder points for a regression.
pub const MIN_FIT_POINTS: usize = 4;

/// Decreasing dilation scales `lambda` in `(0,1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaLadder {
    values: Vec<f64>,
}

impl LambdaLadder {
    /// Anti-aliasing floor for a grid: `4 * spacing / L = 4 / N`.
    pub fn floor_for(spec: &GridSpec) -> f64 {
        4.0 / spec.n_per_axis as f64
    }

    pub fn new(values: Vec<f64>, spec: &GridSpec) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyLadder);
        }
        let floor = Self::floor_for(spec);
        for w in values.windows(2) {
            if w[1] >= w[0] {
                return Err(Error::InvalidArgument("ladder values must be strictly decreasing".into()));
            }
        }
        for &v in &values {
            if !(0.0 < v && v < 1.0) {
                return Err(Error::InvalidArgument(format!("ladder value {v} outside (0,1)")));
            }
            if v < floor {
                return Err(Error::LambdaBelowFloor(v, floor));
            }
        }
        Ok(Self { values })
    }

    /// Default dyadic ladder `lambda_k = 2^-k`, `k = 1 .. log2(N) - 4`.
    pub fn dyadic(spec: &GridSpec) -> Result<Self> {
        let kmax = spec.n_per_axis.ilog2() as i32 - 4;
        if kmax < 1 {
            return Err(Error::EmptyLadder);
        }
        let values = (1..=kmax).map(|k| 2f64.powi(-k)).collect();
        Self::new(values, spec)
    }

    /// Half-octave refinement of the dyadic ladder. Two samples per octave
    /// average out the log-periodic wobble the oscillating kernel tail
    /// imprints on dyadic sups, which steadies the slope fits.
    pub fn half_octave(spec: &GridSpec) -> Result<Self> {
        let kmax = spec.n_per_axis.ilog2() as i32 - 4;
        if kmax < 1 {
            return Err(Error::EmptyLadder);
        }
        let values = (2..=2 * kmax).map(|k| 2f64.powf(-0.5 * k as f64)).collect();
        Self::new(values, spec)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A fitted decay exponent `slope` from `sup ~ lambda^slope`, with the
/// regression diagnostics and the scales that entered the fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub ladder: Vec<f64>,
    pub capped: bool,
}

impl ScalingFit {
    pub fn capped_at(cap: f64, ladder: Vec<f64>) -> Self {
        Self { slope: cap, intercept: 0.0, r_squared: 0.0, ladder, capped: true }
    }
}

/// Least-squares slope of `log(sup)` against `log(lambda)`.
///
/// `reference` sets the zero floor: samples below `ZERO_FLOOR * reference`
/// are treated as numerically zero. If fewer than [`MIN_FIT_POINTS`] samples
/// survive, the decay outran the ladder and a capped result is returned; the
/// same happens when the fitted slope exceeds `cap`.
pub fn fit_exponent(samples: &[(f64, f64)], reference: f64, cap: f64) -> Result<ScalingFit> {
    if samples.is_empty() {
        return Err(Error::EmptyLadder);
    }
    let floor = ZERO_FLOOR * reference.max(f64::MIN_POSITIVE);
    let ladder: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let usable: Vec<(f64, f64)> =
        samples.iter().copied().filter(|&(_, v)| v > floor && v.is_finite()).collect();
    if samples.len() < MIN_FIT_POINTS && usable.len() == samples.len() {
        return Err(Error::TooFewFitPoints { found: samples.len(), need: MIN_FIT_POINTS });
    }
    if usable.len() < MIN_FIT_POINTS {
        // Whatever survived the floor decayed out mid-ladder.
        return Ok(ScalingFit::capped_at(cap, ladder));
    }

    let n = usable.len() as f64;
    let xs: Vec<f64> = usable.iter().map(|s| s.0.ln()).collect();
    let ys: Vec<f64> = usable.iter().map(|s| s.1.ln()).collect();
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return Err(Error::TooFewFitPoints { found: 1, need: MIN_FIT_POINTS });
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;

    let ymean = sy / n;
    let ss_tot: f64 = ys.iter().map(|y| (y - ymean) * (y - ymean)).sum();
    let ss_res: f64 =
        xs.iter().zip(&ys).map(|(x, y)| (y - (slope * x + intercept)).powi(2)).sum();
    let r_squared = if ss_tot < 1e-30 { 1.0 } else { (1.0 - ss_res / ss_tot).clamp(0.0, 1.0) };

    if slope >= cap - CAP_SLACK {
        return Ok(ScalingFit::capped_at(cap, ladder));
    }
    Ok(ScalingFit { slope, intercept, r_squared, ladder, capped: false })
}
