//! Calibration corpus: band-limited random fields with prescribed dyadic
//! block decay, used by the norm-equivalence and operator-boundedness
//! checks.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::grid::{inverse, Field, GridSpec, SpectralField};
use crate::lp;

/// `count` random fields whose level-`j` block sups equal `2^(-j alpha)`
/// exactly, with `alpha` spread over `[-1.5, 1.5]`. Returns `(field, alpha)`
/// pairs.
pub fn random_band_fields(spec: GridSpec, count: usize, seed: u64) -> Vec<(Field, f64)> {
    let part = lp::build_partition(spec).expect("partition");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let top = part.top_level;
    (0..count)
        .map(|i| {
            let alpha = if count > 1 { -1.5 + 3.0 * i as f64 / (count - 1) as f64 } else { 0.5 };
            let mut raw = SpectralField::zeros(spec);
            for c in &mut raw.coeffs {
                *c = Complex64::from_polar(1.0, rng.gen_range(0.0..crate::grid::TAU));
            }
            let mut acc = Field::zeros(spec);
            for j in 2..top {
                let psi = &part.multipliers[j];
                let coeffs: Vec<Complex64> =
                    raw.coeffs.iter().zip(psi).map(|(c, m)| c * m).collect();
                let block = inverse(&SpectralField { spec, coeffs }).expect("inverse");
                let sup = block.linf();
                if sup == 0.0 {
                    continue;
                }
                let target = 2f64.powf(-(j as f64) * alpha);
                let scale = target / sup;
                for (a, b) in acc.samples.iter_mut().zip(&block.samples) {
                    *a += b * scale;
                }
            }
            (acc, alpha)
        })
        .collect()
}
