//! Periodic grids, fields, the discrete Fourier transform pair and a library
//! of synthetic test distributions with known singular structure.
//!
//! A [`Field`] holds complex samples `u(x_m)` on the lattice `x_m = m L / N`
//! of the torus `[0,L)^d`. Its [`SpectralField`] counterpart holds
//! coefficients indexed by integer frequencies `k` in `[-N/2, N/2)^d`, stored
//! in FFT order. The transform pair follows the analytic convention
//! `u_hat(xi) = integral of exp(-i xi.x) u(x) dx` with `xi = 2 pi k / L`:
//!
//! - forward: `u_hat(k) = (L/N)^d * sum_m exp(-2 pi i k.m / N) u_m`
//! - inverse: `u_m = (1/L)^d * sum_k exp(+2 pi i k.m / N) u_hat(k)`
//!
//! so that the round trip is the identity and the forward coefficients
//! approximate the continuum Fourier transform of the periodized field.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustfft::{Fft, FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::smooth;

pub const TAU: f64 = std::f64::consts::TAU;

/// Geometry of the periodic grid: `n_per_axis` samples per axis on `[0,L)^d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    pub n_per_axis: usize,
    pub box_length: f64,
}

impl GridSpec {
    pub fn new(dim: usize, n_per_axis: usize, box_length: f64) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidGrid(format!("dim must be 1 or 2, got {dim}")));
        }
        if n_per_axis < 16 || !n_per_axis.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n_per_axis must be a power of two >= 16, got {n_per_axis}"
            )));
        }
        if !(box_length > 0.0) || !box_length.is_finite() {
            return Err(Error::InvalidGrid(format!("box_length must be positive, got {box_length}")));
        }
        Ok(Self { dim, n_per_axis, box_length })
    }

    /// Default torus of side `2 pi`.
    pub fn square(dim: usize, n_per_axis: usize) -> Result<Self> {
        Self::new(dim, n_per_axis, TAU)
    }

    /// Total number of lattice points.
    pub fn len(&self) -> usize {
        self.n_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Lattice spacing `L / N`.
    pub fn spacing(&self) -> f64 {
        self.box_length / self.n_per_axis as f64
    }

    /// Frequency quantum `2 pi / L`: physical frequency is `k * freq_unit()`.
    pub fn freq_unit(&self) -> f64 {
        TAU / self.box_length
    }

    /// Largest `|xi|` on the frequency lattice.
    pub fn max_freq(&self) -> f64 {
        let per_axis = self.n_per_axis as f64 / 2.0 * self.freq_unit();
        per_axis * (self.dim as f64).sqrt()
    }

    /// Integer frequency along one axis for FFT-order index `i`.
    #[inline]
    pub fn k_of_index(&self, i: usize) -> i64 {
        let n = self.n_per_axis;
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// FFT-order index for an integer frequency in `[-N/2, N/2)`.
    #[inline]
    pub fn index_of_k(&self, k: i64) -> usize {
        let n = self.n_per_axis as i64;
        debug_assert!(k >= -n / 2 && k < n / 2);
        k.rem_euclid(n) as usize
    }

    /// Integer frequency vector of a flat spectral index.
    #[inline]
    pub fn freq_of_flat(&self, flat: usize) -> [i64; 2] {
        let n = self.n_per_axis;
        match self.dim {
            1 => [self.k_of_index(flat), 0],
            _ => [self.k_of_index(flat / n), self.k_of_index(flat % n)],
        }
    }

    /// Physical frequency vector `xi = 2 pi k / L` of a flat spectral index.
    #[inline]
    pub fn xi_of_flat(&self, flat: usize) -> [f64; 2] {
        let k = self.freq_of_flat(flat);
        let fu = self.freq_unit();
        [k[0] as f64 * fu, k[1] as f64 * fu]
    }

    /// Flat spectral index of an integer frequency vector.
    #[inline]
    pub fn flat_of_freq(&self, k: [i64; 2]) -> usize {
        match self.dim {
            1 => self.index_of_k(k[0]),
            _ => self.index_of_k(k[0]) * self.n_per_axis + self.index_of_k(k[1]),
        }
    }

    /// Lattice coordinates of a flat sample index.
    #[inline]
    pub fn point_of_flat(&self, flat: usize) -> [f64; 2] {
        let h = self.spacing();
        let n = self.n_per_axis;
        match self.dim {
            1 => [flat as f64 * h, 0.0],
            _ => [(flat / n) as f64 * h, (flat % n) as f64 * h],
        }
    }

    /// Flat sample index of integer lattice coordinates.
    #[inline]
    pub fn flat_of_cell(&self, cell: [usize; 2]) -> usize {
        match self.dim {
            1 => cell[0],
            _ => cell[0] * self.n_per_axis + cell[1],
        }
    }

    /// Nearest lattice cell to a point (periodic wrap).
    pub fn nearest_cell(&self, x: [f64; 2]) -> [usize; 2] {
        let h = self.spacing();
        let n = self.n_per_axis as i64;
        let mut cell = [0usize; 2];
        for a in 0..self.dim {
            let i = (x[a] / h).round() as i64;
            cell[a] = i.rem_euclid(n) as usize;
        }
        cell
    }

    /// Center of the box, snapped to the lattice.
    pub fn center(&self) -> [f64; 2] {
        let mut c = [0.0; 2];
        for a in 0..self.dim {
            c[a] = self.box_length / 2.0;
        }
        c
    }

    /// Shortest periodic displacement from `a` to `b`, component-wise.
    pub fn periodic_delta(&self, from: [f64; 2], to: [f64; 2]) -> [f64; 2] {
        let l = self.box_length;
        let mut d = [0.0; 2];
        for a in 0..self.dim {
            let mut t = to[a] - from[a];
            t -= (t / l).round() * l;
            d[a] = t;
        }
        d
    }

    /// Periodic Euclidean distance.
    pub fn periodic_distance(&self, from: [f64; 2], to: [f64; 2]) -> f64 {
        let d = self.periodic_delta(from, to);
        (d[0] * d[0] + d[1] * d[1]).sqrt()
    }

    fn check_inside(&self, x: [f64; 2], what: &str) -> Result<()> {
        for a in 0..self.dim {
            if !(0.0..self.box_length).contains(&x[a]) {
                return Err(Error::InvalidArgument(format!(
                    "{what} component {a} = {} outside box [0, {})",
                    x[a], self.box_length
                )));
            }
        }
        Ok(())
    }
}

/// Complex samples on the lattice, row-major in the first axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub spec: GridSpec,
    pub samples: Vec<Complex64>,
}

/// Discrete Fourier coefficients of a [`Field`], FFT storage order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub spec: GridSpec,
    pub coeffs: Vec<Complex64>,
}

impl Field {
    pub fn zeros(spec: GridSpec) -> Self {
        Self { spec, samples: vec![Complex64::ZERO; spec.len()] }
    }

    pub fn from_fn(spec: GridSpec, f: impl Fn([f64; 2]) -> Complex64) -> Self {
        let samples = (0..spec.len()).map(|i| f(spec.point_of_flat(i))).collect();
        Self { spec, samples }
    }

    pub fn from_real_fn(spec: GridSpec, f: impl Fn([f64; 2]) -> f64) -> Self {
        Self::from_fn(spec, |x| Complex64::new(f(x), 0.0))
    }

    pub fn all_finite(&self) -> bool {
        self.samples.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Sup norm over the lattice.
    pub fn linf(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `L^p` lattice norm with quadrature weight `(L/N)^(d/p)`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.linf();
        }
        let w = self.spec.spacing().powi(self.spec.dim as i32);
        (self.samples.iter().map(|z| z.norm().powf(p)).sum::<f64>() * w).powf(1.0 / p)
    }

    pub fn scale(&mut self, s: f64) {
        for z in &mut self.samples {
            *z *= s;
        }
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.same_grid(other)?;
        let samples = self.samples.iter().zip(&other.samples).map(|(a, b)| a + b).collect();
        Ok(Field { spec: self.spec, samples })
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.same_grid(other)?;
        let samples = self.samples.iter().zip(&other.samples).map(|(a, b)| a - b).collect();
        Ok(Field { spec: self.spec, samples })
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Field) -> Result<Field> {
        self.same_grid(other)?;
        let samples = self.samples.iter().zip(&other.samples).map(|(a, b)| a * b).collect();
        Ok(Field { spec: self.spec, samples })
    }

    /// Multiply pointwise by a real window evaluated on the lattice.
    pub fn windowed(&self, w: impl Fn([f64; 2]) -> f64) -> Field {
        let samples = self
            .samples
            .iter()
            .enumerate()
            .map(|(i, z)| z * w(self.spec.point_of_flat(i)))
            .collect();
        Field { spec: self.spec, samples }
    }

    pub fn same_grid(&self, other: &Field) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::InvalidArgument("grid mismatch".into()));
        }
        Ok(())
    }
}

impl SpectralField {
    pub fn zeros(spec: GridSpec) -> Self {
        Self { spec, coeffs: vec![Complex64::ZERO; spec.len()] }
    }

    pub fn coeff(&self, k: [i64; 2]) -> Complex64 {
        self.coeffs[self.spec.flat_of_freq(k)]
    }

    /// Apply a real multiplier given as a function of the physical frequency.
    pub fn multiply(&self, m: impl Fn([f64; 2]) -> f64) -> SpectralField {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * m(self.spec.xi_of_flat(i)))
            .collect();
        SpectralField { spec: self.spec, coeffs }
    }

    /// Apply a complex multiplier given as a function of the physical frequency.
    pub fn multiply_complex(&self, m: impl Fn([f64; 2]) -> Complex64) -> SpectralField {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * m(self.spec.xi_of_flat(i)))
            .collect();
        SpectralField { spec: self.spec, coeffs }
    }
}

// Plan cache. Plans are immutable and shareable; one cache per thread keeps
// the transform entry points free of locks.
thread_local! {
    static PLANS: RefCell<HashMap<(usize, bool), Arc<dyn Fft<f64>>>> = RefCell::new(HashMap::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|cache| {
        cache
            .borrow_mut()
            .entry((n, inverse))
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                let dir = if inverse { FftDirection::Inverse } else { FftDirection::Forward };
                planner.plan_fft(n, dir)
            })
            .clone()
    })
}

fn transpose(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

fn fft_in_place(data: &mut [Complex64], spec: &GridSpec, inverse: bool) {
    let n = spec.n_per_axis;
    let fft = plan(n, inverse);
    let mut scratch = vec![Complex64::ZERO; fft.get_inplace_scratch_len()];
    match spec.dim {
        1 => fft.process_with_scratch(data, &mut scratch),
        _ => {
            for row in data.chunks_exact_mut(n) {
                fft.process_with_scratch(row, &mut scratch);
            }
            transpose(data, n);
            for row in data.chunks_exact_mut(n) {
                fft.process_with_scratch(row, &mut scratch);
            }
            transpose(data, n);
        }
    }
}

/// Forward transform: `u_hat(k) = (L/N)^d sum_m exp(-2 pi i k.m/N) u_m`.
pub fn transform(f: &Field) -> Result<SpectralField> {
    if !f.all_finite() {
        return Err(Error::NonFinite);
    }
    let mut coeffs = f.samples.clone();
    fft_in_place(&mut coeffs, &f.spec, false);
    let scale = f.spec.spacing().powi(f.spec.dim as i32);
    for c in &mut coeffs {
        *c *= scale;
    }
    Ok(SpectralField { spec: f.spec, coeffs })
}

/// Inverse transform: `u_m = (1/L)^d sum_k exp(+2 pi i k.m/N) u_hat(k)`.
pub fn inverse(sf: &SpectralField) -> Result<Field> {
    if sf.coeffs.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut samples = sf.coeffs.clone();
    fft_in_place(&mut samples, &sf.spec, true);
    let scale = sf.spec.box_length.powi(-(sf.spec.dim as i32));
    for s in &mut samples {
        *s *= scale;
    }
    Ok(Field { spec: sf.spec, samples })
}

/// Synthetic test distributions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SynthKind {
    /// Dirac delta at `center` (band-limited spectral synthesis, `u_hat = 1`).
    Delta { center: [f64; 2] },
    /// `d/dx_axis` of a Dirac delta (`u_hat = i xi_axis`).
    DeltaDerivative { center: [f64; 2], axis: usize },
    /// `|x - c|^(1/2)` around the box center, windowed away from the boundary.
    RadialQuarterPower,
    /// Lacunary cosine series with Hoelder exponent `alpha` along the first axis.
    Weierstrass { alpha: f64, phase_seed: u64 },
    /// Gaussian bump `exp(-|x-c|^2 / (2 width^2))`.
    Gaussian { center: [f64; 2], width: f64 },
    /// Dirac delta on the hyperplane `x_axis = L/2`.
    LineDelta { axis: usize },
    /// Single lattice mode `exp(i 2 pi k.x / L)`.
    PlaneWave { k: [i64; 2] },
}

/// Output of [`synthesize`]: the field plus a flag raised when the grid is
/// too coarse for delta-type spectral synthesis (`N < 64`).
#[derive(Debug, Clone)]
pub struct SynthResult {
    pub field: Field,
    pub band_limit_warning: bool,
}

pub fn synthesize(kind: &SynthKind, spec: GridSpec) -> Result<SynthResult> {
    let mut warning = false;
    let field = match kind {
        SynthKind::Delta { center } => {
            spec.check_inside(*center, "delta center")?;
            warning = spec.n_per_axis < 64;
            let c = snap(spec, *center);
            spectral_synth(spec, |xi, _| phase(xi, c))?
        }
        SynthKind::DeltaDerivative { center, axis } => {
            spec.check_inside(*center, "delta center")?;
            check_axis(spec, *axis)?;
            warning = spec.n_per_axis < 64;
            let c = snap(spec, *center);
            let axis = *axis;
            // Zero the Nyquist row along the derivative axis: it has no
            // conjugate partner, and keeping it would make the field complex.
            spectral_synth(spec, |xi, k| {
                if k[axis] == -(spec.n_per_axis as i64) / 2 {
                    Complex64::ZERO
                } else {
                    Complex64::new(0.0, xi[axis]) * phase(xi, c)
                }
            })?
        }
        SynthKind::RadialQuarterPower => {
            let c = spec.center();
            let l = spec.box_length;
            Field::from_real_fn(spec, |x| {
                let d = spec.periodic_delta(c, x);
                let r = (d[0] * d[0] + d[1] * d[1]).sqrt();
                let mut w = 1.0;
                for da in d.iter().take(spec.dim) {
                    w *= smooth::plateau(da.abs(), 0.25 * l, 0.48 * l);
                }
                r.sqrt() * w
            })
        }
        SynthKind::Weierstrass { alpha, phase_seed } => {
            if !(*alpha > 0.0 && *alpha < 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "weierstrass alpha must lie in (0,1), got {alpha}"
                )));
            }
            let top = spec.n_per_axis.ilog2() as i64 - 2;
            let mut rng = ChaCha8Rng::seed_from_u64(*phase_seed);
            let phases: Vec<f64> = (0..=top).map(|_| rng.gen_range(0.0..TAU)).collect();
            let fu = spec.freq_unit();
            Field::from_real_fn(spec, |x| {
                let mut v = 0.0;
                for (j, theta) in phases.iter().enumerate() {
                    let freq = (1i64 << j) as f64 * fu;
                    v += 2f64.powf(-(j as f64) * alpha) * (freq * x[0] + theta).cos();
                }
                v
            })
        }
        SynthKind::Gaussian { center, width } => {
            spec.check_inside(*center, "gaussian center")?;
            if !(*width > 0.0) {
                return Err(Error::InvalidArgument("gaussian width must be positive".into()));
            }
            let c = *center;
            let s2 = 2.0 * width * width;
            Field::from_real_fn(spec, |x| {
                let d = spec.periodic_delta(c, x);
                (-(d[0] * d[0] + d[1] * d[1]) / s2).exp()
            })
        }
        SynthKind::LineDelta { axis } => {
            check_axis(spec, *axis)?;
            warning = spec.n_per_axis < 64;
            let axis = *axis;
            let c = snap(spec, spec.center());
            let l = spec.box_length;
            if spec.dim == 1 {
                spectral_synth(spec, |xi, _| phase(xi, c))?
            } else {
                let other = 1 - axis;
                spectral_synth(spec, |xi, k| {
                    if k[other] == 0 {
                        phase(xi, c) * l
                    } else {
                        Complex64::ZERO
                    }
                })?
            }
        }
        SynthKind::PlaneWave { k } => {
            for a in 0..spec.dim {
                let half = spec.n_per_axis as i64 / 2;
                if k[a] < -half || k[a] >= half {
                    return Err(Error::InvalidArgument(format!(
                        "plane wave frequency {} outside [-N/2, N/2)",
                        k[a]
                    )));
                }
            }
            let fu = spec.freq_unit();
            let kv = *k;
            Field::from_fn(spec, |x| {
                let ph = fu * (kv[0] as f64 * x[0] + kv[1] as f64 * x[1]);
                Complex64::from_polar(1.0, ph)
            })
        }
    };
    Ok(SynthResult { field, band_limit_warning: warning })
}

fn check_axis(spec: GridSpec, axis: usize) -> Result<()> {
    if axis >= spec.dim {
        return Err(Error::InvalidArgument(format!("axis {axis} out of range for dim {}", spec.dim)));
    }
    Ok(())
}

fn snap(spec: GridSpec, x: [f64; 2]) -> [f64; 2] {
    let cell = spec.nearest_cell(x);
    let h = spec.spacing();
    [cell[0] as f64 * h, cell[1] as f64 * h]
}

#[inline]
fn phase(xi: [f64; 2], c: [f64; 2]) -> Complex64 {
    Complex64::from_polar(1.0, -(xi[0] * c[0] + xi[1] * c[1]))
}

fn spectral_synth(
    spec: GridSpec,
    coeff: impl Fn([f64; 2], [i64; 2]) -> Complex64,
) -> Result<Field> {
    let mut sf = SpectralField::zeros(spec);
    for i in 0..spec.len() {
        sf.coeffs[i] = coeff(spec.xi_of_flat(i), spec.freq_of_flat(i));
    }
    inverse(&sf)
}

/// Boundary window used by [`SynthKind::RadialQuarterPower`]: 1 on the
/// central half of the box, 0 near the boundary.
pub fn boundary_window(spec: GridSpec, x: [f64; 2]) -> f64 {
    let c = spec.center();
    let l = spec.box_length;
    let d = spec.periodic_delta(c, x);
    let mut w = 1.0;
    for da in d.iter().take(spec.dim) {
        w *= smooth::plateau(da.abs(), 0.25 * l, 0.48 * l);
    }
    w
}
