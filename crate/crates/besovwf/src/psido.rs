//! Order-zero cone localizers and pure Fourier multipliers, with their
//! elliptic/characteristic sets and the microlocal consistency checks they
//! support.
//!
//! The only operators built here are the separable symbols
//! `a(x, y, xi) = phi(x) psi(xi/|xi|) chi(xi) phi(y)` and pure multipliers
//! `a(xi)`; applying them reduces to window-multiply / Fourier-multiply
//! passes, which keeps the quantization exact on band-limited fields.
//! General quantization, parametrices and adjoints are out of scope: set
//! computations happen symbolically on [`ConicRegion`] values.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fit::LambdaLadder;
use crate::grid::{inverse, transform, Field, GridSpec};
use crate::localmeans::{local_means_exponent, moment_order_for};
use crate::smooth;
use crate::wavefront::{
    threshold_estimate, wf_scan, Classification, ConeSpec, ScanConfig, WFScanResult, Window,
};

/// Radial factor of a symbol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case")]
pub enum MultiplierProfile {
    One,
    /// Japanese bracket `(1 + |xi|^2)^(order/2)`.
    JapaneseBracket { order: f64 },
    /// Homogeneous power `|xi|^order` (vanishing at the origin).
    AbsPower { order: f64 },
}

impl MultiplierProfile {
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            MultiplierProfile::One => 1.0,
            MultiplierProfile::JapaneseBracket { order } => (1.0 + r * r).powf(order / 2.0),
            MultiplierProfile::AbsPower { order } => {
                if r == 0.0 {
                    0.0
                } else {
                    r.powf(order)
                }
            }
        }
    }

    pub fn order(&self) -> f64 {
        match *self {
            MultiplierProfile::One => 0.0,
            MultiplierProfile::JapaneseBracket { order } => order,
            MultiplierProfile::AbsPower { order } => order,
        }
    }
}

/// Separable symbol `phi(x) psi(xi/|xi|) chi(xi) phi(y) . profile(|xi|)`.
/// With every cutoff absent this is the pure multiplier `profile(|xi|)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparableSymbol {
    /// Spatial cutoff `phi`; `None` means identically one.
    pub x_cutoff: Option<Window>,
    /// Direction cap `psi` supported in this cone; `None` means one.
    pub dir_cutoff: Option<ConeSpec>,
    /// Inner radius `a` of the low-frequency excision `chi` (zero below `a`,
    /// one above `2a`); `None` means no excision.
    pub chi_inner: Option<f64>,
    pub profile: MultiplierProfile,
}

impl SeparableSymbol {
    /// Order-zero cone localizer elliptic at `(window.center, cone.direction)`.
    /// The default excision radius is four lattice frequency units.
    pub fn localizer(spec: &GridSpec, window: Window, cone: ConeSpec) -> Self {
        Self {
            x_cutoff: Some(window),
            dir_cutoff: Some(cone),
            chi_inner: Some(4.0 * spec.freq_unit()),
            profile: MultiplierProfile::One,
        }
    }

    /// Pure Fourier multiplier.
    pub fn multiplier(profile: MultiplierProfile) -> Self {
        Self { x_cutoff: None, dir_cutoff: None, chi_inner: None, profile }
    }

    pub fn order(&self) -> f64 {
        self.profile.order()
    }

    /// Smooth direction cap: one inside half the cone angle, zero outside it.
    fn psi(&self, xi: [f64; 2]) -> f64 {
        match &self.dir_cutoff {
            None => 1.0,
            Some(cone) => {
                let norm = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
                if norm == 0.0 {
                    return 0.0;
                }
                let cosang = ((xi[0] * cone.direction[0] + xi[1] * cone.direction[1]) / norm)
                    .clamp(-1.0, 1.0);
                smooth::plateau(cosang.acos() / cone.half_angle, 0.5, 1.0)
            }
        }
    }

    fn chi(&self, r: f64) -> f64 {
        match self.chi_inner {
            None => 1.0,
            Some(a) => smooth::step((r - a) / a),
        }
    }

    /// Full frequency-side factor `psi(xi/|xi|) chi(|xi|) profile(|xi|)`.
    pub fn frequency_factor(&self, xi: [f64; 2]) -> f64 {
        let r = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
        self.psi(xi) * self.chi(r) * self.profile.eval(r)
    }
}

/// Apply the operator: `phi . F^-1[ psi chi profile . F[phi u] ]`, the
/// `phi` factors dropping out for pure multipliers.
pub fn apply_localizer(sym: &SeparableSymbol, u: &Field) -> Result<Field> {
    let spec = u.spec;
    let pre = match &sym.x_cutoff {
        Some(w) => u.windowed(|x| w.eval(&spec, x)),
        None => u.clone(),
    };
    let filtered = transform(&pre)?.multiply(|xi| sym.frequency_factor(xi));
    let out = inverse(&filtered)?;
    Ok(match &sym.x_cutoff {
        Some(w) => out.windowed(|x| w.eval(&spec, x)),
        None => out,
    })
}

/// Ball in position space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: [f64; 2],
    pub radius: f64,
}

impl Ball {
    pub fn contains(&self, x: [f64; 2], dim: usize) -> bool {
        let mut d2 = 0.0;
        for a in 0..dim.max(1) {
            let t = x[a] - self.center[a];
            d2 += t * t;
        }
        d2.sqrt() < self.radius
    }
}

/// One conjunction cell of a conic set: all listed constraints must hold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ConicCell {
    pub x_inside: Vec<Ball>,
    pub x_outside: Vec<Ball>,
    pub dir_inside: Vec<ConeSpec>,
    pub dir_outside: Vec<ConeSpec>,
}

impl ConicCell {
    pub fn contains(&self, x: [f64; 2], dir: [f64; 2], dim: usize) -> bool {
        self.x_inside.iter().all(|b| b.contains(x, dim))
            && self.x_outside.iter().all(|b| !b.contains(x, dim))
            && self.dir_inside.iter().all(|c| c.contains(dir))
            && self.dir_outside.iter().all(|c| !c.contains(dir))
    }

    fn merge(&self, other: &ConicCell) -> ConicCell {
        ConicCell {
            x_inside: [self.x_inside.clone(), other.x_inside.clone()].concat(),
            x_outside: [self.x_outside.clone(), other.x_outside.clone()].concat(),
            dir_inside: [self.dir_inside.clone(), other.dir_inside.clone()].concat(),
            dir_outside: [self.dir_outside.clone(), other.dir_outside.clone()].concat(),
        }
    }
}

/// Closed conic subset of position x direction space, stored as a union of
/// constraint cells, with explicit tolerance bands from the cutoff
/// transition zones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ConicRegion {
    pub cells: Vec<ConicCell>,
    /// Position slack: boundaries are only sharp to within this distance.
    pub tol_position: f64,
    /// Angular slack at cone boundaries, radians.
    pub tol_angle: f64,
}

impl ConicRegion {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn everything() -> Self {
        Self { cells: vec![ConicCell::default()], ..Self::default() }
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, x: [f64; 2], dir: [f64; 2], dim: usize) -> bool {
        self.cells.iter().any(|c| c.contains(x, dir, dim))
    }

    /// Exact intersection: the pairwise conjunction of cells.
    pub fn intersect(&self, other: &ConicRegion) -> ConicRegion {
        let mut cells = Vec::new();
        for a in &self.cells {
            for b in &other.cells {
                cells.push(a.merge(b));
            }
        }
        ConicRegion {
            cells,
            tol_position: self.tol_position.max(other.tol_position),
            tol_angle: self.tol_angle.max(other.tol_angle),
        }
    }
}

/// Essential support of the symbol: where it is not smoothing.
pub fn ess_supp(sym: &SeparableSymbol) -> ConicRegion {
    let mut cell = ConicCell::default();
    let mut tol_position = 0.0;
    let mut tol_angle = 0.0;
    if let Some(w) = &sym.x_cutoff {
        cell.x_inside.push(Ball { center: w.center, radius: w.radius });
        tol_position = w.radius / 2.0;
    }
    if let Some(c) = &sym.dir_cutoff {
        cell.dir_inside.push(*c);
        tol_angle = c.half_angle / 2.0;
    }
    ConicRegion { cells: vec![cell], tol_position, tol_angle }
}

/// Characteristic set: complement of the elliptic set. For the separable
/// form the symbol is elliptic exactly where `phi(x) != 0` and
/// `psi(xi/|xi|) != 0` (the excision `chi` equals one at large frequencies
/// and never obstructs ellipticity); pure multipliers of the supported
/// profiles are globally elliptic.
pub fn char_set(sym: &SeparableSymbol) -> ConicRegion {
    let mut cells = Vec::new();
    let mut tol_position = 0.0;
    let mut tol_angle = 0.0;
    if let Some(w) = &sym.x_cutoff {
        cells.push(ConicCell {
            x_outside: vec![Ball { center: w.center, radius: w.radius }],
            ..Default::default()
        });
        tol_position = w.radius / 2.0;
    }
    if let Some(c) = &sym.dir_cutoff {
        cells.push(ConicCell { dir_outside: vec![*c], ..Default::default() });
        tol_angle = c.half_angle / 2.0;
    }
    ConicRegion { cells, tol_position, tol_angle }
}

/// Report of a microlocality check: `WF(Au)` inside `ess-supp(A) and WF(u)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MicrolocalityReport {
    pub ok: bool,
    pub in_entries_checked: usize,
    pub violations: Vec<(usize, usize)>,
    pub scan_au: WFScanResult,
    pub scan_u: WFScanResult,
}

/// Scan `Au` at the shifted exponents `alpha - m` and check every `In`
/// entry against the essential support of the symbol and the `In` set of
/// `u` at `alpha`, with one window radius / one fan cell of slack.
pub fn microlocality_check(
    sym: &SeparableSymbol,
    u: &Field,
    points: &[[usize; 2]],
    cfg: &ScanConfig,
) -> Result<MicrolocalityReport> {
    let m = sym.order();
    let au = apply_localizer(sym, u)?;
    let mut cfg_au = cfg.clone();
    cfg_au.alphas = cfg.alphas.iter().map(|a| a - m).collect();
    cfg_au.kernel_order =
        moment_order_for(cfg.alphas.iter().cloned().fold(f64::MIN, f64::max) - m);
    let scan_au = wf_scan(&au, points, &cfg_au)?;
    let scan_u = wf_scan(u, points, cfg)?;

    let supp = ess_supp(sym);
    let spec = u.spec;
    let h = spec.spacing();
    let slack_pos = cfg.window_radius_cells * h + supp.tol_position;
    let slack_ang = crate::grid::TAU / cfg.fan_count as f64 + supp.tol_angle;

    let mut violations = Vec::new();
    let mut checked = 0;
    for (e, entry) in scan_au.entries.iter().enumerate() {
        for a in 0..cfg_au.alphas.len() {
            if scan_au.classification(e, a) != Classification::In {
                continue;
            }
            checked += 1;
            let x = spec.point_of_flat(spec.flat_of_cell(entry.point));
            // Inside the essential support, with each inside constraint
            // grown by the slack.
            let in_supp = supp.cells.iter().any(|cell| {
                cell.x_inside
                    .iter()
                    .all(|b| spec.periodic_distance(x, b.center) < b.radius + slack_pos)
                    && cell
                        .dir_inside
                        .iter()
                        .all(|c| c.axis_separation(&entry.cone) < c.half_angle + slack_ang)
            });
            // Near an In/Undecided entry of u at the unshifted level.
            let near_u = scan_u.entries.iter().enumerate().any(|(e2, f2)| {
                scan_u.classification(e2, a) != Classification::Out
                    && spec
                        .periodic_distance(x, spec.point_of_flat(spec.flat_of_cell(f2.point)))
                        <= slack_pos
                    && f2.cone.axis_separation(&entry.cone) <= slack_ang
            });
            if !in_supp || !near_u {
                violations.push((e, a));
            }
        }
    }
    Ok(MicrolocalityReport {
        ok: violations.is_empty(),
        in_entries_checked: checked,
        violations,
        scan_au,
        scan_u,
    })
}

/// One localizer variant of the crosscheck, with its measured exponent.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LocalizerProbe {
    pub window_factor: f64,
    pub cone_factor: f64,
    pub exponent: f64,
    pub capped: bool,
}

/// Detector verdict against localizer-based verdicts at one
/// `(point, direction, alpha)` triple.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub detector: Classification,
    pub probes: Vec<LocalizerProbe>,
    /// Localizer verdict: `Out` when the best probe certifies regularity
    /// at least `alpha`, `In` when every probe lands below.
    pub localizer: Classification,
    pub agree: bool,
}

/// Compare the cone detector with the operator route at one triple: build
/// localizers elliptic at `(point, direction)` over three window widths and
/// two cone widths, measure the global local-means exponent of each `Au`,
/// and reduce to an In/Out verdict with the scan margin.
pub fn characterization_crosscheck(
    u: &Field,
    point: [usize; 2],
    direction: [f64; 2],
    alpha: f64,
    cfg: &ScanConfig,
) -> Result<CrosscheckReport> {
    let spec = u.spec;
    let half = cfg.resolved_half_angle();
    let cone = ConeSpec::new(direction, half)?;
    let det_fit = threshold_estimate(u, point, &cone, cfg)?;
    let detector = crate::wavefront::DirectionalFit {
        point,
        cone,
        fit: det_fit,
        zero_order_bounded: true,
        saturation: 0.0,
        cone_freq_count: 0,
    }
    .classify(alpha, cfg.margin);

    let ladder = match &cfg.ladder {
        Some(l) => l.clone(),
        None => LambdaLadder::half_octave(&spec)?,
    };
    let kernel_order = moment_order_for(alpha);
    let mut probes = Vec::new();
    for wf in [0.75, 1.0, 1.5] {
        for cf in [1.0, 2.0] {
            let radius = cfg.window_radius_cells * wf;
            let window = Window::at_cell(&spec, point, radius, cfg.window_profile)?;
            let cap = ConeSpec::new(direction, (half * cf).min(1.5))?;
            let sym = SeparableSymbol::localizer(&spec, window, cap);
            let au = apply_localizer(&sym, u)?;
            let fit = local_means_exponent(&au, kernel_order, &ladder)?;
            probes.push(LocalizerProbe {
                window_factor: wf,
                cone_factor: cf,
                exponent: fit.slope,
                capped: fit.capped,
            });
        }
    }
    let best = probes.iter().map(|p| p.exponent).fold(f64::MIN, f64::max);
    let worst = probes.iter().map(|p| p.exponent).fold(f64::MAX, f64::min);
    let localizer = if best >= alpha - cfg.margin {
        Classification::Out
    } else if worst < alpha - cfg.margin {
        Classification::In
    } else {
        Classification::Undecided
    };
    let agree = detector == localizer
        || detector == Classification::Undecided
        || localizer == Classification::Undecided;
    Ok(CrosscheckReport { detector, probes, localizer, agree })
}

/// Shift of the detector threshold under an elliptic multiplier.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EllipticShiftReport {
    pub ok: bool,
    /// `(label, threshold of u, threshold of Au, pass)` per probe.
    pub entries: Vec<(String, f64, f64, bool)>,
}

/// Elliptic regularity: under an elliptic multiplier of order `m` the
/// estimated critical exponent drops by `m` at singular points.
pub fn elliptic_regularity_check(
    profile: MultiplierProfile,
    u: &Field,
    points: &[[usize; 2]],
    directions: &[[f64; 2]],
    cfg_u: &ScanConfig,
    tolerance: f64,
) -> Result<EllipticShiftReport> {
    let m = profile.order();
    let sym = SeparableSymbol::multiplier(profile);
    let au = apply_localizer(&sym, u)?;
    let mut cfg_au = cfg_u.clone();
    cfg_au.kernel_order =
        moment_order_for(cfg_u.alphas.iter().cloned().fold(0.0f64, f64::max).max(0.0) - m);
    let mut entries = Vec::new();
    let mut ok = true;
    for &p in points {
        for &dir in directions {
            let cone = ConeSpec::new(dir, cfg_u.resolved_half_angle())?;
            let t_u = threshold_estimate(u, p, &cone, cfg_u)?;
            let t_au = threshold_estimate(&au, p, &cone, &cfg_au)?;
            let label = format!("p={p:?} dir={dir:?}");
            if t_u.capped && t_au.capped {
                entries.push((label, t_u.slope, t_au.slope, true));
                continue;
            }
            let pass = (t_au.slope - (t_u.slope - m)).abs() <= tolerance;
            ok &= pass;
            entries.push((label, t_u.slope, t_au.slope, pass));
        }
    }
    Ok(EllipticShiftReport { ok, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{synthesize, GridSpec, SynthKind};
    use crate::lp::{self, BesovParams};

    #[test]
    fn full_phase_space_symbol_is_identity() {
        let spec = GridSpec::square(1, 128).unwrap();
        let u = synthesize(&SynthKind::Weierstrass { alpha: 0.5, phase_seed: 1 }, spec)
            .unwrap()
            .field;
        let sym = SeparableSymbol::multiplier(MultiplierProfile::One);
        let au = apply_localizer(&sym, &u).unwrap();
        let err =
            au.samples.iter().zip(&u.samples).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err <= 1e-10 * u.linf());
    }

    #[test]
    fn multiplier_kills_mode_outside_cone() {
        let spec = GridSpec::square(2, 64).unwrap();
        let u = synthesize(&SynthKind::PlaneWave { k: [0, 12] }, spec).unwrap().field;
        let sym = SeparableSymbol {
            x_cutoff: None,
            dir_cutoff: Some(ConeSpec::new([1.0, 0.0], 0.3).unwrap()),
            chi_inner: Some(4.0 * spec.freq_unit()),
            profile: MultiplierProfile::One,
        };
        let au = apply_localizer(&sym, &u).unwrap();
        assert!(au.linf() <= 1e-10);
        // A mode well inside the cone passes untouched.
        let v = synthesize(&SynthKind::PlaneWave { k: [12, 0] }, spec).unwrap().field;
        let av = apply_localizer(&sym, &v).unwrap();
        let err =
            av.samples.iter().zip(&v.samples).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err <= 1e-10);
    }

    #[test]
    fn localizer_suppresses_transverse_sheet() {
        let spec = GridSpec::square(2, 256).unwrap();
        let u = synthesize(&SynthKind::LineDelta { axis: 0 }, spec).unwrap().field;
        let cell = [128usize, 64];
        let window =
            Window::at_cell(&spec, cell, 64.0, crate::wavefront::WindowProfile::Bump).unwrap();
        // Cone around (0,1): disjoint from the sheet's conormal directions.
        // The window slice bleeds into the cone near the excision edge, so
        // push chi out to 8 frequency units for a clean suppression figure.
        let sym = SeparableSymbol {
            chi_inner: Some(8.0 * spec.freq_unit()),
            ..SeparableSymbol::localizer(&spec, window, ConeSpec::new([0.0, 1.0], 0.35).unwrap())
        };
        let au = apply_localizer(&sym, &u).unwrap();
        assert!(au.linf() <= 1e-3 * u.linf(), "leakage {}", au.linf() / u.linf());
        let ladder = LambdaLadder::half_octave(&spec).unwrap();
        let fit = local_means_exponent(&au, -1, &ladder).unwrap();
        assert!(
            fit.capped || fit.slope > -0.5,
            "localized sheet should carry no singularity, got slope {}",
            fit.slope
        );
    }

    #[test]
    fn char_set_shapes() {
        let spec = GridSpec::square(2, 64).unwrap();
        // Globally elliptic multiplier: empty characteristic set.
        let full = SeparableSymbol::multiplier(MultiplierProfile::AbsPower { order: 1.0 });
        assert!(char_set(&full).is_empty());
        assert!(ess_supp(&full).contains([1.0, 2.0], [0.0, 1.0], 2));

        let window = Window::at_cell(&spec, [8, 8], 6.0, Default::default()).unwrap();
        let cone = ConeSpec::new([1.0, 0.0], 20f64.to_radians()).unwrap();
        let sym = SeparableSymbol::localizer(&spec, window, cone);
        let ch = char_set(&sym);
        // Any x outside supp(phi) is characteristic in every direction.
        assert!(ch.contains([4.0, 4.0], [1.0, 0.0], 2));
        // At the window center, the cap direction is elliptic but the
        // opposite direction is characteristic.
        let c = window.center;
        assert!(!ch.contains(c, [1.0, 0.0], 2));
        assert!(ch.contains(c, [-1.0, 0.0], 2));
    }

    #[test]
    fn operator_wavefront_of_product_contracts() {
        let spec = GridSpec::square(2, 64).unwrap();
        let w1 = Window::at_cell(&spec, [16, 16], 8.0, Default::default()).unwrap();
        let w2 = Window::at_cell(&spec, [20, 16], 8.0, Default::default()).unwrap();
        let c1 = ConeSpec::new([1.0, 0.0], 0.5).unwrap();
        let c2 = ConeSpec::new([1.0, 0.3], 0.5).unwrap();
        let a = ess_supp(&SeparableSymbol::localizer(&spec, w1, c1));
        let b = ess_supp(&SeparableSymbol::localizer(&spec, w2, c2));
        let ab = a.intersect(&b);
        // Sampled containment: membership in the product region implies
        // membership in both factors.
        let h = spec.spacing();
        for i in 0..24 {
            for j in 0..24 {
                let x = [i as f64 * 2.0 * h, j as f64 * 2.0 * h];
                for k in 0..12 {
                    let ang = crate::grid::TAU * k as f64 / 12.0;
                    let dir = [ang.cos(), ang.sin()];
                    if ab.contains(x, dir, 2) {
                        assert!(a.contains(x, dir, 2) && b.contains(x, dir, 2));
                    }
                }
            }
        }
    }

    #[test]
    fn symbol_finite_differences_respect_order_envelope() {
        let spec = GridSpec::square(2, 128).unwrap();
        let window = Window::at_cell(&spec, [64, 64], 10.0, Default::default()).unwrap();
        let cone = ConeSpec::new([1.0, 0.0], 0.5).unwrap();
        let sym = SeparableSymbol::localizer(&spec, window, cone);
        let fu = spec.freq_unit();
        let b = |k0: i64, k1: i64| sym.frequency_factor([k0 as f64 * fu, k1 as f64 * fu]);
        // Envelope constants from the shells near the excision.
        let mut c1 = 0.0f64;
        let mut c2 = 0.0f64;
        let mut e1 = 0.0f64;
        let mut e2 = 0.0f64;
        let half = spec.n_per_axis as i64 / 2;
        for k0 in -half + 2..half - 2 {
            for k1 in -half + 2..half - 2 {
                let r2 = (k0 * k0 + k1 * k1) as f64;
                let bracket = (1.0 + r2 * fu * fu).sqrt();
                let d1 = (b(k0 + 1, k1) - b(k0, k1)).abs() / fu;
                let d2 = (b(k0 + 1, k1) - 2.0 * b(k0, k1) + b(k0 - 1, k1)).abs() / (fu * fu);
                if r2 <= 64.0 {
                    c1 = c1.max(d1 * bracket);
                    c2 = c2.max(d2 * bracket * bracket);
                } else {
                    e1 = e1.max(d1 * bracket);
                    e2 = e2.max(d2 * bracket * bracket);
                }
            }
        }
        assert!(e1 <= 10.0 * c1, "first differences: far {e1} vs near {c1}");
        assert!(e2 <= 10.0 * c2, "second differences: far {e2} vs near {c2}");
    }

    #[test]
    fn multiplier_boundedness_between_besov_norms() {
        // Order-m multipliers map each Besov space into the m-shifted one
        // with one constant across a corpus of prescribed-decay fields.
        let spec = GridSpec::square(1, 256).unwrap();
        let part = lp::build_partition(spec).unwrap();
        let corpus = crate::corpus::random_band_fields(spec, 10, 99);
        let sym = SeparableSymbol::multiplier(MultiplierProfile::JapaneseBracket { order: 1.0 });
        let mut worst = 0.0f64;
        for (u, alpha) in &corpus {
            let au = apply_localizer(&sym, u).unwrap();
            let nu = lp::besov_norm(u, &part, &BesovParams::holder(*alpha)).unwrap();
            let nau = lp::besov_norm(&au, &part, &BesovParams::holder(alpha - 1.0)).unwrap();
            worst = worst.max(nau / nu);
        }
        assert!(worst <= 8.0, "boundedness constant {worst}");
    }

    #[test]
    fn gaussian_stays_smooth_under_localizer() {
        let spec = GridSpec::square(1, 512).unwrap();
        let u = synthesize(
            &SynthKind::Gaussian { center: spec.center(), width: crate::grid::TAU / 32.0 },
            spec,
        )
        .unwrap()
        .field;
        let c = spec.nearest_cell(spec.center());
        let window = Window::at_cell(&spec, c, 64.0, Default::default()).unwrap();
        let sym =
            SeparableSymbol::localizer(&spec, window, ConeSpec::new([1.0, 0.0], 0.4).unwrap());
        let au = apply_localizer(&sym, &u).unwrap();
        let ladder = LambdaLadder::half_octave(&spec).unwrap();
        let fit = local_means_exponent(&au, -1, &ladder).unwrap();
        // Smooth in, smooth out: whatever residue the localizer leaves
        // classifies Out at every negative exponent.
        assert!(
            fit.capped || fit.slope > -0.5,
            "localized Gaussian should stay regular, got slope {}",
            fit.slope
        );
    }
}
