use besovwf::fit::*;
use besovwf::grid::*;
use besovwf::localmeans::*;
use besovwf::wavefront::*;
use num_complex::Complex64;

fn half_octave(spec: &GridSpec, kmin: f64, kmax: f64) -> LambdaLadder {
    let mut v = vec![];
    let mut k = kmin;
    while k <= kmax + 1e-9 { v.push(2f64.powf(-k)); k += 0.5; }
    LambdaLadder::new(v, spec).unwrap()
}

fn main() {
    let spec = GridSpec::square(1, 512).unwrap();
    let lad = half_octave(&spec, 1.0, 5.0);
    let ug = synthesize(&SynthKind::Gaussian { center: spec.center(), width: TAU/16.0 }, spec).unwrap().field;
    let cone = ConeSpec::new([1.0,0.0], 0.3).unwrap();
    for s in [3i32] {
      let k = make_kernel(s, spec).unwrap();
      for (pt, r, pn, p) in [
          ([400usize,0usize], 16.0, "bump", WindowProfile::Bump),
          ([400,0], 32.0, "g5", WindowProfile::TruncatedGaussian{sigma_ratio:5.0}),
          ([100,0], 32.0, "g5", WindowProfile::TruncatedGaussian{sigma_ratio:5.0}),
      ] {
        let w = Window::at_cell(&spec, pt, r, p).unwrap();
        let v = ug.windowed(|x| w.eval(&spec, x));
        let vh = transform(&v).unwrap();
        let supp: Vec<usize> = (0..spec.len()).filter(|&i| w.eval(&spec, spec.point_of_flat(i)) > 0.0).collect();
        let wsup = supp.iter().map(|&i| ug.samples[i].norm()).fold(0.0, f64::max);
        print!("pt={pt:?} r={r} {pn} wsup={wsup:.2e}: ");
        for &l in lad.values() {
            let mut coeffs = vec![Complex64::ZERO; spec.len()];
            for i in 0..spec.len() {
                let xi = spec.xi_of_flat(i);
                if cone.contains(xi) {
                    coeffs[i] = vh.coeffs[i] * k.spectral(l * xi[0].abs());
                }
            }
            let f = inverse(&SpectralField { spec, coeffs }).unwrap();
            let s = supp.iter().map(|&i| f.samples[i].norm()).fold(0.0, f64::max);
            print!("{:.1e} ", s);
        }
        println!();
      }
    }
}
