//! On-disk formats: little-endian binary fields, CSV dumps and P5 PGM
//! heatmaps.
//!
//! Field binary layout: magic `BWF1`, `dim` as u8, `n_per_axis` as u32 LE,
//! `box_length` as f64 LE, then interleaved re/im f64 LE samples in
//! row-major order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fit::ScalingFit;
use crate::grid::{Field, GridSpec};
use crate::lp::LPPartition;
use crate::wavefront::WFScanResult;

const MAGIC: &[u8; 4] = b"BWF1";

pub fn write_field_binary(path: &Path, field: &Field) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&[field.spec.dim as u8])?;
    w.write_all(&(field.spec.n_per_axis as u32).to_le_bytes())?;
    w.write_all(&field.spec.box_length.to_le_bytes())?;
    for z in &field.samples {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_field_binary(path: &Path) -> Result<Field> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::InvalidArgument("bad field file magic".into()));
    }
    let mut b1 = [0u8; 1];
    r.read_exact(&mut b1)?;
    let mut b4 = [0u8; 4];
    r.read_exact(&mut b4)?;
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b8)?;
    let spec = GridSpec::new(b1[0] as usize, u32::from_le_bytes(b4) as usize, f64::from_le_bytes(b8))?;
    let mut samples = Vec::with_capacity(spec.len());
    for _ in 0..spec.len() {
        let mut re = [0u8; 8];
        let mut im = [0u8; 8];
        r.read_exact(&mut re)?;
        r.read_exact(&mut im)?;
        samples.push(Complex64::new(f64::from_le_bytes(re), f64::from_le_bytes(im)));
    }
    Ok(Field { spec, samples })
}

/// CSV with index columns and re/im parts.
pub fn write_field_csv(path: &Path, field: &Field) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let n = field.spec.n_per_axis;
    if field.spec.dim == 1 {
        writeln!(w, "i,re,im")?;
        for (i, z) in field.samples.iter().enumerate() {
            writeln!(w, "{i},{},{}", z.re, z.im)?;
        }
    } else {
        writeln!(w, "i,j,re,im")?;
        for (idx, z) in field.samples.iter().enumerate() {
            writeln!(w, "{},{},{},{}", idx / n, idx % n, z.re, z.im)?;
        }
    }
    Ok(())
}

/// Partition dump: one row per (level, lattice frequency radius) pair.
pub fn write_partition_csv(path: &Path, part: &LPPartition) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "j,xi_abs,psi")?;
    for (j, psi) in part.multipliers.iter().enumerate() {
        for (flat, v) in psi.iter().enumerate() {
            if *v > 0.0 {
                let xi = part.spec.xi_of_flat(flat);
                let r = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
                writeln!(w, "{j},{r},{v}")?;
            }
        }
    }
    Ok(())
}

/// Ladder fit dump: `(lambda, sup, log-log residual)` rows.
pub fn write_fit_csv(path: &Path, samples: &[(f64, f64)], fit: &ScalingFit) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "lambda,sup,residual")?;
    for &(l, s) in samples {
        let residual = if s > 0.0 && !fit.capped {
            s.ln() - (fit.slope * l.ln() + fit.intercept)
        } else {
            f64::NAN
        };
        writeln!(w, "{l},{s},{residual}")?;
    }
    Ok(())
}

/// Scan dump: one row per (entry, queried exponent).
pub fn write_scan_csv(path: &Path, scan: &WFScanResult) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "px,py,dir_angle,slope,r2,capped,zero_order_bounded,alpha,classification")?;
    for (e, entry) in scan.entries.iter().enumerate() {
        for (a, alpha) in scan.alphas.iter().enumerate() {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{:?}",
                entry.point[0],
                entry.point[1],
                entry.cone.angle(),
                entry.fit.slope,
                entry.fit.r_squared,
                entry.fit.capped,
                entry.zero_order_bounded,
                alpha,
                scan.classification(e, a)
            )?;
        }
        if scan.alphas.is_empty() {
            writeln!(
                w,
                "{},{},{},{},{},{},{},,",
                entry.point[0],
                entry.point[1],
                entry.cone.angle(),
                entry.fit.slope,
                entry.fit.r_squared,
                entry.fit.capped,
                entry.zero_order_bounded,
            )?;
        }
    }
    Ok(())
}

/// 8-bit binary PGM (P5).
pub fn write_pgm(path: &Path, width: usize, height: usize, pixels: &[u8]) -> Result<()> {
    if pixels.len() != width * height {
        return Err(Error::InvalidArgument("pixel buffer size mismatch".into()));
    }
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "P5\n{width} {height}\n255\n")?;
    w.write_all(pixels)?;
    Ok(())
}

/// Grayscale rendering of per-point values (min over directions of the
/// fitted slope, typically): low values map to dark pixels.
pub fn slopes_to_pixels(values: &[f64]) -> Vec<u8> {
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    if finite.is_empty() {
        return vec![0; values.len()];
    }
    let lo = finite.iter().copied().fold(f64::MAX, f64::min);
    let hi = finite.iter().copied().fold(f64::MIN, f64::max);
    let span = (hi - lo).max(1e-12);
    values
        .iter()
        .map(|v| {
            if v.is_finite() {
                (255.0 * (v - lo) / span).round().clamp(0.0, 255.0) as u8
            } else {
                255
            }
        })
        .collect()
}
