//! Smooth cutoff functions built from the standard `exp(-1/t)` glue.
//!
//! Everything here is C-infinity in exact arithmetic: the transition
//! [`step`] and the cutoffs derived from it have one-sided derivatives of
//! every order equal to zero at the junction points.

/// `exp(-1/t)` for `t > 0`, zero otherwise.
pub fn glue(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Smooth monotone step: 0 for `t <= 0`, 1 for `t >= 1`.
pub fn step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = glue(t);
        let b = glue(1.0 - t);
        a / (a + b)
    }
}

/// Radial low-pass cutoff: 1 for `r <= 1`, 0 for `r >= 2`, smooth in between.
pub fn chi(r: f64) -> f64 {
    1.0 - step(r - 1.0)
}

/// Plateau cutoff: 1 for `r <= inner`, 0 for `r >= outer`.
pub fn plateau(r: f64, inner: f64, outer: f64) -> f64 {
    debug_assert!(inner < outer);
    1.0 - step((r - inner) / (outer - inner))
}

/// Normalized mollifier bump `exp(1 - 1/(1 - r^2))` on `|r| < 1`, zero outside.
/// Takes the value 1 at the origin.
pub fn bump(r: f64) -> f64 {
    let r2 = r * r;
    if r2 >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - r2)).exp()
    }
}
