//! Gamma function at half-integer arguments and sphere areas.
//!
//! Every Gamma value this crate needs has the form Γ(k/2) for a positive
//! integer k, so the recurrence Γ(x + 1) = xΓ(x) from Γ(1) = 1 and
//! Γ(1/2) = √π gives them to a few ulps without a general-purpose
//! approximation.

use std::f64::consts::PI;

use crate::error::{domain, Result};

/// Largest k for which Γ(k/2) is evaluated directly (beyond it the value overflows).
const DIRECT_LIMIT: u32 = 300;

/// Γ(k/2) for k ≥ 1.
pub fn gamma_half(k: u32) -> f64 {
    assert!(k >= 1, "gamma_half requires k >= 1");
    if k > DIRECT_LIMIT {
        return ln_gamma_half(k).exp();
    }
    let (mut acc, mut x) = if k % 2 == 0 { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    let target = f64::from(k) / 2.0;
    while x < target {
        acc *= x;
        x += 1.0;
    }
    acc
}

/// ln Γ(k/2) for k ≥ 1.
pub fn ln_gamma_half(k: u32) -> f64 {
    assert!(k >= 1, "ln_gamma_half requires k >= 1");
    let (mut acc, mut x) = if k % 2 == 0 { (0.0, 1.0) } else { (0.5 * PI.ln(), 0.5) };
    let target = f64::from(k) / 2.0;
    while x < target {
        acc += x.ln();
        x += 1.0;
    }
    acc
}

/// Surface measure |Sⁿ| = 2π^{(n+1)/2} / Γ((n+1)/2) of the unit n-sphere in ℝⁿ⁺¹.
pub fn sphere_area(n: usize) -> Result<f64> {
    if n < 1 {
        return Err(domain(format!("sphere_area requires n >= 1, got {n}")));
    }
    Ok(sphere_area_unchecked(n))
}

/// Same as [`sphere_area`] but also accepts n = 0 (|S⁰| = 2, two points).
pub(crate) fn sphere_area_unchecked(n: usize) -> f64 {
    let k = n as u32 + 1;
    if k <= DIRECT_LIMIT {
        2.0 * PI.powf(f64::from(k) / 2.0) / gamma_half(k)
    } else {
        (2f64.ln() + 0.5 * f64::from(k) * PI.ln() - ln_gamma_half(k)).exp()
    }
}
