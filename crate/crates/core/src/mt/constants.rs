//! Sharp Moser–Trudinger constants a_{s,n} and the Onofri-type coefficients α_{s,n}.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::special::{gamma_half, sphere_area_unchecked};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MTConstants {
    pub s: u32,
    pub n: u32,
    /// Exponential-class constant a_{s,n}.
    pub a: f64,
    /// Coefficient α_{s,n} of the energy in log ∫ e^{nu} ≤ α‖·‖^{n/s} + c.
    pub alpha: f64,
}

/// aₙ = n |Sⁿ⁻¹|^{1/(n−1)}.
pub fn moser_trudinger_a(n: u32) -> Result<f64> {
    if n < 2 {
        return Err(domain(format!("require n >= 2, got {n}")));
    }
    let area = sphere_area_unchecked(n as usize - 1);
    Ok(f64::from(n) * area.powf(1.0 / f64::from(n - 1)))
}

/// αₙ = ((n−1)/n)^{n−1} / |Sⁿ⁻¹|.
pub fn onofri_alpha(n: u32) -> Result<f64> {
    if n < 2 {
        return Err(domain(format!("require n >= 2, got {n}")));
    }
    let nf = f64::from(n);
    let area = sphere_area_unchecked(n as usize - 1);
    Ok(((nf - 1.0) / nf).powi(n as i32 - 1) / area)
}

pub fn mt_constants(s: u32, n: u32) -> Result<MTConstants> {
    if s < 1 {
        return Err(domain(format!("require s >= 1, got s = {s}")));
    }
    if s >= n {
        return Err(domain(format!("require s < n, got s = {s}, n = {n}")));
    }
    let (sf, nf) = (f64::from(s), f64::from(n));
    let area = sphere_area_unchecked(n as usize - 1);
    // Γ(s/2)/Γ((n−s)/2) for even s, Γ((s+1)/2)/Γ((n−s+1)/2) for odd s
    let (top, bottom) = if s % 2 == 0 { (s, n - s) } else { (s + 1, n - s + 1) };
    let core = std::f64::consts::PI.powf(nf / 2.0) * 2f64.powi(s as i32) * gamma_half(top) / gamma_half(bottom);
    let a = nf / area * core.powf(nf / (nf - sf));
    let alpha = sf * ((nf - sf) / nf * area).powf((nf - sf) / sf) * core.recip().powf(nf / sf);
    Ok(MTConstants { s, n, a, alpha })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    #[test]
    fn paneitz_and_surface_values() {
        let c = mt_constants(2, 4).unwrap();
        assert!((c.a / (32.0 * PI * PI) - 1.0).abs() < 1e-12);
        assert!((c.alpha * 8.0 * PI * PI - 1.0).abs() < 1e-12);
        let c = mt_constants(1, 2).unwrap();
        assert!((c.a / (4.0 * PI) - 1.0).abs() < 1e-12);
        assert!((c.alpha * 4.0 * PI - 1.0).abs() < 1e-12);
    }

    #[test]
    fn first_order_reduces() {
        for n in 2..=6 {
            let c = mt_constants(1, n).unwrap();
            assert!((c.a / moser_trudinger_a(n).unwrap() - 1.0).abs() < 1e-12);
            assert!((c.alpha / onofri_alpha(n).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn order_must_be_below_dimension() {
        let err = mt_constants(3, 2).unwrap_err().to_string();
        assert!(err.contains("require s < n"), "{err}");
        assert!(mt_constants(0, 3).is_err());
    }
}
