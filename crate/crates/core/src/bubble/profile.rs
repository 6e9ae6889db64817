//! Radial logarithmic bubble profiles.

use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// φ_{ε,b}(t): a logarithmic spike of height (n/(n−1))·log(δ/ε) + b, capped on
/// [0, ε], decaying like (n/(n−1))·log(δ/t) + b up to δ, then linearly to 0 at 2δ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BubbleProfile {
    n: usize,
    eps: f64,
    delta: f64,
    b: f64,
}

impl BubbleProfile {
    pub fn new(n: usize, eps: f64, delta: f64, b: f64) -> Result<Self> {
        if n < 2 {
            return Err(domain(format!("bubble profiles need n >= 2, got {n}")));
        }
        if !(delta > 0.0 && delta <= FRAC_PI_4) {
            return Err(domain(format!("delta must lie in (0, pi/4], got {delta}")));
        }
        if !(eps > 0.0 && eps < delta) {
            return Err(domain(format!("eps must lie in (0, delta = {delta}), got {eps}")));
        }
        if !b.is_finite() {
            return Err(domain(format!("offset b must be finite, got {b}")));
        }
        Ok(Self { n, eps, delta, b })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// n/(n−1).
    pub fn slope(&self) -> f64 {
        let n = self.n as f64;
        n / (n - 1.0)
    }

    /// Radius of the support, 2δ.
    pub fn support(&self) -> f64 {
        2.0 * self.delta
    }

    /// Value at the center, (n/(n−1))·log(δ/ε) + b.
    pub fn peak(&self) -> f64 {
        self.slope() * (self.delta / self.eps).ln() + self.b
    }

    pub fn phi(&self, t: f64) -> f64 {
        if t <= self.eps {
            self.peak()
        } else if t < self.delta {
            self.slope() * (self.delta / t).ln() + self.b
        } else if t < 2.0 * self.delta {
            self.b * (2.0 - t / self.delta)
        } else {
            0.0
        }
    }

    /// dφ/dt away from the kinks at ε, δ and 2δ.
    pub fn dphi(&self, t: f64) -> f64 {
        if t <= self.eps {
            0.0
        } else if t < self.delta {
            -self.slope() / t
        } else if t < 2.0 * self.delta {
            -self.b / self.delta
        } else {
            0.0
        }
    }

    /// The kinks of φ, where radial panels should break.
    pub fn breakpoints(&self) -> [f64; 3] {
        [self.eps, self.delta, 2.0 * self.delta]
    }
}

pub fn phi(profile: &BubbleProfile, t: f64) -> f64 {
    profile.phi(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cap_value() {
        let p = BubbleProfile::new(2, 1e-3, 0.5, 0.0).unwrap();
        assert!((p.phi(1e-3) - 2.0 * 500f64.ln()).abs() < 1e-12);
        assert!((p.phi(1e-3) - 12.4292).abs() < 1e-4);
        assert_eq!(p.phi(1.0), 0.0);
        assert_eq!(p.phi(3.0), 0.0);
    }

    #[test]
    fn continuity() {
        let p = BubbleProfile::new(3, 0.01, 0.3, -0.4).unwrap();
        for t in p.breakpoints() {
            let h = 1e-14 * t;
            assert!((p.phi(t - h) - p.phi(t + h)).abs() < 1e-11, "jump at {t}");
        }
        assert!((p.phi(0.3) - p.b()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(BubbleProfile::new(2, 0.5, 0.5, 0.0).is_err());
        assert!(BubbleProfile::new(2, 0.1, 1.0, 0.0).is_err());
        assert!(BubbleProfile::new(1, 0.1, 0.5, 0.0).is_err());
        assert!(BubbleProfile::new(2, 0.1, 0.5, f64::NAN).is_err());
    }

    #[test]
    fn derivative_matches_difference() {
        let p = BubbleProfile::new(2, 1e-3, 0.4, -0.7).unwrap();
        for t in [5e-3, 0.1, 0.5, 0.7] {
            let h = 1e-7;
            let fd = (p.phi(t + h) - p.phi(t - h)) / (2.0 * h);
            assert!((fd - p.dphi(t)).abs() < 1e-6 * (1.0 + fd.abs()));
        }
    }
}
