//! Multi-center bubble families v(x) = Σᵢ φ_{ε,bᵢ}(d(x, xᵢ)) with bᵢ = (1/n) log νᵢ.

use serde::{Deserialize, Serialize};

use super::profile::BubbleProfile;
use crate::design::MomentDesign;
use crate::error::{domain, Error, Result};
use crate::quadrature::radial_rule;
use crate::special::sphere_area_unchecked;
use crate::sphere::{geodesic_distance, geodesic_distance_raw, SpherePoint};

/// Gauss–Legendre order per radial panel.
pub const RADIAL_ORDER: usize = 20;

/// Weights at or below this are treated as absent when a design seeds a family.
pub const WEIGHT_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct BubbleFamily {
    n: usize,
    centers: Vec<SpherePoint>,
    nu: Vec<f64>,
    delta: f64,
    eps: f64,
    profiles: Vec<BubbleProfile>,
}

/// JSON form of a family; `m` is the moment order the correction should use.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilySpec {
    pub n: usize,
    pub centers: Vec<Vec<f64>>,
    pub nu: Vec<f64>,
    pub delta: f64,
    pub eps: f64,
    #[serde(default)]
    pub m: u32,
}

impl BubbleFamily {
    pub fn new(n: usize, centers: Vec<SpherePoint>, nu: Vec<f64>, delta: f64, eps: f64) -> Result<Self> {
        if centers.is_empty() {
            return Err(domain("a bubble family needs at least one center"));
        }
        if centers.len() != nu.len() {
            return Err(Error::DimensionMismatch { expected: centers.len(), got: nu.len() });
        }
        if let Some(c) = centers.iter().find(|c| c.dim() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: c.dim() });
        }
        if let Some(w) = nu.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(domain(format!("bubble weights must be positive, got {w}")));
        }
        let total: f64 = nu.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(domain(format!("bubble weights must sum to 1, got {total}")));
        }
        let nu: Vec<f64> = nu.iter().map(|w| w / total).collect();
        for i in 0..centers.len() {
            for j in i + 1..centers.len() {
                let d = geodesic_distance(&centers[i], &centers[j]);
                if d <= 4.0 * delta {
                    return Err(Error::Invariant(format!(
                        "centers {i} and {j} are {d:.6} apart; supports of radius 2δ overlap unless the distance exceeds 4δ = {:.6}",
                        4.0 * delta
                    )));
                }
            }
        }
        let profiles = nu
            .iter()
            .map(|w| BubbleProfile::new(n, eps, delta, w.ln() / n as f64))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n, centers, nu, delta, eps, profiles })
    }

    pub fn single(center: SpherePoint, delta: f64, eps: f64) -> Result<Self> {
        Self::new(center.dim(), vec![center], vec![1.0], delta, eps)
    }

    /// Bubbles at the points of a design with ν equal to its weights; points
    /// with weight ≤ [`WEIGHT_FLOOR`] are dropped and the rest renormalized.
    pub fn from_design(design: &MomentDesign, delta: f64, eps: f64) -> Result<Self> {
        let (centers, nu): (Vec<SpherePoint>, Vec<f64>) = design
            .points()
            .iter()
            .zip(design.weights())
            .filter(|(_, w)| **w > WEIGHT_FLOOR)
            .map(|(p, w)| (p.clone(), *w))
            .unzip();
        let total: f64 = nu.iter().sum();
        Self::new(design.n(), centers, nu.iter().map(|w| w / total).collect(), delta, eps)
    }

    pub fn from_spec(spec: &FamilySpec) -> Result<Self> {
        let centers = spec.centers.iter().cloned().map(SpherePoint::new).collect::<Result<Vec<_>>>()?;
        Self::new(spec.n, centers, spec.nu.clone(), spec.delta, spec.eps)
    }

    pub fn to_spec(&self, m: u32) -> FamilySpec {
        FamilySpec {
            n: self.n,
            centers: self.centers.iter().map(|c| c.coords().to_vec()).collect(),
            nu: self.nu.clone(),
            delta: self.delta,
            eps: self.eps,
            m,
        }
    }

    /// Same centers and weights at a different ε.
    pub fn with_eps(&self, eps: f64) -> Result<Self> {
        Self::new(self.n, self.centers.clone(), self.nu.clone(), self.delta, eps)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn centers(&self) -> &[SpherePoint] {
        &self.centers
    }

    pub fn nu(&self) -> &[f64] {
        &self.nu
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn profiles(&self) -> &[BubbleProfile] {
        &self.profiles
    }

    /// bᵢ = (1/n) log νᵢ.
    pub fn offsets(&self) -> Vec<f64> {
        self.profiles.iter().map(BubbleProfile::b).collect()
    }

    /// log(1/ε).
    pub fn log_inv_eps(&self) -> f64 {
        -self.eps.ln()
    }

    /// Smallest pairwise center distance (∞ for one center).
    pub fn min_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.centers.len() {
            for j in i + 1..self.centers.len() {
                best = best.min(geodesic_distance(&self.centers[i], &self.centers[j]));
            }
        }
        best
    }

    /// Index of the nearest center and the distance to it.
    pub(crate) fn nearest(&self, x: &[f64]) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for (i, c) in self.centers.iter().enumerate() {
            let d = geodesic_distance_raw(x, c.coords());
            if d < best.1 {
                best = (i, d);
            }
        }
        best
    }

    pub fn eval_v(&self, x: &SpherePoint) -> Result<f64> {
        if x.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: x.dim() });
        }
        let mut total = 0.0;
        let mut active = 0;
        for (c, p) in self.centers.iter().zip(&self.profiles) {
            let d = geodesic_distance(x, c);
            if d < p.support() {
                active += 1;
                total += p.phi(d);
            }
        }
        if active > 1 {
            return Err(Error::Invariant(format!("{active} bubble supports overlap at the evaluation point")));
        }
        Ok(total)
    }
}

pub fn eval_v(family: &BubbleFamily, x: &SpherePoint) -> Result<f64> {
    family.eval_v(x)
}

/// ∫ f(t) over the geodesic ball of radius `hi`, panels broken at the profile kinks.
fn radial_integral<F: Fn(f64) -> f64>(profile: &BubbleProfile, hi: f64, order: usize, f: F) -> Result<f64> {
    let (ts, ws) = radial_rule(profile.n(), 0.0, hi, order, &profile.breakpoints());
    let mut acc = 0.0;
    for (t, w) in ts.into_iter().zip(ws) {
        let v = f(t);
        if !v.is_finite() {
            return Err(Error::NonFinite { value: v, location: format!("radial node t = {t:e}") });
        }
        acc += w * v;
    }
    Ok(acc)
}

/// ∫ e^{nv} dμ: the exact area |Sⁿ| plus, per center, ∫ (e^{nφ} − 1) over its support.
pub fn bubble_integral(family: &BubbleFamily) -> Result<f64> {
    bubble_integral_with_order(family, RADIAL_ORDER)
}

pub fn bubble_integral_with_order(family: &BubbleFamily, order: usize) -> Result<f64> {
    let n = family.n as f64;
    let mut total = sphere_area_unchecked(family.n);
    for p in &family.profiles {
        total += radial_integral(p, p.support(), order, |t| (n * p.phi(t)).exp_m1())?;
    }
    Ok(total)
}

/// ∫ |∇v|ⁿ dμ by radial quadrature of |φ'|ⁿ.
pub fn bubble_energy(family: &BubbleFamily) -> Result<f64> {
    bubble_energy_with_order(family, RADIAL_ORDER)
}

pub fn bubble_energy_with_order(family: &BubbleFamily, order: usize) -> Result<f64> {
    let n = family.n as i32;
    let mut total = 0.0;
    for p in &family.profiles {
        total += radial_integral(p, p.support(), order, |t| p.dphi(t).abs().powi(n))?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn north(n: usize) -> SpherePoint {
        SpherePoint::basis(n, n)
    }

    #[test]
    fn v_at_center_and_far_away() {
        let f = BubbleFamily::single(north(2), 0.5, 1e-3).unwrap();
        let at = f.eval_v(&north(2)).unwrap();
        assert!((at - 2.0 * 500f64.ln()).abs() < 1e-12);
        assert_eq!(f.eval_v(&north(2).neg()).unwrap(), 0.0);
    }

    #[test]
    fn two_bubble_offset() {
        let c = north(2);
        let f = BubbleFamily::new(2, vec![c.clone(), c.neg()], vec![0.5, 0.5], 0.3, 1e-3).unwrap();
        let expect = 2.0 * (0.3f64 / 1e-3).ln() + 0.5 * 0.5f64.ln();
        assert!((f.eval_v(&c).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn overlapping_supports_rejected() {
        let a = SpherePoint::new(vec![1.0, 0.0, 0.0]).unwrap();
        let b = SpherePoint::new(vec![1.0, 0.5, 0.0]).unwrap();
        assert!(matches!(
            BubbleFamily::new(2, vec![a, b], vec![0.5, 0.5], 0.3, 1e-3),
            Err(Error::Invariant(_))
        ));
    }

    #[test]
    fn integral_leading_term() {
        let f = BubbleFamily::single(north(2), 0.5, 1e-3).unwrap();
        let i = bubble_integral(&f).unwrap();
        let lead = 2.0 * PI * 0.5f64.powi(4) / 1e-6;
        assert!((i / lead - 1.0).abs() < 0.05, "{i} vs {lead}");
    }

    #[test]
    fn energy_leading_term_and_zero_offset_annulus() {
        let f = BubbleFamily::single(north(2), 0.5, 1e-3).unwrap();
        let e = bubble_energy(&f).unwrap();
        let lead = 8.0 * PI * 500f64.ln();
        assert!((e / lead - 1.0).abs() < 0.05, "{e} vs {lead}");
        // with b = 0 only (ε, δ) contributes: 2π·4·∫ sin t / t² dt
        let p = f.profiles()[0];
        let inner = radial_integral(&p, p.delta(), 40, |t| p.dphi(t).powi(2)).unwrap();
        assert!((e - inner).abs() < 1e-10 * e);
    }

    #[test]
    fn integral_is_converged() {
        let f = BubbleFamily::single(north(3), 0.4, 1e-4).unwrap();
        let a = bubble_integral(&f).unwrap();
        let b = bubble_integral_with_order(&f, 10 * RADIAL_ORDER).unwrap();
        assert!((a / b - 1.0).abs() < 1e-8);
    }

    #[test]
    fn spec_round_trip() {
        let c = north(2);
        let f = BubbleFamily::new(2, vec![c.clone(), c.neg()], vec![0.75, 0.25], 0.3, 1e-3).unwrap();
        let json = serde_json::to_string(&f.to_spec(1)).unwrap();
        let back: FamilySpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back.m, 1);
        assert_eq!(BubbleFamily::from_spec(&back).unwrap(), f);
    }
}
