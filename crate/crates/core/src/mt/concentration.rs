//! Where the normalized measure e^{nv} dμ / ∫ e^{nv} dμ puts its mass.
//!
//! With mᵢ = ‖∇v‖ₙ and uᵢ = v/mᵢ the measure e^{n mᵢ uᵢ} is e^{nv}, so the
//! profile only needs v. Each center collects the mass of the geodesic ball
//! of the attribution radius around it; what is left is diffuse.

use serde::{Serialize, Serializer};

use crate::bubble::{bubble_energy, BubbleFamily, RADIAL_ORDER};
use crate::error::{domain, Error, Result};
use crate::quadrature::radial_rule;
use crate::special::sphere_area_unchecked;
use crate::sphere::SpherePoint;

#[derive(Debug, Clone, Serialize)]
pub struct Atom {
    pub point: SpherePoint,
    pub mass: f64,
}

#[derive(Debug, Clone)]
pub struct ConcentrationReport {
    pub eps: f64,
    pub atoms: Vec<Atom>,
    pub diffuse_mass: f64,
    pub radius: f64,
    /// Largest atom mass.
    pub kappa_estimate: f64,
    /// The normalization mᵢ = (∫|∇v|ⁿ)^{1/n}.
    pub gradient_norm: f64,
}

impl ConcentrationReport {
    /// Σ masses + diffuse.
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum::<f64>() + self.diffuse_mass
    }
}

impl Serialize for ConcentrationReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Json<'a> {
            atoms: &'a [Atom],
            diffuse: f64,
            kappa: f64,
        }
        Json { atoms: &self.atoms, diffuse: self.diffuse_mass, kappa: self.kappa_estimate }.serialize(s)
    }
}

/// 3δ, reduced below half the closest center distance when the balls would overlap.
pub fn default_attribution_radius(family: &BubbleFamily) -> f64 {
    (3.0 * family.delta()).min(0.49 * family.min_separation())
}

fn report(family: &BubbleFamily, radius: f64) -> Result<ConcentrationReport> {
    let n = family.n();
    let nf = n as f64;
    // log-sum-exp shift by the largest exponent
    let shift = family.profiles().iter().map(|p| nf * p.peak()).fold(0.0, f64::max);
    let background = (-shift).exp();

    let mut balls = Vec::with_capacity(family.len());
    let mut total = background * sphere_area_unchecked(n);
    let mut covered = 0.0;
    for p in family.profiles() {
        let (ts, ws) = radial_rule(n, 0.0, radius, RADIAL_ORDER, &p.breakpoints());
        let mut ball = 0.0;
        let mut area = 0.0;
        for (t, w) in ts.iter().zip(&ws) {
            ball += w * (nf * p.phi(*t) - shift).exp();
            area += w;
        }
        let (ts, ws) = radial_rule(n, 0.0, p.support(), RADIAL_ORDER, &p.breakpoints());
        let bump: f64 = ts.iter().zip(&ws).map(|(t, w)| w * ((nf * p.phi(*t) - shift).exp() - background)).sum();
        if !(ball.is_finite() && bump.is_finite()) {
            return Err(Error::NonFinite { value: ball + bump, location: format!("ball at eps = {:e}", family.eps()) });
        }
        balls.push(ball);
        covered += area;
        total += bump;
    }
    let diffuse = background * (sphere_area_unchecked(n) - covered);
    let atoms: Vec<Atom> = family
        .centers()
        .iter()
        .zip(&balls)
        .map(|(c, b)| Atom { point: c.clone(), mass: b / total })
        .collect();
    let kappa = atoms.iter().map(|a| a.mass).fold(0.0, f64::max);
    Ok(ConcentrationReport {
        eps: family.eps(),
        atoms,
        diffuse_mass: diffuse / total,
        radius,
        kappa_estimate: kappa,
        gradient_norm: bubble_energy(family)?.powf(1.0 / nf),
    })
}

/// One report per family. All families must share centers, weights and δ.
pub fn concentration_profile(families: &[BubbleFamily], radius: f64) -> Result<Vec<ConcentrationReport>> {
    let Some(first) = families.first() else {
        return Err(domain("no families given"));
    };
    for f in families {
        if f.centers() != first.centers() || f.nu() != first.nu() || f.delta() != first.delta() {
            return Err(domain("families must share centers, weights and delta"));
        }
    }
    if !(radius > 2.0 * first.delta()) {
        return Err(domain(format!(
            "attribution radius {radius} must exceed the support radius 2*delta = {}",
            2.0 * first.delta()
        )));
    }
    if 2.0 * radius >= first.min_separation() || radius >= std::f64::consts::PI {
        return Err(domain(format!(
            "attribution radius {radius} is too large: balls around centers {:.6} apart would overlap",
            first.min_separation()
        )));
    }
    families.iter().map(|f| report(f, radius)).collect()
}
