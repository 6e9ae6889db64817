//! Geodesic polar patches around bubble centers.
//!
//! Integrals of functions that are smooth away from the centers but sharply
//! peaked near them are split as ∫f = ∫g + Σᵢ ∫_{B_R(xᵢ)} (f − g), where g is
//! a smooth global function equal to f outside the caps. ∫g is exact or
//! comes from the tensor grid; each cap integral uses graded radial panels
//! times an angular rule on the unit tangent sphere.

use std::f64::consts::PI;

use super::family::BubbleFamily;
use crate::error::{domain, Result};
use crate::grid::build_grid;
use crate::quadrature::radial_rule;

/// One quadrature node inside a cap.
#[derive(Debug, Clone)]
pub(crate) struct CapNode {
    /// Point on Sⁿ.
    pub x: Vec<f64>,
    /// Geodesic distance to the cap center.
    pub t: f64,
    /// Unit gradient of the distance function at x.
    pub grad_t: Vec<f64>,
    pub w: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct Cap {
    pub center: usize,
    pub nodes: Vec<CapNode>,
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Total of per-cap partial sums, independent of the order of the caps.
pub(crate) fn sum_parts(mut parts: Vec<f64>) -> f64 {
    parts.sort_by(f64::total_cmp);
    let mut acc = CompensatedSum::default();
    parts.into_iter().for_each(|p| acc.add(p));
    acc.value()
}

/// Σ over caps of Σ over nodes of f, compensated within each cap and
/// combined in an order that does not depend on how the centers are listed.
pub(crate) fn cap_sum<F: FnMut(&Cap, &CapNode) -> f64>(caps: &[Cap], mut f: F) -> f64 {
    sum_parts(
        caps.iter()
            .map(|cap| {
                let mut acc = CompensatedSum::default();
                cap.nodes.iter().for_each(|q| acc.add(f(cap, q)));
                acc.value()
            })
            .collect(),
    )
}

/// Unit directions in ℝⁿ (tangent sphere Sⁿ⁻¹) with weights summing to 1.
fn angular_rule(n: usize) -> Result<Vec<(Vec<f64>, f64)>> {
    match n {
        2 => {
            let k = 96;
            Ok((0..k)
                .map(|j| {
                    let a = 2.0 * PI * j as f64 / k as f64;
                    (vec![a.cos(), a.sin()], 1.0 / k as f64)
                })
                .collect())
        }
        3 | 4 => {
            let g = build_grid(n - 1, if n == 3 { 16 } else { 10 })?;
            let total: f64 = g.weights().iter().sum();
            Ok(g.nodes().iter().zip(g.weights()).map(|(p, w)| (p.coords().to_vec(), w / total)).collect())
        }
        _ => Err(crate::error::Error::UnsupportedDimension(n)),
    }
}

/// Caps of radius `radius` around every center, with radial panels broken at
/// the profile kinks and at `extra_breaks`.
pub(crate) fn build_caps(family: &BubbleFamily, radius: f64, extra_breaks: &[f64]) -> Result<Vec<Cap>> {
    if 2.0 * radius >= family.min_separation() {
        return Err(domain(format!(
            "caps of radius {radius:.6} around the centers overlap (closest pair {:.6} apart)",
            family.min_separation()
        )));
    }
    if radius >= PI {
        return Err(domain(format!("cap radius {radius} must be below pi")));
    }
    let n = family.n();
    let dirs = angular_rule(n)?;
    let mut breaks: Vec<f64> = family.profiles()[0].breakpoints().to_vec();
    breaks.extend_from_slice(extra_breaks);
    let (ts, ws) = radial_rule(n, 0.0, radius, super::family::RADIAL_ORDER, &breaks);
    let mut caps = Vec::with_capacity(family.len());
    for (ci, c) in family.centers().iter().enumerate() {
        let frame = c.tangent_basis();
        let c = c.coords();
        let mut nodes = Vec::with_capacity(ts.len() * dirs.len());
        for (d, wd) in &dirs {
            let omega: Vec<f64> = (0..=n)
                .map(|k| frame.iter().zip(d).map(|(e, dk)| e[k] * dk).sum())
                .collect();
            for (&t, &wt) in ts.iter().zip(&ws) {
                let (s, co) = t.sin_cos();
                let x = c.iter().zip(&omega).map(|(ck, ok)| co * ck + s * ok).collect();
                let grad_t = c.iter().zip(&omega).map(|(ck, ok)| co * ok - s * ck).collect();
                nodes.push(CapNode { x, t, grad_t, w: wt * wd });
            }
        }
        caps.push(Cap { center: ci, nodes });
    }
    Ok(caps)
}
