use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::poly::Polynomial;
use crate::sphere::SpherePoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    /// p(x) = (ξ·x)² with ξ ⊥ span(points): zero at every point, positive mean.
    Quadratic,
    /// p(x) = ξ·x with ξ·xᵢ = c > 0 at every point: no nonnegative weights
    /// summing to 1 can reproduce its zero mean.
    Linear,
}

/// Proof that no nonnegative weights on the given points reproduce the sphere
/// averages of all polynomials of degree ≤ 2. The witness polynomial takes
/// values at the points that all lie strictly on one side of its sphere mean.
#[derive(Debug, Clone, Serialize)]
pub struct InfeasibilityCertificate {
    pub n: usize,
    pub m: u32,
    pub kind: WitnessKind,
    pub points: Vec<Vec<f64>>,
    /// Unit vector defining the witness.
    pub xi: Vec<f64>,
    /// Sphere average of the witness, from exact moments.
    pub witness_value: f64,
    /// Witness evaluated at each point.
    pub at_points: Vec<f64>,
    /// Rank of span(points).
    pub span_rank: usize,
}

impl InfeasibilityCertificate {
    pub fn witness(&self) -> Polynomial {
        let nvars = self.n + 1;
        let linear = (0..nvars).fold(Polynomial::zero(nvars), |acc, k| {
            acc.add(&Polynomial::coordinate(nvars, k).scale(self.xi[k]))
        });
        match self.kind {
            WitnessKind::Linear => linear,
            WitnessKind::Quadratic => linear.mul(&linear),
        }
    }

    /// Distance between the sphere mean and the nearest point value; any
    /// weighted average of the point values misses the mean by at least this.
    pub fn gap(&self) -> f64 {
        let lo = self.at_points.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.at_points.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if hi < self.witness_value {
            self.witness_value - hi
        } else if lo > self.witness_value {
            lo - self.witness_value
        } else {
            0.0
        }
    }
}

/// Certifies that the points cannot support a degree-2 design.
///
/// A design would need Σνᵢxᵢ = 0, which forces the points carrying weight to
/// be linearly dependent. If the points span a proper subspace V, any
/// ξ ∈ V^⊥ gives the quadratic witness; if they are linearly independent the
/// origin is not in their convex hull and the dual vector with ξ·xᵢ = 1
/// separates it. Returns `None` when neither applies (N ≥ n+2 points spanning
/// ℝⁿ⁺¹).
pub fn certify_lower_bound(points: &[SpherePoint]) -> Result<Option<InfeasibilityCertificate>> {
    let first = points.first().ok_or_else(|| domain("certify_lower_bound needs at least one point"))?;
    let n = first.dim();
    let d = n + 1;
    if let Some(p) = points.iter().find(|p| p.dim() != n) {
        return Err(Error::DimensionMismatch { expected: d, got: p.coords().len() });
    }
    // pad with zero rows so the SVD yields a full right-singular basis
    let rows = points.len().max(d);
    let x = DMatrix::from_fn(rows, d, |i, j| if i < points.len() { points[i].coords()[j] } else { 0.0 });
    let svd = x.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let sigma = &svd.singular_values;
    let smax = sigma.max();
    let rank = sigma.iter().filter(|&&s| s > 1e-10 * smax).count();

    let (kind, xi) = if rank < d {
        let imin = sigma.imin();
        (WitnessKind::Quadratic, v_t.row(imin).iter().copied().collect::<Vec<f64>>())
    } else if points.len() == d {
        let ones = DVector::from_element(d, 1.0);
        let Some(sol) = x.lu().solve(&ones) else { return Ok(None) };
        let norm = sol.norm();
        (WitnessKind::Linear, sol.iter().map(|v| v / norm).collect())
    } else {
        return Ok(None);
    };

    let mut cert = InfeasibilityCertificate {
        n,
        m: 2,
        kind,
        points: points.iter().map(|p| p.coords().to_vec()).collect(),
        xi,
        witness_value: 0.0,
        at_points: Vec::new(),
        span_rank: rank,
    };
    let witness = cert.witness();
    cert.witness_value = witness.sphere_mean();
    cert.at_points = points.iter().map(|p| witness.eval_raw(p.coords())).collect();
    Ok(Some(cert))
}
