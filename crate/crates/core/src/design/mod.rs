//! Weighted point configurations on Sⁿ that reproduce sphere averages of
//! every polynomial of degree ≤ m, and the tools to verify, solve for,
//! certify and search for them.
//!
//! A design (xᵢ, νᵢ) with νᵢ ≥ 0, Σνᵢ = 1 is exact for degree m when
//! Σ νᵢ p(xᵢ) = 0 for every p of degree ≤ m with zero sphere mean. The
//! residual reported everywhere here is the largest such defect over the
//! reduced zero-mean basis, each member scaled to unit L²(Sⁿ) norm.

mod certify;
mod nnls;
mod search;
mod simplex;

pub use certify::{certify_lower_bound, InfeasibilityCertificate, WitnessKind};
pub use search::{search_design, SearchOutcome, SearchParams};
pub use simplex::simplex_design;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::poly::{restricted_zero_mean_basis, Polynomial};
use crate::sphere::SpherePoint;

/// Designs at or below this residual are VALID.
pub const VALID_THRESHOLD: f64 = 1e-9;
/// solve_weights reports INFEASIBLE above this residual.
pub const FEASIBLE_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct MomentDesign {
    n: usize,
    m: u32,
    points: Vec<SpherePoint>,
    weights: Vec<f64>,
    residual: f64,
}

/// On-disk layout; field order is part of the format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DesignFile {
    pub n: usize,
    pub m: u32,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub residual: f64,
}

impl MomentDesign {
    /// Validates the weights and computes the residual.
    pub fn new(n: usize, m: u32, points: Vec<SpherePoint>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(domain("a design needs at least one point"));
        }
        if points.len() != weights.len() {
            return Err(Error::DimensionMismatch { expected: points.len(), got: weights.len() });
        }
        if let Some(p) = points.iter().find(|p| p.dim() != n) {
            return Err(Error::DimensionMismatch { expected: n + 1, got: p.coords().len() });
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
            return Err(Error::Invariant(format!("design weights must be finite and >= 0, found {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Invariant(format!("design weights must sum to 1, sum is {total}")));
        }
        let residual = design_residual(n, m, &points, &weights)?;
        Ok(Self { n, m, points, weights, residual })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn points(&self) -> &[SpherePoint] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn is_valid(&self) -> bool {
        self.residual <= VALID_THRESHOLD
    }

    /// Σ νᵢ p(xᵢ).
    pub fn apply(&self, p: &Polynomial) -> f64 {
        self.points.iter().zip(&self.weights).map(|(x, w)| w * p.eval_raw(x.coords())).sum()
    }

    /// Applies a linear map (row-major (n+1)×(n+1)) to every point.
    pub fn transformed(&self, matrix: &[f64]) -> Result<Self> {
        let d = self.n + 1;
        if matrix.len() != d * d {
            return Err(Error::DimensionMismatch { expected: d * d, got: matrix.len() });
        }
        let points = self
            .points
            .iter()
            .map(|p| {
                let x = p.coords();
                SpherePoint::new((0..d).map(|i| (0..d).map(|j| matrix[i * d + j] * x[j]).sum()).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.n, self.m, points, self.weights.clone())
    }

    pub fn to_file(&self) -> DesignFile {
        DesignFile {
            n: self.n,
            m: self.m,
            points: self.points.iter().map(|p| p.coords().to_vec()).collect(),
            weights: self.weights.clone(),
            residual: self.residual,
        }
    }

    /// Rebuilds a design from its file form, recomputing the residual.
    pub fn from_file(file: DesignFile) -> Result<Self> {
        let points = file.points.into_iter().map(SpherePoint::new).collect::<Result<Vec<_>>>()?;
        Self::new(file.n, file.m, points, file.weights)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_file(serde_json::from_str(s)?)
    }
}

/// Unit-L² zero-mean basis of degree ≤ m; empty for m = 0.
pub(crate) fn normalized_basis(n: usize, m: u32) -> Result<Vec<Polynomial>> {
    if m == 0 {
        return Ok(Vec::new());
    }
    Ok(restricted_zero_mean_basis(n, m)?.normalized_members())
}

fn design_residual(n: usize, m: u32, points: &[SpherePoint], weights: &[f64]) -> Result<f64> {
    let basis = normalized_basis(n, m)?;
    let a = evaluation_matrix(&basis, points);
    let r = &a * DVector::from_column_slice(weights);
    Ok(r.amax())
}

/// A[k][i] = p_k(xᵢ).
pub(crate) fn evaluation_matrix(basis: &[Polynomial], points: &[SpherePoint]) -> DMatrix<f64> {
    DMatrix::from_fn(basis.len(), points.len(), |k, i| basis[k].eval_raw(points[i].coords()))
}

/// The maximal moment defect of a design.
pub fn moment_residual(design: &MomentDesign) -> f64 {
    design.residual()
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightFit {
    pub weights: Vec<f64>,
    pub residual: f64,
}

impl WeightFit {
    pub fn is_feasible(&self) -> bool {
        self.residual <= FEASIBLE_THRESHOLD
    }
}

/// Simplex-constrained least squares for the weights of fixed points.
pub fn solve_weights(points: &[SpherePoint], m: u32) -> Result<WeightFit> {
    let first = points.first().ok_or_else(|| domain("solve_weights needs at least one point"))?;
    let n = first.dim();
    if let Some(p) = points.iter().find(|p| p.dim() != n) {
        return Err(Error::DimensionMismatch { expected: n + 1, got: p.coords().len() });
    }
    let basis = normalized_basis(n, m)?;
    solve_weights_with(&basis, points)
}

pub(crate) fn solve_weights_with(basis: &[Polynomial], points: &[SpherePoint]) -> Result<WeightFit> {
    let count = points.len();
    if basis.is_empty() {
        return Ok(WeightFit { weights: vec![1.0 / count as f64; count], residual: 0.0 });
    }
    let a = evaluation_matrix(basis, points);
    // Σν = 1 enters as a heavily weighted extra row; the result is renormalized.
    let kappa = 1e4 * a.norm().max(1.0);
    let rows = a.nrows() + 1;
    let aug = DMatrix::from_fn(rows, count, |r, c| if r < a.nrows() { a[(r, c)] } else { kappa });
    let mut rhs = DVector::zeros(rows);
    rhs[rows - 1] = kappa;
    let sol = match nnls::nnls(&aug, &rhs, 30 * count + 50) {
        Ok(sol) => sol,
        Err(Error::NonConvergence { iterations, best, .. }) => {
            let total: f64 = best.iter().sum();
            let w = DVector::from_iterator(count, best.iter().map(|v| v / total.max(1e-300)));
            let residual = (&a * &w).amax();
            return Err(Error::NonConvergence { iterations, residual, best: w.iter().copied().collect() });
        }
        Err(e) => return Err(e),
    };
    let total: f64 = sol.x.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Invariant("weight solve returned the zero vector".into()));
    }
    let weights: Vec<f64> = sol.x.iter().map(|v| v / total).collect();
    let residual = (&a * DVector::from_column_slice(&weights)).amax();
    Ok(WeightFit { weights, residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn antipodal() -> Vec<SpherePoint> {
        vec![SpherePoint::basis(2, 0), SpherePoint::basis(2, 0).neg()]
    }

    #[test]
    fn antipodal_pair_is_exact_for_degree_one() {
        let d = MomentDesign::new(2, 1, antipodal(), vec![0.5, 0.5]).unwrap();
        assert!(d.residual() <= 1e-15);
        let fit = solve_weights(&antipodal(), 1).unwrap();
        assert!((fit.weights[0] - 0.5).abs() < 1e-12 && (fit.weights[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn single_point_residual() {
        let x = SpherePoint::new(vec![0.3, -0.4, 0.5]).unwrap();
        let d = MomentDesign::new(2, 1, vec![x.clone()], vec![1.0]).unwrap();
        // basis x₁, x₂, x₃ normalized by sqrt(4π/3)
        let norm = (4.0 * std::f64::consts::PI / 3.0).sqrt();
        let want = x.coords().iter().fold(0.0f64, |a, c| a.max(c.abs())) / norm;
        assert!((d.residual() - want).abs() < 1e-14);
        let pole = MomentDesign::new(2, 1, vec![SpherePoint::basis(2, 2)], vec![1.0]).unwrap();
        assert!(pole.residual() > 0.4);
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(MomentDesign::new(2, 1, antipodal(), vec![1.5, -0.5]).is_err());
        assert!(MomentDesign::new(2, 1, antipodal(), vec![0.5, 0.4]).is_err());
        assert!(MomentDesign::new(2, 1, antipodal(), vec![1.0]).is_err());
        assert!(MomentDesign::new(3, 1, antipodal(), vec![0.5, 0.5]).is_err());
    }

    #[test]
    fn three_points_cannot_do_degree_two_on_s2() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let pts: Vec<_> = (0..3).map(|_| SpherePoint::random(2, &mut rng)).collect();
            let fit = solve_weights(&pts, 2).unwrap();
            assert!(!fit.is_feasible(), "residual {}", fit.residual);
        }
    }

    #[test]
    fn json_roundtrip_keeps_field_order() {
        let d = MomentDesign::new(2, 1, antipodal(), vec![0.5, 0.5]).unwrap();
        let s = d.to_json().unwrap();
        let keys = ["\"n\"", "\"m\"", "\"points\"", "\"weights\"", "\"residual\""];
        let pos: Vec<usize> = keys.iter().map(|k| s.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(MomentDesign::from_json(&s).unwrap(), d);
    }
}
