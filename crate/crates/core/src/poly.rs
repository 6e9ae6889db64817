//! Polynomials on ℝⁿ⁺¹ restricted to Sⁿ, with exact sphere integrals.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{domain, Error, Result};
use crate::sphere::{moment_unchecked, SpherePoint};

/// Sparse polynomial in `nvars` variables. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        Self::monomial(vec![0; nvars], c)
    }

    pub fn monomial(alpha: Vec<u32>, coef: f64) -> Self {
        let mut p = Self::zero(alpha.len());
        p.add_term(alpha, coef);
        p
    }

    /// The coordinate function x_{axis} (0-based).
    pub fn coordinate(nvars: usize, axis: usize) -> Self {
        let mut alpha = vec![0; nvars];
        alpha[axis] = 1;
        Self::monomial(alpha, 1.0)
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, f64)>) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (alpha, c) in terms {
            if alpha.len() != nvars {
                return Err(Error::DimensionMismatch { expected: nvars, got: alpha.len() });
            }
            p.add_term(alpha, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, alpha: Vec<u32>, coef: f64) {
        let entry = self.terms.entry(alpha).or_insert(0.0);
        *entry += coef;
        self.terms.retain(|_, c| *c != 0.0);
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], f64)> {
        self.terms.iter().map(|(a, c)| (a.as_slice(), *c))
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|a| a.iter().sum()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut p = Self::zero(self.nvars);
        for (a, c) in &self.terms {
            p.add_term(a.clone(), c * s);
        }
        p
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "polynomial dimension mismatch");
        let mut p = self.clone();
        for (a, c) in &other.terms {
            p.add_term(a.clone(), *c);
        }
        p
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "polynomial dimension mismatch");
        let mut p = Self::zero(self.nvars);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let ab: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                p.add_term(ab, ca * cb);
            }
        }
        p
    }

    pub fn eval(&self, x: &SpherePoint) -> Result<f64> {
        if x.coords().len() != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, got: x.coords().len() });
        }
        Ok(self.eval_raw(x.coords()))
    }

    pub(crate) fn eval_raw(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(a, c)| c * a.iter().zip(x).map(|(&e, xi)| xi.powi(e as i32)).product::<f64>())
            .sum()
    }

    /// Ambient gradient ∇p(x) in ℝⁿ⁺¹.
    pub(crate) fn gradient_raw(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.nvars];
        for (a, c) in &self.terms {
            for k in 0..self.nvars {
                if a[k] == 0 {
                    continue;
                }
                let mut term = c * f64::from(a[k]);
                for (j, (&e, xj)) in a.iter().zip(x).enumerate() {
                    let e = if j == k { e - 1 } else { e };
                    term *= xj.powi(e as i32);
                }
                g[k] += term;
            }
        }
        g
    }

    /// Gradient of p restricted to the sphere, at a unit vector x.
    pub(crate) fn sphere_gradient_raw(&self, x: &[f64]) -> Vec<f64> {
        let g = self.gradient_raw(x);
        let radial: f64 = g.iter().zip(x).map(|(a, b)| a * b).sum();
        g.iter().zip(x).map(|(gi, xi)| gi - radial * xi).collect()
    }

    /// ∫_{Sⁿ} p dμ from exact monomial moments.
    pub fn sphere_integral(&self) -> f64 {
        self.terms.iter().map(|(a, c)| c * moment_unchecked(a)).sum()
    }

    /// Average of p over Sⁿ.
    pub fn sphere_mean(&self) -> f64 {
        self.sphere_integral() / crate::special::sphere_area_unchecked(self.nvars - 1)
    }
}

/// ∫_{Sⁿ} p q dμ, exact up to floating point.
pub fn sphere_inner_product(p: &Polynomial, q: &Polynomial) -> Result<f64> {
    if p.nvars() != q.nvars() {
        return Err(Error::DimensionMismatch { expected: p.nvars(), got: q.nvars() });
    }
    Ok(p.mul(q).sphere_integral())
}

pub fn eval_poly(p: &Polynomial, x: &SpherePoint) -> Result<f64> {
    p.eval(x)
}

/// Exponent vectors of total degree `d` in `nvars` variables, lexicographically
/// descending (x₁^d first).
fn exponents_of_degree(nvars: usize, d: u32) -> Vec<Vec<u32>> {
    if nvars == 1 {
        return vec![vec![d]];
    }
    let mut out = Vec::new();
    for first in (0..=d).rev() {
        for mut rest in exponents_of_degree(nvars - 1, d - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// All monomials x^α on ℝⁿ⁺¹ with |α| ≤ m, graded-lexicographic.
pub fn monomial_basis(n: usize, m: u32) -> Vec<Polynomial> {
    (0..=m)
        .flat_map(|d| exponents_of_degree(n + 1, d))
        .map(|a| Polynomial::monomial(a, 1.0))
        .collect()
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Dimension of the degree-k spherical harmonics on Sⁿ.
pub fn harmonic_dimension(n: usize, k: u32) -> usize {
    let (n, k) = (n as u64, u64::from(k));
    let lower = if k >= 2 { binomial(n + k - 2, n) } else { 0 };
    (binomial(n + k, n) - lower) as usize
}

/// Relative pivot threshold for the rank reduction.
pub const RANK_THRESHOLD: f64 = 1e-10;

/// An independent spanning set of the zero-mean polynomials of degree ≤ m
/// restricted to Sⁿ, with its exact Gram matrix.
#[derive(Debug, Clone)]
pub struct RestrictedBasis {
    pub dim_sphere: usize,
    pub degree: u32,
    pub members: Vec<Polynomial>,
    /// Gram matrix ∫ pⱼ p_k dμ.
    pub gram: DMatrix<f64>,
    pub zero_mean: bool,
    /// Condition number of the unit-diagonal Gram matrix.
    pub condition: f64,
    /// Set when an accepted or rejected pivot lies within 10× of the threshold.
    pub ambiguous_rank: bool,
}

impl RestrictedBasis {
    /// The basis of 𝒫̊₀ = {0}: no members. Used when no moment condition is imposed.
    pub fn empty(n: usize) -> Self {
        Self {
            dim_sphere: n,
            degree: 0,
            members: Vec::new(),
            gram: DMatrix::zeros(0, 0),
            zero_mean: true,
            condition: 1.0,
            ambiguous_rank: false,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Members scaled to unit L²(Sⁿ) norm.
    pub fn normalized_members(&self) -> Vec<Polynomial> {
        self.members
            .iter()
            .enumerate()
            .map(|(i, p)| p.scale(1.0 / self.gram[(i, i)].sqrt()))
            .collect()
    }

    /// Express a zero-mean polynomial in the basis by Gram projection;
    /// returns the coefficients and the L² norm of what is left over.
    pub fn project(&self, p: &Polynomial) -> Result<(Vec<f64>, f64)> {
        let rhs = DMatrix::from_iterator(
            self.len(),
            1,
            self.members.iter().map(|q| sphere_inner_product(q, p)).collect::<Result<Vec<_>>>()?,
        );
        let chol = self
            .gram
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Invariant("basis Gram matrix is not positive definite".into()))?;
        let coef = chol.solve(&rhs);
        let mut rest = p.clone();
        for (q, c) in self.members.iter().zip(coef.iter()) {
            rest = rest.sub(&q.scale(*c));
        }
        let leftover = sphere_inner_product(&rest, &rest)?.max(0.0).sqrt();
        Ok((coef.iter().copied().collect(), leftover))
    }
}

/// Exact Gram matrix of `polys` under ∫_{Sⁿ} pq dμ.
pub fn gram_matrix(polys: &[Polynomial]) -> DMatrix<f64> {
    let k = polys.len();
    let mut g = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let v = polys[i].mul(&polys[j]).sphere_integral();
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    g
}

pub(crate) fn condition_number(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 1.0;
    }
    let eig = SymmetricEigen::new(m.clone());
    let max = eig.eigenvalues.iter().fold(f64::MIN, |a, &b| a.max(b));
    let min = eig.eigenvalues.iter().fold(f64::MAX, |a, &b| a.min(b));
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Mean-subtracted monomials of degree 1..=m, reduced to an independent set
/// on Sⁿ by pivoted Cholesky of the normalized Gram matrix.
pub fn restricted_zero_mean_basis(n: usize, m: u32) -> Result<RestrictedBasis> {
    if m < 1 {
        return Err(domain("restricted_zero_mean_basis requires m >= 1"));
    }
    if n < 1 {
        return Err(domain("restricted_zero_mean_basis requires n >= 1"));
    }
    let candidates: Vec<Polynomial> = monomial_basis(n, m)
        .into_iter()
        .skip(1)
        .map(|p| {
            let mean = p.sphere_mean();
            p.sub(&Polynomial::constant(n + 1, mean))
        })
        .collect();
    let gram = gram_matrix(&candidates);
    let k = candidates.len();
    let scale: Vec<f64> = (0..k).map(|i| gram[(i, i)].sqrt()).collect();
    let mut a = DMatrix::from_fn(k, k, |i, j| gram[(i, j)] / (scale[i] * scale[j]));

    // Pivoted Cholesky: a ← a − l lᵀ, picking the largest remaining diagonal.
    let mut remaining: Vec<usize> = (0..k).collect();
    let mut chosen = Vec::new();
    let mut first_pivot = None;
    let mut ambiguous = false;
    while !remaining.is_empty() {
        let (pos, &piv) = remaining
            .iter()
            .enumerate()
            .max_by(|x, y| a[(*x.1, *x.1)].total_cmp(&a[(*y.1, *y.1)]))
            .expect("non-empty");
        let d = a[(piv, piv)];
        let reference = *first_pivot.get_or_insert(d);
        let ratio = d / reference;
        if ratio < 10.0 * RANK_THRESHOLD && ratio > 0.1 * RANK_THRESHOLD {
            ambiguous = true;
        }
        if ratio < RANK_THRESHOLD {
            break;
        }
        remaining.remove(pos);
        chosen.push(piv);
        let col: Vec<f64> = (0..k).map(|i| a[(i, piv)] / d.sqrt()).collect();
        for &i in &remaining {
            for &j in &remaining {
                a[(i, j)] -= col[i] * col[j];
            }
        }
    }
    chosen.sort_unstable();
    let members: Vec<Polynomial> = chosen.iter().map(|&i| candidates[i].clone()).collect();
    let gram = gram_matrix(&members);
    let unit = DMatrix::from_fn(members.len(), members.len(), |i, j| {
        gram[(i, j)] / (gram[(i, i)] * gram[(j, j)]).sqrt()
    });
    let condition = condition_number(&unit);
    Ok(RestrictedBasis { dim_sphere: n, degree: m, members, gram, zero_mean: true, condition, ambiguous_rank: ambiguous })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn monomial_counts_and_order() {
        assert_eq!(monomial_basis(2, 0).len(), 1);
        let b1 = monomial_basis(2, 1);
        assert_eq!(b1.len(), 4);
        let first: Vec<_> = b1[1].terms().map(|(a, _)| a.to_vec()).collect();
        assert_eq!(first, vec![vec![1, 0, 0]]);
        assert_eq!(monomial_basis(2, 2).len(), 10);
        assert_eq!(monomial_basis(3, 3).len(), binomial(7, 3) as usize);
    }

    #[test]
    fn evaluation() {
        let x = SpherePoint::new(vec![1.0, 1.0, 0.0]).unwrap();
        let p = Polynomial::monomial(vec![2, 1, 0], 1.0);
        let want = 0.5 * (1.0 / 2f64.sqrt());
        assert!((p.eval(&x).unwrap() - want).abs() < 1e-15);
        assert_eq!(Polynomial::constant(3, 1.0).eval(&x).unwrap(), 1.0);
        assert_eq!(Polynomial::coordinate(3, 0).eval(&SpherePoint::basis(2, 0)).unwrap(), 1.0);
        assert!(Polynomial::constant(4, 1.0).eval(&x).is_err());
    }

    #[test]
    fn inner_products() {
        let one = Polynomial::constant(3, 1.0);
        let x1 = Polynomial::coordinate(3, 0);
        let x2 = Polynomial::coordinate(3, 1);
        assert!((sphere_inner_product(&one, &one).unwrap() - 4.0 * PI).abs() < 1e-13);
        assert_eq!(sphere_inner_product(&x1, &x2).unwrap(), 0.0);
        assert!((sphere_inner_product(&x1, &x1).unwrap() - 4.0 * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn zero_coefficients_dropped() {
        let p = Polynomial::coordinate(3, 0).sub(&Polynomial::coordinate(3, 0));
        assert!(p.is_zero());
        assert_eq!(p.degree(), 0);
    }

    #[test]
    fn restricted_dimensions() {
        assert_eq!(restricted_zero_mean_basis(2, 1).unwrap().len(), 3);
        assert_eq!(restricted_zero_mean_basis(2, 2).unwrap().len(), 8);
        assert_eq!(restricted_zero_mean_basis(3, 1).unwrap().len(), 4);
        for n in 2..=4 {
            for m in 1..=3u32 {
                let b = restricted_zero_mean_basis(n, m).unwrap();
                let want: usize = (0..=m).map(|k| harmonic_dimension(n, k)).sum::<usize>() - 1;
                assert_eq!(b.len(), want, "n={n} m={m}");
                assert!(!b.ambiguous_rank);
                assert!(b.condition.is_finite());
                for p in &b.members {
                    assert!(p.sphere_integral().abs() < 1e-12);
                }
            }
        }
        assert!(restricted_zero_mean_basis(2, 0).is_err());
    }

    #[test]
    fn sphere_gradient_is_tangent() {
        let p = Polynomial::from_terms(3, [(vec![2, 1, 0], 1.5), (vec![0, 0, 1], -2.0)]).unwrap();
        let x = SpherePoint::new(vec![0.2, -0.5, 0.7]).unwrap();
        let g = p.sphere_gradient_raw(x.coords());
        let radial: f64 = g.iter().zip(x.coords()).map(|(a, b)| a * b).sum();
        assert!(radial.abs() < 1e-15);
    }
}
