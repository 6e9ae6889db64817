#![allow(dead_code)]

use mtlab::poly::{monomial_basis, Polynomial};
use mtlab::sphere::SpherePoint;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Haar-distributed orthogonal matrix, row-major.
pub fn random_orthogonal<R: Rng>(d: usize, rng: &mut R) -> Vec<f64> {
    let g = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut out = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            out[i * d + j] = q[(i, j)] * r[(j, j)].signum();
        }
    }
    out
}

pub fn rotate(matrix: &[f64], x: &SpherePoint) -> SpherePoint {
    let d = x.coords().len();
    let c = x.coords();
    SpherePoint::new((0..d).map(|i| (0..d).map(|j| matrix[i * d + j] * c[j]).sum()).collect()).unwrap()
}

/// Polynomial on ℝⁿ⁺¹ of degree ≤ m with coefficients uniform in [−1, 1].
pub fn random_poly<R: Rng>(n: usize, m: u32, rng: &mut R) -> Polynomial {
    monomial_basis(n, m)
        .into_iter()
        .fold(Polynomial::zero(n + 1), |acc, p| acc.add(&p.scale(rng.random_range(-1.0..1.0))))
}

/// Random polynomial with its sphere mean removed.
pub fn random_zero_mean_poly<R: Rng>(n: usize, m: u32, rng: &mut R) -> Polynomial {
    let p = random_poly(n, m, rng);
    let mean = p.sphere_mean();
    p.sub(&Polynomial::constant(n + 1, mean))
}

/// Least-squares slope of y against x.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let k = x.len() as f64;
    let mx = x.iter().sum::<f64>() / k;
    let my = y.iter().sum::<f64>() / k;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
