use crate::error::{domain, Result};
use crate::sphere::SpherePoint;

use super::MomentDesign;

/// Vertices of the regular (n+1)-simplex inscribed in Sⁿ with equal weights,
/// exact for every polynomial of degree ≤ 2.
///
/// The standard basis e₁ … e_{n+2} of ℝⁿ⁺² is centred at its barycentre,
/// carried into ℝⁿ⁺¹ by the Helmert orthonormal basis of the hyperplane
/// Σxᵢ = 0 and rescaled onto the unit sphere.
pub fn simplex_design(n: usize) -> Result<MomentDesign> {
    if n < 1 {
        return Err(domain("simplex_design requires n >= 1"));
    }
    let count = n + 2;
    let centre = 1.0 / count as f64;
    // Helmert row k (1-based): (1, …, 1, −k, 0, …) / sqrt(k(k+1))
    let helmert = |k: usize, j: usize| -> f64 {
        let kf = k as f64;
        let norm = (kf * (kf + 1.0)).sqrt();
        if j < k {
            1.0 / norm
        } else if j == k {
            -kf / norm
        } else {
            0.0
        }
    };
    let scale = (count as f64 / (count as f64 - 1.0)).sqrt();
    let points = (0..count)
        .map(|i| {
            let coords = (1..count)
                .map(|k| {
                    (0..count)
                        .map(|j| {
                            let e = if j == i { 1.0 } else { 0.0 };
                            (e - centre) * helmert(k, j)
                        })
                        .sum::<f64>()
                        * scale
                })
                .collect();
            SpherePoint::new(coords)
        })
        .collect::<Result<Vec<_>>>()?;
    MomentDesign::new(n, 2, points, vec![centre; count])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tetrahedron() {
        let d = simplex_design(2).unwrap();
        assert_eq!(d.len(), 4);
        assert!(d.residual() <= 1e-12);
        for i in 0..4 {
            for j in (i + 1)..4 {
                assert!((d.points()[i].dot(&d.points()[j]) + 1.0 / 3.0).abs() < 1e-14);
            }
        }
        assert!(d.weights().iter().all(|&w| w == 0.25));
    }

    #[test]
    fn pairwise_dots_and_centering() {
        for n in 1..=6 {
            let d = simplex_design(n).unwrap();
            let want = -1.0 / (n as f64 + 1.0);
            for (i, a) in d.points().iter().enumerate() {
                for b in &d.points()[i + 1..] {
                    assert!((a.dot(b) - want).abs() < 1e-14);
                }
            }
            for k in 0..=n {
                let s: f64 = d.points().iter().map(|p| p.coords()[k]).sum();
                assert!(s.abs() < 1e-14);
            }
            assert!(d.residual() <= 1e-12, "n={n} residual {}", d.residual());
        }
    }
}
