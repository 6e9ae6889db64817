//! Points on Sⁿ ⊂ ℝⁿ⁺¹, geodesic distance and exact monomial moments.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::special::{gamma_half, ln_gamma_half};

/// A unit vector in ℝⁿ⁺¹. Inputs are renormalized at construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SpherePoint {
    coords: Vec<f64>,
}

impl SpherePoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(domain("a sphere point needs at least 2 coordinates"));
        }
        if let Some(bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::NonFinite { value: *bad, location: "SpherePoint coordinates".into() });
        }
        let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return Err(domain("cannot normalize the zero vector onto the sphere"));
        }
        Ok(Self { coords: coords.into_iter().map(|c| c / norm).collect() })
    }

    /// The standard basis vector e_{axis} in ℝⁿ⁺¹ (axis is 0-based).
    pub fn basis(n: usize, axis: usize) -> Self {
        assert!(axis <= n, "axis {axis} out of range for S^{n}");
        let mut coords = vec![0.0; n + 1];
        coords[axis] = 1.0;
        Self { coords }
    }

    /// A uniformly distributed point on Sⁿ.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        loop {
            let v: Vec<f64> = (0..=n).map(|_| rng.sample(StandardNormal)).collect();
            if let Ok(p) = Self::new(v) {
                return p;
            }
        }
    }

    /// Sphere dimension n (the point lives in ℝⁿ⁺¹).
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dot(&self, other: &SpherePoint) -> f64 {
        dot(&self.coords, &other.coords)
    }

    pub fn neg(&self) -> Self {
        Self { coords: self.coords.iter().map(|c| -c).collect() }
    }

    pub(crate) fn from_unit_unchecked(coords: Vec<f64>) -> Self {
        Self { coords }
    }

    /// Orthonormal basis (n vectors) of the tangent space at this point.
    pub fn tangent_basis(&self) -> Vec<Vec<f64>> {
        let dim = self.coords.len();
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(dim - 1);
        let mut frame = vec![self.coords.clone()];
        // Gram-Schmidt over the standard basis, most orthogonal axes first.
        let mut axes: Vec<usize> = (0..dim).collect();
        axes.sort_by(|&a, &b| self.coords[a].abs().total_cmp(&self.coords[b].abs()));
        for axis in axes {
            if basis.len() == dim - 1 {
                break;
            }
            let mut v = vec![0.0; dim];
            v[axis] = 1.0;
            for _ in 0..2 {
                for f in &frame {
                    let proj = dot(&v, f);
                    v.iter_mut().zip(f).for_each(|(vi, fi)| *vi -= proj * fi);
                }
            }
            let norm = dot(&v, &v).sqrt();
            if norm > 1e-8 {
                v.iter_mut().for_each(|vi| *vi /= norm);
                frame.push(v.clone());
                basis.push(v);
            }
        }
        basis
    }
}

impl TryFrom<Vec<f64>> for SpherePoint {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SpherePoint> for Vec<f64> {
    fn from(p: SpherePoint) -> Self {
        p.coords
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Geodesic distance on Sⁿ, in [0, π].
pub fn geodesic_distance(x: &SpherePoint, y: &SpherePoint) -> f64 {
    geodesic_distance_raw(x.coords(), y.coords())
}

pub(crate) fn geodesic_distance_raw(x: &[f64], y: &[f64]) -> f64 {
    // The cross-product form keeps precision near 0 and π where acos is flat.
    let d = dot(x, y).clamp(-1.0, 1.0);
    let cross2: f64 = {
        let mut s = 0.0;
        for i in 0..x.len() {
            for j in (i + 1)..x.len() {
                let w = x[i] * y[j] - x[j] * y[i];
                s += w * w;
            }
        }
        s
    };
    let t = cross2.sqrt().atan2(d);
    if x == y {
        0.0
    } else {
        t.clamp(0.0, std::f64::consts::PI)
    }
}

/// A multi-index over the n+1 ambient coordinates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl TryFrom<&[i64]> for MultiIndex {
    type Error = Error;
    fn try_from(v: &[i64]) -> Result<Self> {
        v.iter()
            .map(|&a| u32::try_from(a).map_err(|_| domain(format!("negative or oversized exponent {a}"))))
            .collect::<Result<Vec<_>>>()
            .map(MultiIndex)
    }
}

/// ∫_{Sⁿ} x^α dμ, exactly: zero when some αᵢ is odd, otherwise
/// 2 ∏ Γ((αᵢ+1)/2) / Γ((|α|+n+1)/2).
pub fn monomial_moment(alpha: &[u32], n: usize) -> Result<f64> {
    if alpha.len() != n + 1 {
        return Err(Error::DimensionMismatch { expected: n + 1, got: alpha.len() });
    }
    if n < 1 {
        return Err(domain("monomial_moment requires n >= 1"));
    }
    Ok(moment_unchecked(alpha))
}

pub(crate) fn moment_unchecked(alpha: &[u32]) -> f64 {
    if alpha.iter().any(|a| a % 2 == 1) {
        return 0.0;
    }
    let total: u32 = alpha.iter().sum::<u32>() + alpha.len() as u32;
    if total <= 150 {
        let num: f64 = alpha.iter().map(|&a| gamma_half(a + 1)).product();
        2.0 * num / gamma_half(total)
    } else {
        let ln_num: f64 = alpha.iter().map(|&a| ln_gamma_half(a + 1)).sum();
        2.0 * (ln_num - ln_gamma_half(total)).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn renormalizes() {
        let p = SpherePoint::new(vec![3.0, 4.0, 0.0]).unwrap();
        let n: f64 = p.coords().iter().map(|c| c * c).sum::<f64>().sqrt();
        assert!((n - 1.0).abs() < 1e-15);
        assert!(SpherePoint::new(vec![0.0, 0.0, 0.0]).is_err());
        assert!(SpherePoint::new(vec![f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn distances() {
        let e1 = SpherePoint::basis(2, 0);
        let e2 = SpherePoint::basis(2, 1);
        assert_eq!(geodesic_distance(&e1, &e1), 0.0);
        assert!((geodesic_distance(&e1, &e1.neg()) - PI).abs() < 1e-15);
        assert!((geodesic_distance(&e1, &e2) - PI / 2.0).abs() < 1e-15);
        // tiny separations are resolved, unlike with a bare acos
        let near = SpherePoint::new(vec![1.0, 1e-9, 0.0]).unwrap();
        assert!((geodesic_distance(&e1, &near) - 1e-9).abs() < 1e-20);
    }

    #[test]
    fn moments() {
        assert_eq!(monomial_moment(&[1, 0, 0], 2).unwrap(), 0.0);
        assert!((monomial_moment(&[2, 0, 0], 2).unwrap() - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((monomial_moment(&[2, 2, 0], 2).unwrap() - 4.0 * PI / 15.0).abs() < 1e-14);
        assert!((monomial_moment(&[0, 0, 0], 2).unwrap() - 4.0 * PI).abs() < 1e-14);
        assert!(monomial_moment(&[2, 0], 2).is_err());
        assert!(MultiIndex::try_from(&[1i64, -1, 0][..]).is_err());
    }

    #[test]
    fn tangent_frame_is_orthonormal() {
        let p = SpherePoint::new(vec![0.3, -0.2, 0.9, 0.1]).unwrap();
        let t = p.tangent_basis();
        assert_eq!(t.len(), 3);
        for (i, a) in t.iter().enumerate() {
            assert!(dot(a, p.coords()).abs() < 1e-14);
            for (j, b) in t.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot(a, b) - want).abs() < 1e-14);
            }
        }
    }
}
