//! Tensor-product quadrature on Sⁿ in hyperspherical coordinates.
//!
//! Polar angles θ₁ … θ_{n−1} ∈ [0, π] carry Gauss–Legendre nodes with the
//! sin-power Jacobian folded into the weights; the azimuth φ carries
//! 2·resolution equispaced nodes. The chart is
//!
//! ```text
//! x₁     = cos θ₁
//! x₂     = sin θ₁ cos θ₂
//! …
//! xₙ     = sin θ₁ ⋯ sin θ_{n−1} cos φ
//! xₙ₊₁   = sin θ₁ ⋯ sin θ_{n−1} sin φ
//! ```
//!
//! The same tensor structure gives spectral derivatives: barycentric
//! Lagrange differentiation on the Gauss nodes and Fourier differentiation
//! in φ.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;
use crate::sphere::{geodesic_distance_raw, SpherePoint};

#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    dim: usize,
    nodes: Vec<SpherePoint>,
    weights: Vec<f64>,
    /// Node count per chart axis, polar axes first, azimuth last.
    resolution: Vec<usize>,
    /// Node values per chart axis.
    axes: Vec<Vec<f64>>,
    mesh_scale: f64,
}

/// Resolution used when callers do not ask for one: monomials up to degree 6
/// integrate to ~1e−12 relative.
pub fn default_resolution(n: usize) -> usize {
    match n {
        2 => 64,
        3 => 32,
        _ => 16,
    }
}

pub fn build_grid(n: usize, resolution: usize) -> Result<QuadratureGrid> {
    QuadratureGrid::new(n, resolution)
}

#[derive(Serialize)]
struct GridDump<'a> {
    dim: usize,
    nodes: Vec<&'a [f64]>,
    weights: &'a [f64],
}

impl QuadratureGrid {
    pub fn new(n: usize, resolution: usize) -> Result<Self> {
        if !(2..=4).contains(&n) {
            return Err(Error::UnsupportedDimension(n));
        }
        if resolution < 8 {
            return Err(Error::Domain(format!("grid resolution must be >= 8, got {resolution}")));
        }
        let (gx, gw) = gauss_legendre(resolution);
        let theta: Vec<f64> = gx.iter().map(|x| 0.5 * PI * (1.0 + x)).collect();
        let theta_w: Vec<f64> = gw.iter().map(|w| 0.5 * PI * w).collect();
        let n_phi = 2 * resolution;
        let phi: Vec<f64> = (0..n_phi).map(|k| 2.0 * PI * k as f64 / n_phi as f64).collect();
        let phi_w = 2.0 * PI / n_phi as f64;

        let mut resolution_v = vec![resolution; n - 1];
        resolution_v.push(n_phi);
        let mut axes = vec![theta.clone(); n - 1];
        axes.push(phi.clone());

        let total: usize = resolution_v.iter().product();
        let mut nodes = Vec::with_capacity(total);
        let mut weights = Vec::with_capacity(total);
        let mut idx = vec![0usize; n];
        for _ in 0..total {
            let mut coords = Vec::with_capacity(n + 1);
            let mut sin_prod = 1.0;
            let mut w = phi_w;
            for (axis, &i) in idx.iter().enumerate().take(n - 1) {
                let (s, c) = theta[i].sin_cos();
                coords.push(sin_prod * c);
                sin_prod *= s;
                w *= theta_w[i] * s.powi((n - 1 - axis) as i32);
            }
            let (s, c) = phi[idx[n - 1]].sin_cos();
            coords.push(sin_prod * c);
            coords.push(sin_prod * s);
            nodes.push(SpherePoint::from_unit_unchecked(coords));
            weights.push(w);
            // odometer increment, azimuth fastest
            for axis in (0..n).rev() {
                idx[axis] += 1;
                if idx[axis] < resolution_v[axis] {
                    break;
                }
                idx[axis] = 0;
            }
        }
        let mut grid = Self { dim: n, nodes, weights, resolution: resolution_v, axes, mesh_scale: 0.0 };
        grid.mesh_scale = grid.compute_mesh_scale();
        Ok(grid)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nodes(&self) -> &[SpherePoint] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    /// Largest nearest-neighbour geodesic spacing over chart neighbours.
    pub fn mesh_scale(&self) -> f64 {
        self.mesh_scale
    }

    pub fn integrate<F: Fn(&SpherePoint) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(x)).sum()
    }

    /// Weighted sum of precomputed nodal values.
    pub fn integrate_values(&self, values: &[f64]) -> f64 {
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    /// Debug dump `{dim, nodes, weights}`; not a stable format.
    pub fn to_json(&self) -> Result<String> {
        let dump = GridDump {
            dim: self.dim,
            nodes: self.nodes.iter().map(|p| p.coords()).collect(),
            weights: &self.weights,
        };
        Ok(serde_json::to_string(&dump)?)
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1usize; self.dim];
        for axis in (0..self.dim - 1).rev() {
            strides[axis] = strides[axis + 1] * self.resolution[axis + 1];
        }
        strides
    }

    fn compute_mesh_scale(&self) -> f64 {
        let strides = self.strides();
        let mut worst: f64 = 0.0;
        let mut idx = vec![0usize; self.dim];
        for (flat, node) in self.nodes.iter().enumerate() {
            let mut nearest = f64::INFINITY;
            for axis in 0..self.dim {
                let len = self.resolution[axis];
                let periodic = axis == self.dim - 1;
                for step in [-1i64, 1] {
                    let j = idx[axis] as i64 + step;
                    let j = if periodic {
                        j.rem_euclid(len as i64) as usize
                    } else if j < 0 || j >= len as i64 {
                        continue;
                    } else {
                        j as usize
                    };
                    let other = flat as i64 + (j as i64 - idx[axis] as i64) * strides[axis] as i64;
                    let d = geodesic_distance_raw(node.coords(), self.nodes[other as usize].coords());
                    nearest = nearest.min(d);
                }
            }
            worst = worst.max(nearest);
            for axis in (0..self.dim).rev() {
                idx[axis] += 1;
                if idx[axis] < self.resolution[axis] {
                    break;
                }
                idx[axis] = 0;
            }
        }
        worst
    }

    /// |∇u| at every node for nodal values `u`, by spectral differentiation
    /// in the chart.
    pub fn gradient_norms(&self, u: &[f64]) -> Result<Vec<f64>> {
        if u.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), got: u.len() });
        }
        if let Some((i, v)) = u.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { value: *v, location: format!("grid node {i}") });
        }
        let strides = self.strides();
        let mut sq = vec![0.0; u.len()];
        let mut partial = vec![0.0; u.len()];
        for axis in 0..self.dim {
            let len = self.resolution[axis];
            let dmat = if axis == self.dim - 1 {
                fourier_diff_matrix(len)
            } else {
                lagrange_diff_matrix(&self.axes[axis])
            };
            let stride = strides[axis];
            for start in 0..u.len() {
                if (start / stride) % len != 0 {
                    continue;
                }
                for i in 0..len {
                    let mut acc = 0.0;
                    for j in 0..len {
                        acc += dmat[i * len + j] * u[start + j * stride];
                    }
                    partial[start + i * stride] = acc;
                }
            }
            // metric factor 1 / (sin θ₁ ⋯ sin θ_axis)²
            let mut idx = vec![0usize; self.dim];
            for (flat, s) in sq.iter_mut().enumerate() {
                let mut scale = 1.0;
                for (a, &i) in idx.iter().enumerate().take(axis) {
                    let st = self.axes[a][i].sin();
                    scale *= st * st;
                }
                *s += partial[flat] * partial[flat] / scale;
                for a in (0..self.dim).rev() {
                    idx[a] += 1;
                    if idx[a] < self.resolution[a] {
                        break;
                    }
                    idx[a] = 0;
                }
            }
        }
        Ok(sq.into_iter().map(f64::sqrt).collect())
    }
}

/// Row-major differentiation matrix for the interpolating polynomial on `x`.
fn lagrange_diff_matrix(x: &[f64]) -> Vec<f64> {
    let len = x.len();
    // barycentric weights in log-magnitude form to stay in range
    let mut log_w = vec![0.0; len];
    let mut sign = vec![1.0; len];
    for i in 0..len {
        for j in 0..len {
            if i != j {
                let d = x[i] - x[j];
                log_w[i] -= d.abs().ln();
                if d < 0.0 {
                    sign[i] = -sign[i];
                }
            }
        }
    }
    let mut d = vec![0.0; len * len];
    for i in 0..len {
        let mut diag = 0.0;
        for j in 0..len {
            if i != j {
                let v = sign[j] * sign[i] * (log_w[j] - log_w[i]).exp() / (x[i] - x[j]);
                d[i * len + j] = v;
                diag -= v;
            }
        }
        d[i * len + i] = diag;
    }
    d
}

/// Fourier differentiation matrix on `len` (even) equispaced periodic nodes.
fn fourier_diff_matrix(len: usize) -> Vec<f64> {
    let h = 2.0 * PI / len as f64;
    let mut d = vec![0.0; len * len];
    for i in 0..len {
        for j in 0..len {
            if i != j {
                let k = i as i64 - j as i64;
                let sgn = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                d[i * len + j] = 0.5 * sgn / (0.5 * k as f64 * h).tan();
            }
        }
    }
    d
}
