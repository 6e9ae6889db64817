//! The three quantities entering log ∫ e^{nu} ≤ αₙ‖∇u‖ⁿ + nū + c for a grid function.

use crate::error::{domain, Error, Result};
use crate::grid::QuadratureGrid;
use crate::special::sphere_area_unchecked;

/// (log ∫ e^{nu} dμ, ∫ |∇u|ⁿ dμ, ū) for nodal values `u` on `grid`.
pub fn onofri_gap(u_nodes: &[f64], n: usize, grid: &QuadratureGrid) -> Result<(f64, f64, f64)> {
    if n != grid.dim() {
        return Err(domain(format!("n = {n} but the grid lives on S^{}", grid.dim())));
    }
    if u_nodes.len() != grid.len() {
        return Err(Error::DimensionMismatch { expected: grid.len(), got: u_nodes.len() });
    }
    if let Some((i, v)) = u_nodes.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(domain(format!("u is not finite at grid node {i}: {v}")));
    }
    let nf = n as f64;
    let shift = nf * u_nodes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scaled: f64 = u_nodes.iter().zip(grid.weights()).map(|(u, w)| w * (nf * u - shift).exp()).sum();
    let log_integral = scaled.ln() + shift;
    let grads = grid.gradient_norms(u_nodes)?;
    let energy = grads.iter().zip(grid.weights()).map(|(g, w)| w * g.powi(n as i32)).sum();
    let mean = grid.integrate_values(u_nodes) / sphere_area_unchecked(n);
    Ok((log_integral, energy, mean))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::grid::{build_grid, default_resolution};

    #[test]
    fn constants() {
        let g = build_grid(2, default_resolution(2)).unwrap();
        let (li, e, m) = onofri_gap(&vec![0.0; g.len()], 2, &g).unwrap();
        assert!((li - (4.0 * PI).ln()).abs() < 1e-12 && e == 0.0 && m == 0.0);
        let (li, e, m) = onofri_gap(&vec![5.0; g.len()], 2, &g).unwrap();
        assert!((li - (4.0 * PI).ln() - 10.0).abs() < 1e-12);
        assert!(e.abs() < 1e-20 && (m - 5.0).abs() < 1e-12);
    }

    #[test]
    fn linear_function_energy() {
        let g = build_grid(2, default_resolution(2)).unwrap();
        let c = 1e-2;
        let u: Vec<f64> = g.nodes().iter().map(|x| c * x.coords()[2]).collect();
        let (_, e, m) = onofri_gap(&u, 2, &g).unwrap();
        assert!((e / (c * c) - 8.0 * PI / 3.0).abs() < 1e-6);
        assert!(m.abs() < 1e-14);
    }

    #[test]
    fn rejects_non_finite() {
        let g = build_grid(2, 16).unwrap();
        let mut u = vec![0.0; g.len()];
        u[3] = f64::NAN;
        assert!(matches!(onofri_gap(&u, 2, &g), Err(Error::Domain(_))));
        assert!(onofri_gap(&u[..10], 2, &g).is_err());
    }
}
