//! One-dimensional Gauss–Legendre rules and geodesic polar (radial) integration.

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::special::sphere_area_unchecked;

/// Gauss–Legendre nodes and weights on [-1, 1], nodes ascending.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1, "Gauss-Legendre order must be positive");
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let nf = order as f64;
    for i in 0..order.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_order.
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos()
            * (1.0 - (nf - 1.0) / (8.0 * nf * nf * nf));
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(order, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(order, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    if order % 2 == 1 {
        nodes[order / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(order: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=order {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if order == 0 { 1.0 } else { p1 };
    let d = order as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p, d)
}

/// Gauss–Legendre rule mapped to [lo, hi].
pub fn gauss_legendre_on(order: usize, lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(order);
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    (x.iter().map(|xi| mid + half * xi).collect(), w.iter().map(|wi| half * wi).collect())
}

/// Panel breakpoints for [lo, hi]: geometric grading (ratio ≤ 2) away from a
/// small left end, and no panel wider than `max_width`.
pub(crate) fn graded_breakpoints(lo: f64, hi: f64, max_width: f64) -> Vec<f64> {
    let mut pts = vec![lo];
    let mut a = lo;
    while a < hi {
        let mut b = if a > 0.0 { (2.0 * a).min(a + max_width) } else { hi.min(max_width) };
        if b >= hi * (1.0 - 1e-12) {
            b = hi;
        }
        pts.push(b);
        a = b;
    }
    pts
}

/// Radial nodes/weights for ∫_{lo}^{hi} f(t) |Sⁿ⁻¹| sinⁿ⁻¹(t) dt: composite
/// Gauss–Legendre on graded panels with the Jacobian folded into the weights.
pub(crate) fn radial_rule(n: usize, lo: f64, hi: f64, order: usize, breaks: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let shell = sphere_area_unchecked(n - 1);
    let mut cuts: Vec<f64> = vec![lo, hi];
    cuts.extend(breaks.iter().copied().filter(|&b| b > lo && b < hi));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut ts = Vec::new();
    let mut ws = Vec::new();
    for seg in cuts.windows(2) {
        let (sa, sb) = (seg[0], seg[1]);
        for panel in graded_breakpoints(sa, sb, 0.25).windows(2) {
            let (x, w) = gauss_legendre_on(order, panel[0], panel[1]);
            for (t, wt) in x.into_iter().zip(w) {
                ts.push(t);
                ws.push(wt * shell * t.sin().powi(n as i32 - 1));
            }
        }
    }
    (ts, ws)
}

/// ∫_{t_lo}^{t_hi} f(t) |Sⁿ⁻¹| sinⁿ⁻¹(t) dt, the integral over the geodesic
/// annulus t_lo < d(x, x₀) < t_hi of a function depending only on d(x, x₀).
pub fn radial_quadrature<F: Fn(f64) -> f64>(n: usize, f: F, t_lo: f64, t_hi: f64, nodes: usize) -> Result<f64> {
    if n < 1 {
        return Err(domain("radial_quadrature requires n >= 1"));
    }
    if !(0.0 <= t_lo && t_lo < t_hi && t_hi <= PI) {
        return Err(domain(format!("need 0 <= t_lo < t_hi <= pi, got [{t_lo}, {t_hi}]")));
    }
    if nodes < 16 {
        return Err(domain(format!("radial_quadrature needs at least 16 nodes per panel, got {nodes}")));
    }
    let (ts, ws) = radial_rule(n, t_lo, t_hi, nodes, &[]);
    let mut acc = 0.0;
    for (t, w) in ts.into_iter().zip(ws) {
        let v = f(t);
        if !v.is_finite() {
            return Err(Error::NonFinite { value: v, location: format!("radial node t = {t:e}") });
        }
        acc += w * v;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_integrates_polynomials_exactly() {
        for order in [1, 2, 5, 16, 33, 64] {
            let (x, w) = gauss_legendre(order);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            for deg in 0..(2 * order) {
                let got: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32)).sum();
                let want = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((got - want).abs() < 1e-13, "order {order} deg {deg}: {got} vs {want}");
            }
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn radial_constant_integrals() {
        let full = radial_quadrature(2, |_| 1.0, 0.0, PI, 16).unwrap();
        assert!((full - 4.0 * PI).abs() < 1e-12);
        let half = radial_quadrature(2, |_| 1.0, 0.0, PI / 2.0, 16).unwrap();
        assert!((half - 2.0 * PI).abs() < 1e-12);
        let s3 = radial_quadrature(3, |_| 1.0, 0.0, PI, 16).unwrap();
        assert!((s3 - 2.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn radial_errors() {
        assert!(radial_quadrature(2, |_| 1.0, 0.5, 0.1, 16).is_err());
        assert!(radial_quadrature(2, |_| 1.0, 0.0, 4.0, 16).is_err());
        assert!(radial_quadrature(2, |_| 1.0, 0.0, 1.0, 8).is_err());
        match radial_quadrature(2, |t| 1.0 / (t - t), 0.1, 1.0, 16) {
            Err(Error::NonFinite { location, .. }) => assert!(location.contains("radial node")),
            other => panic!("expected NonFinite, got {other:?}"),
        }
    }

    #[test]
    fn singular_weight_recovered_against_refined_reference() {
        let f = |t: f64| 1.0 / (t * t);
        let got = radial_quadrature(2, f, 1e-3, 0.5, 16).unwrap();
        let reference = radial_quadrature(2, f, 1e-3, 0.5, 160).unwrap();
        assert!(((got - reference) / reference).abs() < 1e-8);
        // leading behaviour 2π log(0.5 / 1e-3)
        let lead = 2.0 * PI * (0.5f64 / 1e-3).ln();
        assert!(((got - lead) / lead).abs() < 0.01);
    }
}
