//! Lawson–Hanson active-set solver for min ‖Ax − b‖ subject to x ≥ 0.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub(crate) struct NnlsSolution {
    pub x: DVector<f64>,
}

fn least_squares(a: &DMatrix<f64>, cols: &[usize], b: &DVector<f64>) -> DVector<f64> {
    let sub = DMatrix::from_fn(a.nrows(), cols.len(), |i, j| a[(i, cols[j])]);
    // Householder QR is accurate to working precision here; the SVD path
    // is only a fallback for rank-deficient column sets.
    if sub.nrows() >= sub.ncols() {
        let qr = sub.clone().qr();
        let r = qr.r();
        let diag_max = r.diagonal().amax();
        if r.diagonal().iter().all(|d| d.abs() > 1e-13 * diag_max) {
            let qtb = qr.q().transpose() * b;
            if let Some(x) = r.solve_upper_triangular(&qtb) {
                return x;
            }
        }
    }
    let svd = sub.svd(true, true);
    let tol = 1e-14 * svd.singular_values.max().max(1e-300);
    svd.solve(b, tol).expect("SVD computed with both factors")
}

pub(crate) fn nnls(a: &DMatrix<f64>, b: &DVector<f64>, max_iter: usize) -> Result<NnlsSolution> {
    let ncols = a.ncols();
    let mut x = DVector::zeros(ncols);
    let mut passive = vec![false; ncols];
    let tol = 10.0 * f64::EPSILON * a.norm() * (a.nrows().max(ncols) as f64);
    let mut iterations = 0;

    loop {
        let w = a.transpose() * (b - a * &x);
        let candidate = (0..ncols).filter(|&j| !passive[j]).max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(j) = candidate else { break };
        if w[j] <= tol {
            break;
        }
        passive[j] = true;

        loop {
            iterations += 1;
            if iterations > max_iter {
                let residual = (b - a * &x).norm();
                return Err(Error::NonConvergence { iterations, residual, best: x.iter().copied().collect() });
            }
            let cols: Vec<usize> = (0..ncols).filter(|&k| passive[k]).collect();
            let s_p = least_squares(a, &cols, b);
            let mut s = DVector::zeros(ncols);
            for (k, &c) in cols.iter().enumerate() {
                s[c] = s_p[k];
            }
            if cols.iter().all(|&c| s[c] > 0.0) {
                x = s;
                break;
            }
            // step back towards the feasible region
            let alpha = cols
                .iter()
                .filter(|&&c| s[c] <= 0.0)
                .map(|&c| x[c] / (x[c] - s[c]))
                .fold(f64::INFINITY, f64::min);
            x += (s - &x) * alpha;
            for &c in &cols {
                if x[c] <= tol {
                    x[c] = 0.0;
                    passive[c] = false;
                }
            }
        }
    }
    Ok(NnlsSolution { x })
}
