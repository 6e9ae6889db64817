//! ε-sweeps of the corrected bubble construction at a moment design.
//!
//! For each ε the sweep records log ∫ e^{nu}, ū and ‖∇u‖ⁿ and forms
//! a(ε) = (log ∫ e^{nu} − nū) / ‖∇u‖ⁿ, the coefficient the inequality
//! log ∫ e^{nu} ≤ a‖∇u‖ⁿ + nū + c would need at this u once the additive
//! constant c is dropped. Along a valid design a(ε) tends to αₙ/N.

use std::fmt::Write as _;

use serde::Serialize;

use super::constants::onofri_alpha;
use crate::bubble::{assemble_u, bubble_energy, correction_solve, default_eta_margin, BubbleFamily};
use crate::design::MomentDesign;
use crate::error::{domain, Result};
use crate::grid::QuadratureGrid;
use crate::poly::{restricted_zero_mean_basis, RestrictedBasis};

/// ε values used when none are given.
pub const DEFAULT_EPS: [f64; 5] = [1e-2, 3e-3, 1e-3, 3e-4, 1e-4];

/// Column names of the CSV table, in order.
pub const CSV_COLUMNS: [&str; 8] = [
    "eps",
    "log_integral",
    "mean_u",
    "energy_v",
    "energy_u",
    "max_moment_defect",
    "ratio_estimate",
    "a_estimate",
];

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub eps: f64,
    pub log_integral: f64,
    pub mean_u: f64,
    pub energy_v: f64,
    pub energy_u: f64,
    pub max_moment_defect: f64,
    /// a_estimate / (αₙ/N).
    pub ratio_estimate: f64,
    pub a_estimate: f64,
    pub beta: Vec<f64>,
    pub c1: f64,
    /// Set when this ε failed; the numeric fields are then NaN.
    pub error: Option<String>,
}

impl SweepRow {
    fn failed(eps: f64, msg: String) -> Self {
        Self {
            eps,
            log_integral: f64::NAN,
            mean_u: f64::NAN,
            energy_v: f64::NAN,
            energy_u: f64::NAN,
            max_moment_defect: f64::NAN,
            ratio_estimate: f64::NAN,
            a_estimate: f64::NAN,
            beta: Vec::new(),
            c1: f64::NAN,
            error: Some(msg),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub n: usize,
    pub m: u32,
    /// Number of bubbles (design points with positive weight).
    pub count: usize,
    pub delta: f64,
    pub eta_margin: f64,
    /// αₙ/N.
    pub target: f64,
    pub rows: Vec<SweepRow>,
    /// a_estimate at the smallest ε that succeeded.
    pub a_estimate: Option<f64>,
    pub complete: bool,
}

impl SweepReport {
    pub fn successful(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| r.is_ok())
    }

    /// The last three a_estimate values decrease and all stay ≥ 0.9·αₙ/N.
    pub fn approaches_from_above(&self) -> bool {
        let a: Vec<f64> = self.successful().map(|r| r.a_estimate).collect();
        if a.len() < 3 || !self.complete {
            return false;
        }
        let tail = &a[a.len() - 3..];
        tail.windows(2).all(|w| w[1] < w[0]) && tail.iter().all(|&v| v >= 0.9 * self.target)
    }

    /// CSV with one `# ` comment line per entry of `header`, the column row,
    /// then one row per ε; failed rows carry NaN and a trailing `# failed` comment.
    pub fn to_csv(&self, header: &[String]) -> String {
        let mut out = String::new();
        for h in header {
            let _ = writeln!(out, "# {h}");
        }
        let _ = writeln!(out, "{}", CSV_COLUMNS.join(","));
        for r in &self.rows {
            let vals = [
                r.eps,
                r.log_integral,
                r.mean_u,
                r.energy_v,
                r.energy_u,
                r.max_moment_defect,
                r.ratio_estimate,
                r.a_estimate,
            ];
            let line: Vec<String> = vals.iter().map(|v| format!("{v:e}")).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        for r in &self.rows {
            if let Some(e) = &r.error {
                let _ = writeln!(out, "# failed eps={:e}: {e}", r.eps);
            }
        }
        out
    }
}

fn basis_for(n: usize, m: u32) -> Result<RestrictedBasis> {
    if m == 0 {
        Ok(RestrictedBasis::empty(n))
    } else {
        restricted_zero_mean_basis(n, m)
    }
}

fn sweep_row(family: &BubbleFamily, basis: &RestrictedBasis, margin: f64, grid: &QuadratureGrid, target: f64) -> Result<SweepRow> {
    let nf = family.n() as f64;
    let beta = correction_solve(family, basis, margin, grid)?;
    let tf = assemble_u(family, basis, &beta, margin, grid)?;
    let energy_u = tf.corrected_energy()?;
    let energy_v = bubble_energy(family)?;
    let log_integral = tf.log_integral();
    let mean_u = tf.mean_u();
    let a_estimate = (log_integral - nf * mean_u) / energy_u;
    Ok(SweepRow {
        eps: family.eps(),
        log_integral,
        mean_u,
        energy_v,
        energy_u,
        max_moment_defect: tf.max_moment_defect(),
        ratio_estimate: a_estimate / target,
        a_estimate,
        c1: tf.c1,
        beta,
        error: None,
    })
}

/// Runs the construction at every ε of `eps_list` with bubbles at the design
/// points. `eta_margin` defaults to [`default_eta_margin`].
pub fn sharpness_sweep(
    design: &MomentDesign,
    delta: f64,
    eps_list: &[f64],
    grid: &QuadratureGrid,
    eta_margin: Option<f64>,
) -> Result<SweepReport> {
    if !design.is_valid() {
        return Err(domain(format!("design residual {:.3e} is not valid", design.residual())));
    }
    if eps_list.is_empty() {
        return Err(domain("eps list is empty"));
    }
    if eps_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(domain("eps list must be strictly decreasing"));
    }
    if let Some(e) = eps_list.iter().find(|&&e| !(e > 0.0 && e < delta)) {
        return Err(domain(format!("every eps must lie in (0, delta = {delta}), got {e}")));
    }
    let n = design.n();
    let family = BubbleFamily::from_design(design, delta, eps_list[0])?;
    let margin = eta_margin.unwrap_or_else(|| default_eta_margin(&family));
    let basis = basis_for(n, design.m())?;
    let target = onofri_alpha(n as u32)? / family.len() as f64;

    let run = |&eps: &f64| -> SweepRow {
        family
            .with_eps(eps)
            .and_then(|f| sweep_row(&f, &basis, margin, grid, target))
            .unwrap_or_else(|e| SweepRow::failed(eps, e.to_string()))
    };
    #[cfg(feature = "parallel")]
    let rows: Vec<SweepRow> = {
        use rayon::prelude::*;
        eps_list.par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<SweepRow> = eps_list.iter().map(run).collect();

    let complete = rows.iter().all(SweepRow::is_ok);
    let a_estimate = rows.iter().rev().find(|r| r.is_ok()).map(|r| r.a_estimate);
    Ok(SweepReport {
        n,
        m: design.m(),
        count: family.len(),
        delta,
        eta_margin: margin,
        target,
        rows,
        a_estimate,
        complete,
    })
}
