//! The orthogonality correction and the assembled test function
//!
//! ```text
//! e^{nu} = e^{nv} + Σⱼ βⱼ η² pⱼ + c₁ log(1/ε)
//! ```
//!
//! where η vanishes near the centers and β makes e^{nu} orthogonal to every
//! basis polynomial.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::caps::{build_caps, cap_sum, sum_parts, Cap, CompensatedSum};
use super::family::BubbleFamily;
use crate::error::{domain, Error, Result};
use crate::grid::QuadratureGrid;
use crate::poly::{condition_number, Polynomial, RestrictedBasis};
use crate::special::sphere_area_unchecked;

/// Largest accepted condition number of the correction Gram matrix.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Tolerance on the relative residual of the correction solve.
const SOLVE_TOLERANCE: f64 = 1e-10;

/// Tolerance on the relative moment defect of the assembled function.
const ORTHOGONALITY_TOLERANCE: f64 = 1e-8;

/// δ/8, shrunk when needed so the caps of radius 2δ + 2·margin stay disjoint.
pub fn default_eta_margin(family: &BubbleFamily) -> f64 {
    let delta = family.delta();
    let room = 0.5 * family.min_separation() - 2.0 * delta;
    (delta / 8.0).min(0.45 * room)
}

/// η(t) = 0 for t ≤ a, sin²(π(t − a)/(2h)) on (a, a + h), 1 beyond; a = 2δ + h.
#[derive(Debug, Clone, Copy)]
struct Cutoff {
    start: f64,
    margin: f64,
}

impl Cutoff {
    fn new(delta: f64, margin: f64) -> Self {
        Self { start: 2.0 * delta + margin, margin }
    }

    fn end(&self) -> f64 {
        self.start + self.margin
    }

    /// (η, η').
    fn eval(&self, t: f64) -> (f64, f64) {
        if t <= self.start {
            (0.0, 0.0)
        } else if t >= self.end() {
            (1.0, 0.0)
        } else {
            let a = PI * (t - self.start) / self.margin;
            let s = (0.5 * a).sin();
            (s * s, 0.5 * PI / self.margin * a.sin())
        }
    }
}

fn check_inputs(family: &BubbleFamily, basis: &RestrictedBasis, margin: f64, grid: &QuadratureGrid) -> Result<()> {
    if basis.dim_sphere != family.n() {
        return Err(domain(format!(
            "basis lives on S^{} but the family on S^{}",
            basis.dim_sphere,
            family.n()
        )));
    }
    if grid.dim() != family.n() {
        return Err(domain(format!("grid lives on S^{} but the family on S^{}", grid.dim(), family.n())));
    }
    if !(margin > 0.0 && margin.is_finite()) {
        return Err(domain(format!("eta margin must be positive, got {margin}")));
    }
    Ok(())
}

/// Cap rule reaching the outer edge of the η ramp.
fn caps_for(family: &BubbleFamily, cut: &Cutoff) -> Result<Vec<Cap>> {
    build_caps(family, cut.end(), &[cut.start])
}

/// Values of every member at every node of every cap, node-major.
fn member_values(members: &[Polynomial], caps: &[Cap]) -> Vec<Vec<f64>> {
    caps.iter()
        .map(|cap| cap.nodes.iter().flat_map(|q| members.iter().map(|p| p.eval_raw(&q.x))).collect())
        .collect()
}

/// The system ∫η² pⱼ p_k dμ · β = −∫e^{nv} p_k dμ.
fn correction_system(
    family: &BubbleFamily,
    basis: &RestrictedBasis,
    cut: &Cutoff,
    caps: &[Cap],
    values: &[Vec<f64>],
) -> (DMatrix<f64>, DVector<f64>) {
    let l = basis.len();
    let n = family.n() as f64;
    // per-cap partial sums: l rhs entries, then the upper triangle of the Gram matrix
    let width = l + l * (l + 1) / 2;
    let parts: Vec<Vec<f64>> = caps
        .iter()
        .zip(values)
        .map(|(cap, vals)| {
            let profile = family.profiles()[cap.center];
            let mut acc = vec![CompensatedSum::default(); width];
            for (q, p) in cap.nodes.iter().zip(vals.chunks_exact(l.max(1))) {
                let (eta, _) = cut.eval(q.t);
                let outside = q.w * (eta * eta - 1.0);
                let bump = q.w * (n * profile.phi(q.t)).exp_m1();
                let mut slot = l;
                for j in 0..l {
                    acc[j].add(bump * p[j]);
                    for k in j..l {
                        if outside != 0.0 {
                            acc[slot].add(outside * p[j] * p[k]);
                        }
                        slot += 1;
                    }
                }
            }
            acc.iter().map(CompensatedSum::value).collect()
        })
        .collect();
    let total = |idx: usize| sum_parts(parts.iter().map(|c| c[idx]).collect());
    let mut gram = basis.gram.clone();
    let mut rhs = DVector::zeros(l);
    let mut slot = l;
    for j in 0..l {
        rhs[j] = -(basis.members[j].sphere_integral() + total(j));
        for k in j..l {
            gram[(j, k)] += total(slot);
            gram[(k, j)] = gram[(j, k)];
            slot += 1;
        }
    }
    (gram, rhs)
}

/// ∫ e^{nv} q dμ for the uncorrected family.
pub fn bubble_moment(family: &BubbleFamily, q: &Polynomial) -> Result<f64> {
    if q.nvars() != family.n() + 1 {
        return Err(Error::DimensionMismatch { expected: family.n() + 1, got: q.nvars() });
    }
    let n = family.n() as f64;
    let caps = build_caps(family, 2.0 * family.delta(), &[])?;
    let bumps = cap_sum(&caps, |cap, x| {
        x.w * (n * family.profiles()[cap.center].phi(x.t)).exp_m1() * q.eval_raw(&x.x)
    });
    Ok(q.sphere_integral() + bumps)
}

/// Solves for the coefficients β of ψⱼ = η² pⱼ.
pub fn correction_solve(
    family: &BubbleFamily,
    basis: &RestrictedBasis,
    eta_margin: f64,
    grid: &QuadratureGrid,
) -> Result<Vec<f64>> {
    check_inputs(family, basis, eta_margin, grid)?;
    if basis.is_empty() {
        return Ok(Vec::new());
    }
    let cut = Cutoff::new(family.delta(), eta_margin);
    let caps = caps_for(family, &cut)?;
    let values = member_values(&basis.members, &caps);
    let (gram, rhs) = correction_system(family, basis, &cut, &caps, &values);
    let condition = condition_number(&gram);
    if !(condition <= CONDITION_LIMIT) {
        return Err(Error::IllConditioned { condition, limit: CONDITION_LIMIT });
    }
    let beta = gram
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Invariant("correction Gram matrix is not positive definite".into()))?
        .solve(&rhs);
    let scale = rhs.norm().max(gram.norm() * beta.norm()).max(f64::MIN_POSITIVE);
    let residual = (&gram * &beta - &rhs).norm() / scale;
    if residual > SOLVE_TOLERANCE {
        return Err(Error::Invariant(format!("correction solve residual {residual:.3e} exceeds {SOLVE_TOLERANCE:e}")));
    }
    Ok(beta.iter().copied().collect())
}

/// u = (1/n) log(e^{nv} + Σ βⱼψⱼ + c₁ log(1/ε)) with its integrals.
#[derive(Debug, Clone)]
pub struct CorrectedTestFunction {
    pub family: BubbleFamily,
    pub basis: RestrictedBasis,
    pub eta_margin: f64,
    pub beta: Vec<f64>,
    pub c1: f64,
    pub grid: QuadratureGrid,
    cut: Cutoff,
    caps: Vec<Cap>,
    /// Σ βⱼ pⱼ as one polynomial.
    combo: Polynomial,
    integral: f64,
    mean: f64,
}

pub fn assemble_u(
    family: &BubbleFamily,
    basis: &RestrictedBasis,
    beta: &[f64],
    eta_margin: f64,
    grid: &QuadratureGrid,
) -> Result<CorrectedTestFunction> {
    check_inputs(family, basis, eta_margin, grid)?;
    if beta.len() != basis.len() {
        return Err(Error::DimensionMismatch { expected: basis.len(), got: beta.len() });
    }
    let n = family.n();
    let nf = n as f64;
    let cut = Cutoff::new(family.delta(), eta_margin);
    let caps = caps_for(family, &cut)?;
    let combo = basis
        .members
        .iter()
        .zip(beta)
        .fold(Polynomial::zero(n + 1), |acc, (p, b)| acc.add(&p.scale(*b)));
    let big_l = family.log_inv_eps();

    // Sup norms of ψⱼ and the minimum of Σβⱼpⱼ over all nodes.
    let mut psi_sup = vec![0.0f64; basis.len()];
    let mut p_min = f64::INFINITY;
    let mut visit = |x: &[f64], t: f64| {
        let (eta, _) = cut.eval(t);
        for (s, p) in psi_sup.iter_mut().zip(&basis.members) {
            *s = s.max((eta * eta * p.eval_raw(x)).abs());
        }
        p_min = p_min.min(combo.eval_raw(x));
    };
    for x in grid.nodes() {
        let (_, t) = family.nearest(x.coords());
        visit(x.coords(), t);
    }
    for cap in &caps {
        for q in &cap.nodes {
            visit(&q.x, q.t);
        }
    }
    let spread = beta.iter().zip(&psi_sup).map(|(b, s)| b.abs() * s).fold(0.0, f64::max);
    let c1 = 1f64.max(2.0 * spread / big_l).max(1.0 - p_min / big_l);

    let mut tf = CorrectedTestFunction {
        family: family.clone(),
        basis: basis.clone(),
        eta_margin,
        beta: beta.to_vec(),
        c1,
        grid: grid.clone(),
        cut,
        caps,
        combo,
        integral: 0.0,
        mean: 0.0,
    };

    // e^{nu} ≥ log(1/ε) everywhere we sample
    let floor = tf.grid.nodes().iter().map(|x| tf.exp_nu_raw(x.coords())).chain(
        tf.caps.iter().flat_map(|c| c.nodes.iter().map(|q| tf.exp_nu_at(c.center, q.t, &q.x))),
    );
    let worst = floor.fold(f64::INFINITY, f64::min);
    if !(worst >= big_l) {
        return Err(Error::Assembly(format!(
            "e^(nu) drops to {worst:.6e} below log(1/eps) = {big_l:.6e} after choosing c1 = {c1:.6e}"
        )));
    }

    tf.integral = tf.integrate_against(&Polynomial::constant(n + 1, 1.0));
    // ū from the grid for the smooth part (1/n) log G and the caps for the rest
    let outer: f64 = tf
        .grid
        .nodes()
        .iter()
        .zip(tf.grid.weights())
        .map(|(x, w)| w * tf.smooth_part(x.coords()).ln())
        .sum();
    let inner = cap_sum(&tf.caps, |cap, q| {
        q.w * (tf.exp_nu_at(cap.center, q.t, &q.x) / tf.smooth_part(&q.x)).ln()
    });
    tf.mean = (outer + inner) / (nf * sphere_area_unchecked(n));

    let defect = tf.max_moment_defect();
    if !(defect <= ORTHOGONALITY_TOLERANCE) {
        return Err(Error::Assembly(format!(
            "moment defect {defect:.3e} exceeds {ORTHOGONALITY_TOLERANCE:e} after correction"
        )));
    }
    Ok(tf)
}

impl CorrectedTestFunction {
    /// G = 1 + c₁ log(1/ε) + Σβⱼpⱼ, equal to e^{nu} outside the caps.
    fn smooth_part(&self, x: &[f64]) -> f64 {
        1.0 + self.c1 * self.family.log_inv_eps() + self.combo.eval_raw(x)
    }

    /// e^{nu} at a point whose nearest center is `center` at distance `t`.
    fn exp_nu_at(&self, center: usize, t: f64, x: &[f64]) -> f64 {
        let n = self.family.n() as f64;
        let (eta, _) = self.cut.eval(t);
        (n * self.family.profiles()[center].phi(t)).exp()
            + eta * eta * self.combo.eval_raw(x)
            + self.c1 * self.family.log_inv_eps()
    }

    fn exp_nu_raw(&self, x: &[f64]) -> f64 {
        let (i, t) = self.family.nearest(x);
        self.exp_nu_at(i, t, x)
    }

    /// e^{nu(x)}.
    pub fn exp_nu(&self, x: &crate::sphere::SpherePoint) -> f64 {
        self.exp_nu_raw(x.coords())
    }

    /// u(x).
    pub fn eval_u(&self, x: &crate::sphere::SpherePoint) -> f64 {
        self.exp_nu(x).ln() / self.family.n() as f64
    }

    /// u at the grid nodes.
    pub fn u_on_grid(&self) -> Vec<f64> {
        let n = self.family.n() as f64;
        self.grid.nodes().iter().map(|x| self.exp_nu_raw(x.coords()).ln() / n).collect()
    }

    /// ∫ e^{nu} q dμ.
    pub fn integrate_against(&self, q: &Polynomial) -> f64 {
        let n = self.family.n();
        let g = self.combo.add(&Polynomial::constant(n + 1, 1.0 + self.c1 * self.family.log_inv_eps()));
        let nf = n as f64;
        let inner = cap_sum(&self.caps, |cap, node| {
            let (eta, _) = self.cut.eval(node.t);
            let diff = (nf * self.family.profiles()[cap.center].phi(node.t)).exp_m1()
                + (eta * eta - 1.0) * self.combo.eval_raw(&node.x);
            if diff == 0.0 {
                0.0
            } else {
                node.w * diff * q.eval_raw(&node.x)
            }
        });
        g.mul(q).sphere_integral() + inner
    }

    /// |∫ e^{nu} q dμ| / (∫ e^{nu} dμ · ‖q‖), with ‖q‖ the root mean square of q on Sⁿ.
    pub fn moment_defect(&self, q: &Polynomial) -> f64 {
        let rms = (q.mul(q).sphere_mean()).sqrt();
        if rms == 0.0 {
            return 0.0;
        }
        self.integrate_against(q).abs() / (self.integral * rms)
    }

    /// Largest [`moment_defect`](Self::moment_defect) over the basis members.
    pub fn max_moment_defect(&self) -> f64 {
        self.basis.members.iter().map(|p| self.moment_defect(p)).fold(0.0, f64::max)
    }

    /// ∫ e^{nu} dμ.
    pub fn integral(&self) -> f64 {
        self.integral
    }

    /// log ∫ e^{nu} dμ.
    pub fn log_integral(&self) -> f64 {
        self.integral.ln()
    }

    /// ū, the average of u over Sⁿ.
    pub fn mean_u(&self) -> f64 {
        self.mean
    }

    /// Smallest sampled value of e^{nu}.
    pub fn min_exp_nu(&self) -> f64 {
        let grid_min = self.grid.nodes().iter().map(|x| self.exp_nu_raw(x.coords())).fold(f64::INFINITY, f64::min);
        self.caps
            .iter()
            .flat_map(|c| c.nodes.iter().map(move |q| self.exp_nu_at(c.center, q.t, &q.x)))
            .fold(grid_min, f64::min)
    }

    /// ∫ |∇u|ⁿ dμ from the exact gradient
    /// ∇e^{nu} = (n e^{nv} φ' + 2ηη' Σβp) ∇t + η² ∇Σβp.
    pub fn corrected_energy(&self) -> Result<f64> {
        let n = self.family.n();
        let nf = n as f64;
        let ni = n as i32;
        let big_l = self.family.log_inv_eps();
        let smooth_density = |x: &[f64]| -> (f64, Vec<f64>) {
            let g = self.smooth_part(x);
            let grad = self.combo.sphere_gradient_raw(x);
            let norm = grad.iter().map(|v| v * v).sum::<f64>().sqrt();
            ((norm / (nf * g)).powi(ni), grad)
        };
        let mut total = 0.0;
        for (x, w) in self.grid.nodes().iter().zip(self.grid.weights()) {
            total += w * smooth_density(x.coords()).0;
        }
        let mut bad = None;
        let inner = cap_sum(&self.caps, |cap, q| {
            let profile = self.family.profiles()[cap.center];
            let (outer, grad_p) = smooth_density(&q.x);
            let (eta, deta) = self.cut.eval(q.t);
            let e = (nf * profile.phi(q.t)).exp();
            let p = self.combo.eval_raw(&q.x);
            let f = e + eta * eta * p + self.c1 * big_l;
            let radial = nf * e * profile.dphi(q.t) + 2.0 * eta * deta * p;
            let norm = q
                .grad_t
                .iter()
                .zip(&grad_p)
                .map(|(gt, gp)| radial * gt + eta * eta * gp)
                .map(|v| v * v)
                .sum::<f64>()
                .sqrt();
            let density = (norm / (nf * f)).powi(ni);
            if !density.is_finite() {
                bad.get_or_insert_with(|| (density, format!("cap {} node at distance t = {:e}, x = {:?}", cap.center, q.t, q.x)));
            }
            q.w * (density - outer)
        });
        if let Some((value, location)) = bad {
            return Err(Error::NonFinite { value, location });
        }
        total += inner;
        Ok(total)
    }
}
