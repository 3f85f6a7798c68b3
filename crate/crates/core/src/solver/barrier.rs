//! Log-barrier path following for
//!
//! ```text
//! minimize t  over (t, c) ∈ ℝ × ℝ^p
//! subject to  t·1 − (A − Σ c_i H_i) ⪰ 0,   t·1 + (A − Σ c_i H_i) ⪰ 0,
//!             [optionally]  s·1 ∓ Σ c_i H_i ⪰ 0
//! ```
//!
//! blockwise, for a Hermitian target `A` and a Hermitian orthonormal basis
//! `H_i` of `ℬ^h`. The optimal `t` is the distance from `A` to `ℬ^h` (optionally
//! restricted to `‖B‖ ≤ s`). At each centered point the scaled inverses
//! `F±⁻¹/τ` are dual-feasible densities; they are returned so the caller can
//! turn them into a certified lower bound.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::linalg::{self, CMatrix, ZERO};

/// Half the squared Newton decrement below which a point counts as centered.
const CENTERED: f64 = 1e-12;
/// Newton steps per centering after which a stalled decrement ends it.
const STAGNATION_STEPS: usize = 30;

pub(crate) struct Problem<'a> {
    pub target: &'a [CMatrix],
    pub basis: Vec<&'a [CMatrix]>,
    pub norm_cap: Option<f64>,
}

#[derive(Clone, Debug)]
pub(crate) struct Settings {
    pub max_newton: usize,
    /// Stop once the barrier duality-gap bound `m/τ` falls below this.
    pub gap_tol: f64,
    pub growth: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { max_newton: 4000, gap_tol: 1e-11, growth: 16.0 }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Iterate {
    pub t: f64,
    pub coeffs: Vec<f64>,
    /// `F₊⁻¹/τ`, blockwise (dual density for `t − (A − B) ⪰ 0`).
    pub dual_plus: Vec<CMatrix>,
    /// `F₋⁻¹/τ`, blockwise.
    pub dual_minus: Vec<CMatrix>,
    /// Barrier gap bound `m/τ` at this point.
    pub gap_bound: f64,
    pub newton_steps: usize,
}

#[derive(Clone, Debug)]
pub(crate) enum Outcome {
    Converged(Iterate),
    /// Newton budget exhausted; carries the last centered iterate.
    Budget(Iterate),
}

/// One constraint matrix family: `K = t_coeff·t·1 + offset + sign·B(c)`.
#[derive(Clone, Copy)]
struct Family {
    t_coeff: f64,
    target_sign: f64,
    cap: f64,
    b_sign: f64,
}

impl<'a> Problem<'a> {
    fn families(&self) -> Vec<Family> {
        let mut f = vec![
            // F₊ = t − A + B
            Family { t_coeff: 1.0, target_sign: -1.0, cap: 0.0, b_sign: 1.0 },
            // F₋ = t + A − B
            Family { t_coeff: 1.0, target_sign: 1.0, cap: 0.0, b_sign: -1.0 },
        ];
        if let Some(s) = self.norm_cap {
            // G₊ = s − B, G₋ = s + B
            f.push(Family { t_coeff: 0.0, target_sign: 0.0, cap: s, b_sign: -1.0 });
            f.push(Family { t_coeff: 0.0, target_sign: 0.0, cap: s, b_sign: 1.0 });
        }
        f
    }

    fn combination(&self, coeffs: &[f64]) -> Vec<CMatrix> {
        let mut out: Vec<CMatrix> = self.target.iter().map(|a| CMatrix::zeros(a.nrows(), a.ncols())).collect();
        for (c, h) in coeffs.iter().zip(&self.basis) {
            if *c == 0.0 {
                continue;
            }
            let s = Complex64::new(*c, 0.0);
            for (o, hb) in out.iter_mut().zip(h.iter()) {
                o.zip_apply(hb, |x, y| *x += y * s);
            }
        }
        out
    }

    fn constraint_matrices(&self, t: f64, coeffs: &[f64]) -> Vec<(Family, usize, CMatrix)> {
        let b = self.combination(coeffs);
        let mut out = Vec::new();
        for fam in self.families() {
            for (j, a) in self.target.iter().enumerate() {
                let n = a.nrows();
                let diag = fam.t_coeff * t + fam.cap;
                let mut k = a * Complex64::new(fam.target_sign, 0.0) + &b[j] * Complex64::new(fam.b_sign, 0.0);
                for i in 0..n {
                    k[(i, i)] += Complex64::new(diag, 0.0);
                }
                out.push((fam, j, k));
            }
        }
        out
    }

    fn barrier_dim(&self) -> f64 {
        let m: usize = self.target.iter().map(|a| a.nrows()).sum();
        m as f64 * if self.norm_cap.is_some() { 4.0 } else { 2.0 }
    }

    /// Every constraint matrix positive definite.
    fn in_domain(&self, t: f64, coeffs: &[f64]) -> bool {
        self.constraint_matrices(t, coeffs).iter().all(|(_, _, k)| linalg::hermitian_cholesky(k).is_some())
    }
}

/// Follow the central path from `start`. `accept` sees every centered iterate
/// and ends the solve early by returning `true`.
pub(crate) fn solve(
    problem: &Problem<'_>,
    start: &[f64],
    settings: &Settings,
    accept: &mut dyn FnMut(&Iterate) -> bool,
) -> Outcome {
    let p = problem.basis.len();
    let m = problem.barrier_dim();
    let mut coeffs = start.to_vec();
    let b0 = problem.combination(&coeffs);
    let dist0 = problem
        .target
        .iter()
        .zip(&b0)
        .map(|(a, b)| linalg::herm_op_norm(&(a - b)))
        .fold(0.0, f64::max);
    let mut t = 1.05 * dist0 + 1e-2;
    let mut tau = m / t.max(1e-3);
    let mut newton_steps = 0;
    let mut last = None;

    loop {
        // Centering.
        let mut centered = false;
        let mut inner = 0;
        let mut prev_decrement = f64::INFINITY;
        while newton_steps < settings.max_newton {
            let Some((grad, hess, _)) = derivatives(problem, tau, t, &coeffs) else {
                break;
            };
            newton_steps += 1;
            let step = newton_direction(&hess, &grad);
            let decrement = -grad.dot(&step);
            if decrement <= 0.0 || decrement / 2.0 < CENTERED {
                centered = true;
                break;
            }
            // Damped Newton for a self-concordant barrier: the step 1/(1 + λ)
            // stays feasible and decreases the objective, with no function values
            // needed (they lose all precision once τ·t dominates).
            let lambda = decrement.sqrt();
            let mut s = if lambda < 0.25 { 1.0 } else { 1.0 / (1.0 + lambda) };
            let mut moved = false;
            while s > 1e-14 {
                let t_new = t + s * step[0];
                let c_new: Vec<f64> = coeffs.iter().enumerate().map(|(i, c)| c + s * step[i + 1]).collect();
                if problem.in_domain(t_new, &c_new) {
                    t = t_new;
                    coeffs = c_new;
                    moved = true;
                    break;
                }
                s *= 0.5;
            }
            inner += 1;
            // Stagnating decrements mean rounding noise has been reached.
            if !moved || (inner > STAGNATION_STEPS && decrement >= 0.5 * prev_decrement) {
                centered = true;
                break;
            }
            prev_decrement = decrement;
        }
        if let Some((_, _, inverses)) = derivatives(problem, tau, t, &coeffs) {
            let (dual_plus, dual_minus) = split_duals(problem, &inverses, tau);
            last = Some(Iterate {
                t,
                coeffs: coeffs.clone(),
                dual_plus,
                dual_minus,
                gap_bound: m / tau,
                newton_steps,
            });
        }
        let Some(it) = last.clone() else {
            // Fell out of the domain before the first centering; restart is not possible.
            return Outcome::Budget(Iterate {
                t,
                coeffs,
                dual_plus: vec![],
                dual_minus: vec![],
                gap_bound: f64::INFINITY,
                newton_steps,
            });
        };
        if centered && accept(&it) {
            return Outcome::Converged(it);
        }
        if !centered || newton_steps >= settings.max_newton {
            return Outcome::Budget(it);
        }
        if m / tau <= settings.gap_tol {
            return Outcome::Converged(it);
        }
        tau *= settings.growth;
        let _ = p;
    }
}

/// Gradient, Hessian and the blockwise inverses of every constraint matrix.
fn derivatives(
    problem: &Problem<'_>,
    tau: f64,
    t: f64,
    coeffs: &[f64],
) -> Option<(DVector<f64>, DMatrix<f64>, Vec<(Family, usize, CMatrix)>)> {
    let p = problem.basis.len();
    let dim = p + 1;
    let mut grad = DVector::zeros(dim);
    let mut hess = DMatrix::zeros(dim, dim);
    grad[0] = tau;
    let mut inverses = Vec::new();
    for (fam, j, k) in problem.constraint_matrices(t, coeffs) {
        let inv = linalg::cholesky_inverse(&linalg::hermitian_cholesky(&k)?);
        // M_a = K⁻¹ ∂_a K, stored transposed so tr(M_a M_b) is an entrywise dot.
        let mut ms: Vec<Option<CMatrix>> = Vec::with_capacity(dim);
        ms.push(if fam.t_coeff != 0.0 { Some(&inv * Complex64::new(fam.t_coeff, 0.0)) } else { None });
        for h in &problem.basis {
            let hb = &h[j];
            if hb.iter().all(|z| *z == ZERO) {
                ms.push(None);
            } else {
                ms.push(Some(&inv * hb * Complex64::new(fam.b_sign, 0.0)));
            }
        }
        let transposed: Vec<Option<CMatrix>> = ms.iter().map(|m| m.as_ref().map(|x| x.transpose())).collect();
        for a in 0..dim {
            let Some(ma) = &ms[a] else { continue };
            grad[a] -= linalg::trace(ma).re;
            for b in a..dim {
                let Some(mbt) = &transposed[b] else { continue };
                let v: f64 = ma.iter().zip(mbt.iter()).map(|(x, y)| (x * y).re).sum();
                hess[(a, b)] += v;
                if a != b {
                    hess[(b, a)] += v;
                }
            }
        }
        inverses.push((fam, j, inv));
    }
    Some((grad, hess, inverses))
}

fn newton_direction(hess: &DMatrix<f64>, grad: &DVector<f64>) -> DVector<f64> {
    let n = hess.nrows();
    let scale = (0..n).map(|i| hess[(i, i)].abs()).fold(0.0, f64::max).max(1e-300);
    let mut reg = 0.0;
    for _ in 0..8 {
        let mut h = hess.clone();
        for i in 0..n {
            h[(i, i)] += reg;
        }
        if let Some(ch) = h.cholesky() {
            return -ch.solve(grad);
        }
        reg = if reg == 0.0 { 1e-14 * scale } else { reg * 100.0 };
    }
    // Fall back to steepest descent.
    -grad.clone() / scale
}

fn split_duals(problem: &Problem<'_>, inverses: &[(Family, usize, CMatrix)], tau: f64) -> (Vec<CMatrix>, Vec<CMatrix>) {
    let mut plus: Vec<CMatrix> = problem.target.iter().map(|a| CMatrix::zeros(a.nrows(), a.ncols())).collect();
    let mut minus = plus.clone();
    for (fam, j, inv) in inverses {
        if fam.t_coeff == 0.0 {
            continue;
        }
        let w = inv / Complex64::new(tau, 0.0);
        if fam.target_sign < 0.0 {
            plus[*j] = w;
        } else {
            minus[*j] = w;
        }
    }
    (plus, minus)
}
