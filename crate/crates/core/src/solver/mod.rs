//! Distance from an element to a subalgebra, best approximations, and the
//! norm-constrained variant.
//!
//! The default method is a log-barrier interior-point solve of the semidefinite
//! program `min t s.t. −t ≤ A − B ≤ t, B ∈ ℬ^h`. Every result is bracketed: the
//! upper end is the exact norm `‖A − B‖` of the returned minimizer, the lower end
//! comes from a dual functional `ψ ⟂ ℬ` through `|ψ(A)| / ‖ψ‖ ≤ L(A)`. The result
//! is accepted only when the bracket is narrower than `tol_outer`.
//!
//! Non-Hermitian `A` is handled through its Hermitian dilation. A best
//! approximation of the dilation can always be taken off-diagonal (average it
//! with its conjugate by `diag(1, −1)`), so only the off-diagonal half of
//! `M_2(ℬ)^h` enters the search and the minimizer is read off its lower-left
//! corner.

mod barrier;
mod dykstra;
mod oracle;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use oracle::{oracle_grid, oracle_grid_run, oracle_grid_with, OracleOptions, OracleRun};

use crate::algebra::{Element, HermitianFunctional};
use crate::certificate::{self, Witness};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::subalgebra::Subalgebra;

/// Default accuracy of the distance bracket.
pub const DEFAULT_TOL_OUTER: f64 = 1e-7;

/// Relative Hermiticity threshold below which an input is solved directly.
const HERMITIAN_SWITCH: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    InteriorPoint,
    BisectionDykstra,
    OracleGrid,
}

#[derive(Clone, Debug)]
pub struct SolverOptions {
    pub tol_outer: f64,
    pub method: Method,
    /// Newton-step budget for the interior-point method.
    pub max_newton: usize,
    /// Sweep budget per radius for bisection with Dykstra projections.
    pub max_sweeps: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol_outer: DEFAULT_TOL_OUTER,
            method: Method::InteriorPoint,
            max_newton: 4000,
            max_sweeps: 200_000,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(tol_outer: f64) -> Self {
        SolverOptions { tol_outer, ..Default::default() }
    }
}

/// Dual functional behind a lower bound. When `dilated` is set it lives on the
/// doubled algebra and is orthogonal to `M_2(ℬ)`.
#[derive(Clone, Debug)]
pub struct DualCertificate {
    pub functional: HermitianFunctional,
    pub dilated: bool,
}

#[derive(Clone, Debug)]
pub struct ApproxResult {
    /// `‖A − minimizer‖`, within `residual` of the true distance.
    pub radius: f64,
    pub minimizer: Element,
    /// Lower end of the distance bracket. Certified by a dual functional for the
    /// interior-point method; the last infeasible radius for bisection; the grid
    /// accuracy bound below the radius for the oracle.
    pub lower_bound: f64,
    pub iterations: usize,
    /// Width of the certified bracket `radius − lower_bound`.
    pub residual: f64,
    pub method: Method,
    pub dual: Option<DualCertificate>,
    /// Pure-state certificate for `A − minimizer`, when one was found.
    pub certificate: Option<Witness>,
}

/// `L(A) = inf{‖A − B‖ : B ∈ ℬ}` to within `tol_outer`.
pub fn quotient_seminorm(a: &Element, s: &Subalgebra, tol_outer: f64) -> Result<ApproxResult> {
    quotient_seminorm_with(a, s, &SolverOptions::with_tol(tol_outer))
}

pub fn quotient_seminorm_with(a: &Element, s: &Subalgebra, opts: &SolverOptions) -> Result<ApproxResult> {
    s.algebra().check(a)?;
    check_tol(opts.tol_outer)?;
    match opts.method {
        Method::InteriorPoint => solve_interior(a, s, None, opts),
        Method::BisectionDykstra => dykstra::solve(a, s, None, opts),
        Method::OracleGrid => oracle::oracle_grid(a, s, opts.tol_outer.max(1e-3)),
    }
}

/// Distance plus an attempt to certify the minimizer with pure states.
pub fn best_approximation(a: &Element, s: &Subalgebra) -> Result<ApproxResult> {
    best_approximation_with(a, s, &SolverOptions::default())
}

pub fn best_approximation_with(a: &Element, s: &Subalgebra, opts: &SolverOptions) -> Result<ApproxResult> {
    let mut result = quotient_seminorm_with(a, s, opts)?;
    result.certificate = certify(a, &result, s);
    Ok(result)
}

fn certify(a: &Element, result: &ApproxResult, s: &Subalgebra) -> Option<Witness> {
    let z = a - &result.minimizer;
    if z.norm() <= 1e-12 {
        return None;
    }
    let attempt = if is_effectively_hermitian(&z) {
        certificate::certify_minimal(&z.hermitian_part(), s)
    } else {
        certificate::certify_minimal(&z.dilation(), s.dilated())
    };
    match attempt {
        Ok(w) => Some(w),
        Err(e) => {
            log::info!("no pure-state certificate for the minimizer: {e}");
            None
        }
    }
}

/// Best approximation under the extra constraint `‖B‖ ≤ ‖A‖`.
#[derive(Clone, Debug)]
pub struct SameNormResult {
    pub radius_constrained: f64,
    pub minimizer: Element,
    pub lower_bound: f64,
    pub iterations: usize,
}

pub fn same_norm_distance(a: &Element, s: &Subalgebra) -> Result<SameNormResult> {
    same_norm_distance_with(a, s, &SolverOptions::default())
}

pub fn same_norm_distance_with(a: &Element, s: &Subalgebra, opts: &SolverOptions) -> Result<SameNormResult> {
    s.algebra().check(a)?;
    check_tol(opts.tol_outer)?;
    let cap = a.norm();
    let r = match opts.method {
        Method::InteriorPoint => solve_interior(a, s, Some(cap), opts)?,
        Method::BisectionDykstra => dykstra::solve(a, s, Some(cap), opts)?,
        Method::OracleGrid => return Err(Error::Unsupported("the grid oracle has no norm constraint".into())),
    };
    Ok(SameNormResult {
        radius_constrained: r.radius,
        minimizer: r.minimizer,
        lower_bound: r.lower_bound,
        iterations: r.iterations,
    })
}

#[derive(Clone, Debug)]
pub struct Minimality {
    pub minimal: bool,
    /// `‖Z‖ − L(Z)`.
    pub gap: f64,
    pub seminorm: f64,
}

/// `Z` is ℬ-minimal when its distance to ℬ equals its norm.
pub fn minimality_check(z: &Element, s: &Subalgebra, tol: f64) -> Result<Minimality> {
    let r = quotient_seminorm(z, s, DEFAULT_TOL_OUTER.min(tol / 10.0))?;
    let gap = z.norm() - r.radius;
    Ok(Minimality { minimal: gap.abs() <= tol, gap, seminorm: r.radius })
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Precondition(format!("tolerance must be positive and finite, got {tol}")));
    }
    Ok(())
}

pub(crate) fn is_effectively_hermitian(a: &Element) -> bool {
    a.hermitian_defect() <= HERMITIAN_SWITCH * (1.0 + a.norm())
}

/// Target, search basis and projection space of the Hermitian problem that
/// computes the distance from `a` to `s`.
pub(crate) struct Reduction<'s> {
    pub target: Element,
    pub basis: Vec<Element>,
    /// Subalgebra whose complement carries dual functionals.
    pub space: &'s Subalgebra,
    pub dilated: bool,
}

impl<'s> Reduction<'s> {
    pub fn new(a: &Element, s: &'s Subalgebra) -> Self {
        if is_effectively_hermitian(a) {
            Reduction { target: a.hermitian_part(), basis: s.basis().to_vec(), space: s, dilated: false }
        } else {
            let d = s.dilated();
            // Per basis element of ℬ the dilated basis lists two diagonal corners,
            // then the two off-diagonal directions.
            let basis = d.basis().iter().enumerate().filter(|(k, _)| k % 4 >= 2).map(|(_, b)| b.clone()).collect();
            Reduction { target: a.dilation(), basis, space: d, dilated: true }
        }
    }

    pub fn combine(&self, coeffs: &[f64]) -> Element {
        let mut out = self.target.algebra().zero();
        for (c, b) in coeffs.iter().zip(&self.basis) {
            if *c != 0.0 {
                out = &out + &b.scale_real(*c);
            }
        }
        out
    }

    pub fn coordinates(&self, x: &Element) -> Vec<f64> {
        self.basis.iter().map(|b| b.hs_inner(x).re).collect()
    }

    /// The element of ℬ corresponding to a point of the search space.
    pub fn lift(&self, d: &Element) -> Element {
        if self.dilated {
            d.corner(1, 0)
        } else {
            d.clone()
        }
    }

    /// Certified lower bound from a Hermitian dual tuple `w`: the unconstrained
    /// bound `|ψ'(A)|/‖ψ'‖` with `ψ' = ψ − P(ψ)`, and with a norm cap `s` also
    /// `(ψ(A) − s‖P(ψ)‖)/‖ψ‖`.
    pub fn lower_bound(&self, w: &[CMatrix], cap: Option<f64>) -> (f64, Option<HermitianFunctional>) {
        let w_el = match Element::new(w.iter().map(|m| (m + m.adjoint()).scale(0.5)).collect()) {
            Ok(x) => x,
            Err(_) => return (0.0, None),
        };
        let pw = self.space.project(&w_el).hermitian_part();
        let perp = &w_el - &pw;
        let mut best = 0.0;
        let mut dual = None;
        let perp_norm = herm_trace_norm(&perp);
        if perp_norm > 0.0 {
            let lb = perp.hs_inner(&self.target).re.abs() / perp_norm;
            if lb.is_finite() && lb > best {
                best = lb;
                let sign = if perp.hs_inner(&self.target).re >= 0.0 { 1.0 } else { -1.0 };
                dual = HermitianFunctional::with_tol(perp.scale_real(sign / perp_norm).into_blocks(), 1e-6).ok();
            }
        }
        if let Some(s) = cap {
            let full = herm_trace_norm(&w_el);
            if full > 0.0 {
                let lb = (w_el.hs_inner(&self.target).re - s * herm_trace_norm(&pw)) / full;
                if lb.is_finite() && lb > best {
                    best = lb;
                }
            }
        }
        (best, dual)
    }
}

fn herm_trace_norm(x: &Element) -> f64 {
    x.blocks().iter().map(|b| linalg::eigvalsh(b).iter().map(|l| l.abs()).sum::<f64>()).sum()
}

/// Relative eigenvalue cuts tried when polishing a dual.
const POLISH_CUTS: [f64; 3] = [1e-4, 1e-6, 1e-8];

/// `P₊WP₊ + P₋WP₋` blockwise, with `P±` the spectral projections of `Z` for
/// eigenvalues within `rel·‖Z‖` of `±‖Z‖`. Late along the central path the
/// dual carries small mass off these spaces, which costs more in the bound
/// than the compression loses in orthogonality to ℬ.
///
/// The compressed dual is then made orthogonal to `space` again by removing a
/// least-squares combination of the compressed basis, which keeps it on the
/// extremal spaces.
fn compress_to_extremal(z: &Element, w: &[CMatrix], rel: f64, space: &Subalgebra) -> Vec<CMatrix> {
    let norm = z.herm_norm();
    let cut = norm * (1.0 - rel);
    let projections: Vec<(CMatrix, CMatrix)> = z
        .blocks()
        .iter()
        .map(|zb| {
            let e = linalg::eigh(zb);
            let n = zb.nrows();
            let projection = |keep: &dyn Fn(f64) -> bool| {
                let mut p = CMatrix::zeros(n, n);
                for k in (0..n).filter(|&k| keep(e.values[k])) {
                    let v = e.vectors.column(k);
                    p += v * v.adjoint();
                }
                p
            };
            (projection(&|l| l >= cut), projection(&|l| l <= -cut))
        })
        .collect();
    let compress = |x: &[CMatrix]| -> Vec<CMatrix> {
        x.iter().zip(&projections).map(|(m, (p, q))| p * m * p + q * m * q).collect()
    };
    let mut out = compress(w);
    let basis = space.basis();
    let compressed: Vec<Vec<CMatrix>> = basis.iter().map(|b| compress(b.blocks())).collect();
    let pairing = |x: &[CMatrix], y: &[CMatrix]| -> f64 { x.iter().zip(y).map(|(a, b)| linalg::trace(&(a * b)).re).sum() };
    let k = basis.len();
    let gram = nalgebra::DMatrix::from_fn(k, k, |i, j| pairing(&compressed[j], basis[i].blocks()));
    let rhs = nalgebra::DVector::from_fn(k, |i, _| pairing(&out, basis[i].blocks()));
    let eps = 1e-12 * (1.0 + gram.norm());
    if let Ok(pinv) = gram.pseudo_inverse(eps) {
        let coeffs = pinv * rhs;
        for (c, cb) in coeffs.iter().zip(&compressed) {
            for (o, m) in out.iter_mut().zip(cb) {
                *o -= m * Complex64::new(*c, 0.0);
            }
        }
    }
    out
}

fn solve_interior(a: &Element, s: &Subalgebra, cap: Option<f64>, opts: &SolverOptions) -> Result<ApproxResult> {
    let red = Reduction::new(a, s);
    let target_norm = red.target.herm_norm();
    let p0 = red.combine(&red.coordinates(&red.target));
    let d0 = (&red.target - &p0).herm_norm();

    // Already (numerically) inside ℬ, or nothing to approximate.
    if d0 <= 1e-14 * (1.0 + target_norm) {
        let minimizer = red.lift(&p0);
        let radius = (a - &minimizer).norm();
        return Ok(ApproxResult {
            radius,
            minimizer,
            lower_bound: 0.0,
            iterations: 0,
            residual: radius,
            method: Method::InteriorPoint,
            dual: None,
            certificate: None,
        });
    }

    let scale = d0;
    let target_scaled: Vec<CMatrix> =
        red.target.blocks().iter().map(|m| m / Complex64::new(scale, 0.0)).collect();
    let basis_blocks: Vec<&[CMatrix]> = red.basis.iter().map(|b| b.blocks()).collect();
    let cap_scaled = cap.map(|c| c / scale);
    let mut start: Vec<f64> = red.coordinates(&p0).iter().map(|c| c / scale).collect();
    if let Some(c) = cap_scaled {
        let b0 = red.combine(&start).herm_norm();
        if b0 >= 0.9 * c {
            let theta = if b0 > 0.0 { 0.9 * c / b0 } else { 0.0 };
            start.iter_mut().for_each(|x| *x *= theta);
        }
    }
    let problem = barrier::Problem { target: &target_scaled, basis: basis_blocks, norm_cap: cap_scaled };
    let settings = barrier::Settings {
        max_newton: opts.max_newton,
        gap_tol: (opts.tol_outer / scale / 20.0).clamp(1e-13, 1e-6),
        ..Default::default()
    };
    // The bracket is evaluated after every centering and the best ends are kept:
    // deep along the path the constraint matrices become nearly singular and the
    // dual loses accuracy, so the last iterate is not always the best one.
    let mut best_upper: Option<(f64, Element)> = None;
    let mut best_lower: (f64, Option<HermitianFunctional>) = (0.0, None);
    let mut accept = |it: &barrier::Iterate| -> bool {
        let coeffs: Vec<f64> = it.coeffs.iter().map(|c| c * scale).collect();
        let minimizer = red.lift(&red.combine(&coeffs));
        let upper = (a - &minimizer).norm();
        if best_upper.as_ref().is_none_or(|(u, _)| upper < *u) {
            best_upper = Some((upper, minimizer));
        }
        let w: Vec<CMatrix> = it.dual_plus.iter().zip(&it.dual_minus).map(|(p, m)| p - m).collect();
        let (mut lower, dual) = red.lower_bound(&w, cap);
        if lower > best_lower.0 {
            best_lower = (lower, dual);
        }
        if best_upper.as_ref().is_some_and(|(u, _)| u - best_lower.0 > opts.tol_outer) {
            let z = &red.target - &red.combine(&coeffs);
            for rel in POLISH_CUTS {
                let (polished, dual) = red.lower_bound(&compress_to_extremal(&z, &w, rel, red.space), cap);
                lower = lower.max(polished);
                if polished > best_lower.0 {
                    best_lower = (polished, dual);
                }
            }
        }
        log::trace!(
            "centered: t = {}, gap bound = {:e}, bracket [{lower}, {upper}], {} Newton steps",
            it.t * scale,
            it.gap_bound * scale,
            it.newton_steps
        );
        // Stopping on the bracket alone leaves the minimizer coarse when the
        // polished dual closes it early; wait for the path to catch up.
        let path_close = it.gap_bound * scale <= opts.tol_outer;
        path_close && best_upper.as_ref().is_some_and(|(u, _)| u - best_lower.0 <= opts.tol_outer)
    };
    let outcome = barrier::solve(&problem, &start, &settings, &mut accept);
    let iterations = match &outcome {
        barrier::Outcome::Converged(it) | barrier::Outcome::Budget(it) => it.newton_steps,
    };
    let (upper, minimizer) = best_upper.unwrap_or_else(|| {
        let b = red.lift(&p0);
        ((a - &b).norm(), b)
    });
    let (lower, dual) = best_lower;
    let residual = (upper - lower).max(0.0);
    if residual > opts.tol_outer {
        log::debug!("interior point stopped with bracket [{lower}, {upper}]");
        return Err(Error::BudgetExceeded { lower, upper, iterations });
    }
    Ok(ApproxResult {
        radius: upper,
        minimizer,
        lower_bound: lower,
        iterations,
        residual,
        method: Method::InteriorPoint,
        dual: dual.map(|functional| DualCertificate { functional, dilated: red.dilated }),
        certificate: None,
    })
}
