//! Bisection on the radius with a Dykstra feasibility test.
//!
//! For a radius `r` the question "is there `B ∈ ℬ^h` with `‖A − B‖ ≤ r`" is the
//! intersection of the affine set `A + ℬ^h` with the operator-norm ball of
//! radius `r`. Dykstra's corrected alternating projections either land in both
//! sets (feasible) or stall with a positive gap (infeasible). Slow compared
//! with the interior-point method, kept as an independent cross-check.

use crate::algebra::Element;
use crate::error::{Error, Result};
use crate::linalg;
use crate::subalgebra::Subalgebra;

use super::{ApproxResult, Method, Reduction, SolverOptions};

const STALL_WINDOW: usize = 200;
const STALL_DECREASE: f64 = 1e-12;

enum Feasibility {
    Feasible(Vec<f64>),
    Infeasible,
    Budget,
}

pub(super) fn solve(a: &Element, s: &Subalgebra, cap: Option<f64>, opts: &SolverOptions) -> Result<ApproxResult> {
    let red = Reduction::new(a, s);
    let tol = opts.tol_outer;
    let start = red.coordinates(&red.target);
    let mut best = start.clone();
    if let Some(c) = cap {
        let n = red.combine(&best).herm_norm();
        if n > c {
            best.iter_mut().for_each(|x| *x *= c / n);
        }
    }
    let mut hi = (&red.target - &red.combine(&best)).herm_norm();
    let mut lo = 0.0;
    let mut sweeps_total = 0;
    while hi - lo > tol {
        let r = 0.5 * (lo + hi);
        let (verdict, sweeps) = feasible(&red, r, cap, tol, &best, opts.max_sweeps);
        sweeps_total += sweeps;
        match verdict {
            Feasibility::Feasible(c) => {
                hi = (&red.target - &red.combine(&c)).herm_norm().min(r + tol / 2.0);
                best = c;
            }
            Feasibility::Infeasible => lo = r,
            Feasibility::Budget => {
                return Err(Error::BudgetExceeded { lower: lo, upper: hi, iterations: sweeps_total });
            }
        }
    }
    let minimizer = red.lift(&red.combine(&best));
    let radius = (a - &minimizer).norm();
    Ok(ApproxResult {
        radius,
        minimizer,
        lower_bound: lo,
        iterations: sweeps_total,
        residual: (radius - lo).max(0.0),
        method: Method::BisectionDykstra,
        dual: None,
        certificate: None,
    })
}

/// Dykstra between `{A − B}`, the ball of radius `r` and (optionally) the set
/// `‖A − Y‖ ≤ cap`, iterating on `Y = A − B`.
fn feasible(
    red: &Reduction<'_>,
    r: f64,
    cap: Option<f64>,
    tol: f64,
    warm: &[f64],
    max_sweeps: usize,
) -> (Feasibility, usize) {
    let a = &red.target;
    let project_affine = |y: &Element| -> Element {
        // A + P(Y − A) over the real span of the search basis.
        let d = y - a;
        let b = red.combine(&red.coordinates(&d));
        a + &b
    };
    let clip = |y: &Element, radius: f64| y.map_blocks(|m| linalg::clip_spectrum(m, -radius, radius));
    let clip_b = |y: &Element, radius: f64| {
        // Y with ‖A − Y‖ ≤ radius.
        let b = a - y;
        a - &clip(&b, radius)
    };

    let mut y = a - &red.combine(warm);
    let zero = a.algebra().zero();
    let mut inc_ball = zero.clone();
    let mut inc_cap = zero.clone();
    let mut inc_aff = zero;
    let mut best_gap = f64::INFINITY;
    let mut window_start_gap = f64::INFINITY;
    for sweep in 1..=max_sweeps {
        let x = &y + &inc_ball;
        let yb = clip(&x, r);
        inc_ball = &x - &yb;
        let mut cur = yb;
        if let Some(c) = cap {
            let x = &cur + &inc_cap;
            let yc = clip_b(&x, c);
            inc_cap = &x - &yc;
            cur = yc;
        }
        let x = &cur + &inc_aff;
        let ya = project_affine(&x);
        inc_aff = &x - &ya;
        let gap = (&cur - &ya).herm_norm();
        y = ya;

        let coeffs = red.coordinates(&(a - &y));
        let candidate = red.combine(&coeffs);
        let within_cap = cap.is_none_or(|c| candidate.herm_norm() <= c + 1e-12);
        if within_cap && (a - &candidate).herm_norm() <= r + tol / 2.0 {
            return (Feasibility::Feasible(coeffs), sweep);
        }

        best_gap = best_gap.min(gap);
        if sweep % STALL_WINDOW == 0 {
            if window_start_gap - best_gap < STALL_DECREASE && best_gap > 0.5 * tol {
                return (Feasibility::Infeasible, sweep);
            }
            window_start_gap = best_gap;
        }
    }
    (Feasibility::Budget, max_sweeps)
}
