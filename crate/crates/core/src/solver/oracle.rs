//! Brute-force grid search over subalgebra coordinates, for tiny instances only.
//!
//! Coordinates are taken against a Hermitian basis of ℬ (or a user-supplied
//! candidate basis). The box is centered at the projection `P(A)`: any best
//! approximation `B*` has `‖B* − P(A)‖ ≤ 2‖A − P(A)‖`, so coordinate `i` moves
//! at most `2‖A − P(A)‖·‖H_i‖_1`. It is also clipped to `‖B‖ ≤ 2‖A‖`. After the
//! coarse pass, each refinement pass searches a box of ±10 fine steps around
//! the incumbent at ten times the previous resolution.
//!
//! Some grid point lies within `h/2` of a minimizer in every coordinate, so the
//! returned radius exceeds the distance by at most `½·h·Σ_i ‖D_i‖` for coarse
//! step `h` and directions `D_i`; that is reported as the residual.

use crate::algebra::Element;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::subalgebra::Subalgebra;

use super::{ApproxResult, Method};

/// Largest coordinate count the oracle accepts.
pub const MAX_DIM: usize = 6;
/// Largest number of grid points evaluated in one pass.
pub const MAX_POINTS: u64 = 60_000_000;

#[derive(Clone, Debug)]
pub struct OracleOptions {
    /// Step of the coarse pass.
    pub resolution: f64,
    /// Number of refinement passes, each ten times finer.
    pub refinements: usize,
    /// Candidate directions replacing the full basis of `ℬ^h`; each must lie in ℬ
    /// and be Hermitian. Needed when symmetry pins the minimizer to a smaller face.
    pub basis: Option<Vec<Element>>,
    /// When set, the coarse step is doubled from `resolution` until the coarse
    /// grid has at most this many points.
    pub max_points: Option<u64>,
}

impl OracleOptions {
    pub fn new(resolution: f64) -> Self {
        OracleOptions { resolution, refinements: 1, basis: None, max_points: None }
    }
}

/// Grid search with one refinement pass.
pub fn oracle_grid(a: &Element, s: &Subalgebra, resolution: f64) -> Result<ApproxResult> {
    oracle_grid_with(a, s, &OracleOptions::new(resolution))
}

pub fn oracle_grid_with(a: &Element, s: &Subalgebra, opts: &OracleOptions) -> Result<ApproxResult> {
    Ok(oracle_grid_run(a, s, opts)?.result)
}

/// Oracle result together with the steps that produced it.
#[derive(Clone, Debug)]
pub struct OracleRun {
    pub result: ApproxResult,
    /// Step of the coarse pass after any coarsening to fit `max_points`.
    pub coarse_step: f64,
    /// Step of the last refinement pass.
    pub fine_step: f64,
}

pub fn oracle_grid_run(a: &Element, s: &Subalgebra, opts: &OracleOptions) -> Result<OracleRun> {
    s.algebra().check(a)?;
    if !(opts.resolution > 0.0 && opts.resolution.is_finite()) {
        return Err(Error::Precondition(format!("resolution must be positive, got {}", opts.resolution)));
    }
    let hermitian = super::is_effectively_hermitian(a);
    let directions: Vec<Element> = match &opts.basis {
        Some(custom) => {
            for b in custom {
                s.algebra().check(b)?;
                if !s.contains(b, 1e-8) || !b.is_hermitian(1e-12) {
                    return Err(Error::Precondition("oracle candidate directions must be Hermitian elements of ℬ".into()));
                }
            }
            custom.clone()
        }
        None => s.basis().to_vec(),
    };
    // Non-Hermitian targets need complex coefficients: real and imaginary parts.
    let mut dirs = directions.clone();
    if !hermitian {
        dirs.extend(directions.iter().map(|b| b.scale(linalg::I)));
    }
    let p = dirs.len();
    if p > MAX_DIM {
        return Err(Error::Unsupported(format!("grid oracle needs at most {MAX_DIM} coordinates, got {p}")));
    }

    // Least-squares coordinates of P(A) against the (possibly non-orthonormal) directions.
    let pa = s.project(a);
    let center = least_squares(&dirs, &pa);
    let spread = 2.0 * (a - &pa).norm();
    let cap = 2.0 * a.norm();
    let half: Vec<f64> = dirs
        .iter()
        .map(|b| {
            let tn = b.blocks().iter().map(linalg::trace_norm).sum::<f64>() / b.hs_norm().powi(2);
            (spread * tn).min(cap * tn)
        })
        .collect();

    let small = hermitian && a.dims().iter().all(|&n| n <= 2);
    let affine = small.then(|| SmallAffine::new(a, &dirs));
    let eval = |c: &[f64]| -> f64 {
        if let Some(f) = &affine {
            return f.norm(c);
        }
        let mut b = a.clone();
        for (ci, d) in c.iter().zip(&dirs) {
            b = &b - &d.scale_real(*ci);
        }
        fast_norm(&b, hermitian)
    };

    let mut best = center.clone();
    let mut best_val = eval(&best);
    let mut points = 1u64;
    let mut step = opts.resolution;
    let radii = |step: f64| -> Vec<usize> { half.iter().map(|h| (h / step).ceil() as usize).collect() };
    if let Some(limit) = opts.max_points {
        while grid_size(&radii(step)) > limit.min(MAX_POINTS) {
            step *= 2.0;
        }
    }
    let coarse_step = step;
    points += scan(&center, &radii(step), step, &eval, &mut best, &mut best_val)?;
    for _ in 0..opts.refinements {
        step /= 10.0;
        let around = best.clone();
        let radius = vec![10usize; p];
        points += scan(&around, &radius, step, &eval, &mut best, &mut best_val)?;
    }

    let mut minimizer = s.algebra().zero();
    for (ci, d) in best.iter().zip(&dirs) {
        minimizer = &minimizer + &d.scale_real(*ci);
    }
    let accuracy = 0.5 * coarse_step * dirs.iter().map(|d| d.norm()).sum::<f64>();
    let result = ApproxResult {
        radius: best_val,
        minimizer,
        lower_bound: (best_val - accuracy).max(0.0),
        iterations: points as usize,
        residual: accuracy,
        method: Method::OracleGrid,
        dual: None,
        certificate: None,
    };
    Ok(OracleRun { result, coarse_step, fine_step: step })
}

/// Exhaustive scan of `center ± radius_i·step` in every coordinate.
fn scan(
    center: &[f64],
    radius: &[usize],
    step: f64,
    eval: &dyn Fn(&[f64]) -> f64,
    best: &mut [f64],
    best_val: &mut f64,
) -> Result<u64> {
    let counts: Vec<u64> = radius.iter().map(|r| 2 * *r as u64 + 1).collect();
    let total = grid_size(radius);
    if total > MAX_POINTS {
        return Err(Error::Unsupported(format!("grid of {total} points exceeds the limit of {MAX_POINTS}")));
    }
    let p = center.len();
    let mut idx = vec![0u64; p];
    let mut point = vec![0.0; p];
    for _ in 0..total {
        for k in 0..p {
            point[k] = center[k] + (idx[k] as f64 - radius[k] as f64) * step;
        }
        let v = eval(&point);
        if v < *best_val {
            *best_val = v;
            best.copy_from_slice(&point);
        }
        for k in 0..p {
            idx[k] += 1;
            if idx[k] < counts[k] {
                break;
            }
            idx[k] = 0;
        }
    }
    Ok(total)
}

fn grid_size(radius: &[usize]) -> u64 {
    radius.iter().try_fold(1u64, |acc, r| acc.checked_mul(2 * *r as u64 + 1)).unwrap_or(u64::MAX)
}

fn least_squares(dirs: &[Element], x: &Element) -> Vec<f64> {
    let p = dirs.len();
    let gram = nalgebra::DMatrix::from_fn(p, p, |i, j| dirs[i].hs_inner(&dirs[j]).re);
    let rhs = nalgebra::DVector::from_fn(p, |i, _| dirs[i].hs_inner(x).re);
    match gram.clone().cholesky() {
        Some(ch) => ch.solve(&rhs).iter().copied().collect(),
        None => gram.pseudo_inverse(1e-12).map(|g| (g * rhs).iter().copied().collect()).unwrap_or(vec![0.0; p]),
    }
}

/// `A − Σ c_i D_i` for Hermitian blocks of size at most 2, stored as the
/// affine maps of the entries `(a, d, Re b, Im b)` of `[[a, b], [b̄, d]]`.
struct SmallAffine {
    base: Vec<[f64; 4]>,
    slopes: Vec<Vec<[f64; 4]>>,
    sizes: Vec<usize>,
}

impl SmallAffine {
    fn entries(m: &CMatrix) -> [f64; 4] {
        if m.nrows() == 1 {
            [m[(0, 0)].re, 0.0, 0.0, 0.0]
        } else {
            [m[(0, 0)].re, m[(1, 1)].re, m[(0, 1)].re, m[(0, 1)].im]
        }
    }

    fn new(a: &Element, dirs: &[Element]) -> Self {
        SmallAffine {
            base: a.blocks().iter().map(Self::entries).collect(),
            slopes: dirs.iter().map(|d| d.blocks().iter().map(Self::entries).collect()).collect(),
            sizes: a.dims().to_vec(),
        }
    }

    fn norm(&self, c: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (j, base) in self.base.iter().enumerate() {
            let mut e = *base;
            for (ci, slope) in c.iter().zip(&self.slopes) {
                for k in 0..4 {
                    e[k] -= ci * slope[j][k];
                }
            }
            let v = if self.sizes[j] == 1 {
                e[0].abs()
            } else {
                let mid = 0.5 * (e[0] + e[1]);
                let rad = (0.25 * (e[0] - e[1]) * (e[0] - e[1]) + e[2] * e[2] + e[3] * e[3]).sqrt();
                mid.abs() + rad
            };
            worst = worst.max(v);
        }
        worst
    }
}

/// Operator norm with a closed form for Hermitian 2×2 blocks.
fn fast_norm(x: &Element, hermitian: bool) -> f64 {
    x.blocks().iter().map(|m| block_norm(m, hermitian)).fold(0.0, f64::max)
}

fn block_norm(m: &CMatrix, hermitian: bool) -> f64 {
    if hermitian {
        match m.nrows() {
            1 => m[(0, 0)].re.abs(),
            2 => {
                let a = m[(0, 0)].re;
                let d = m[(1, 1)].re;
                let b = m[(0, 1)].norm();
                let mid = 0.5 * (a + d);
                let rad = (0.25 * (a - d) * (a - d) + b * b).sqrt();
                mid.abs() + rad
            }
            _ => linalg::herm_op_norm(m),
        }
    } else {
        linalg::op_norm(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::BlockAlgebra;
    use crate::linalg::diag_real;
    use crate::subalgebra::SubalgebraKind;

    #[test]
    fn oracle_midpoint() {
        let a = BlockAlgebra::full(2).unwrap();
        let s = Subalgebra::standard(&a, &SubalgebraKind::Scalars).unwrap();
        let x = Element::new(vec![diag_real(&[0.3, -1.1])]).unwrap();
        let r = oracle_grid(&x, &s, 1e-3).unwrap();
        assert!((r.radius - 0.7).abs() <= 1e-3);
    }

    #[test]
    fn oracle_in_subalgebra() {
        let a = BlockAlgebra::full(2).unwrap();
        let s = Subalgebra::standard(&a, &SubalgebraKind::Diagonal).unwrap();
        let x = Element::new(vec![diag_real(&[0.3, -1.1])]).unwrap();
        let r = oracle_grid(&x, &s, 1e-2).unwrap();
        assert!(r.radius <= 1e-2);
    }

    #[test]
    fn oracle_rejects_large_spaces() {
        let a = BlockAlgebra::full(3).unwrap();
        let s = Subalgebra::standard(&a, &SubalgebraKind::BlockDiagonal(vec![2, 1])).unwrap();
        let bigger = Subalgebra::standard(&BlockAlgebra::full(3).unwrap(), &SubalgebraKind::BlockDiagonal(vec![3]))
            .unwrap();
        assert_eq!(s.real_herm_dim(), 5);
        assert!(matches!(oracle_grid(&a.identity(), &bigger, 0.1), Err(Error::Unsupported(_))));
    }
}
