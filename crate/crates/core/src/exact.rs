//! Exact rational re-verification of witness conditions.
//!
//! When the element, the witness density and a spanning set of `ℬ^h` all have
//! entries that are (to within `1e-12`) rationals of moderate denominator, the
//! conditions `φ(Z²) = ‖Z‖²` and `φ(ZB + BZ) = 0` can be checked with zero
//! residual. `‖Z‖²` itself is certified by an exact positive-semidefiniteness
//! test of `s·1 − Z_j²` for the rationalized value `s`, since then
//! `φ(Z²) = s` forces `λ_max(Z²) = s`.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::algebra::{Element, StateDensity};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

pub type Rational = BigRational;
pub type ComplexRational = Complex<BigRational>;

/// Largest denominator tried by [`rationalize`].
pub const MAX_DENOMINATOR: i64 = 1_000_000;
/// Largest accepted rounding error when recognizing a float as a rational.
pub const RATIONAL_TOL: f64 = 1e-12;

/// Best rational approximation with denominator at most `max_den`, accepted
/// only if it is within `RATIONAL_TOL` of `x`.
pub fn rationalize(x: f64, max_den: i64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let sign = if x < 0.0 { -1 } else { 1 };
    let target = x.abs();
    // Continued-fraction convergents h/k.
    let (mut h_prev, mut h) = (0i128, 1i128);
    let (mut k_prev, mut k) = (1i128, 0i128);
    let mut rest = target;
    let mut best: Option<(i128, i128)> = None;
    for _ in 0..64 {
        let a = rest.floor();
        if a > 1e15 {
            break;
        }
        let a_int = a as i128;
        let h_next = a_int * h + h_prev;
        let k_next = a_int * k + k_prev;
        if k_next > max_den as i128 {
            break;
        }
        h_prev = h;
        h = h_next;
        k_prev = k;
        k = k_next;
        best = Some((h, k));
        let frac = rest - a;
        if (h as f64 / k as f64 - target).abs() <= RATIONAL_TOL * target.max(1.0) || frac < 1e-300 {
            break;
        }
        rest = 1.0 / frac;
    }
    let (num, den) = best?;
    if (num as f64 / den as f64 - target).abs() > RATIONAL_TOL * target.max(1.0) {
        return None;
    }
    Some(Rational::new(BigInt::from(sign * num), BigInt::from(den)))
}

fn rationalize_complex(z: num_complex::Complex64) -> Option<ComplexRational> {
    Some(Complex::new(rationalize(z.re, MAX_DENOMINATOR)?, rationalize(z.im, MAX_DENOMINATOR)?))
}

type RMatrix = Vec<Vec<ComplexRational>>;

fn rationalize_matrix(m: &CMatrix) -> Option<RMatrix> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| rationalize_complex(m[(i, j)])).collect()).collect()
}

fn rationalize_blocks(blocks: &[CMatrix], what: &str) -> Result<Vec<RMatrix>> {
    blocks
        .iter()
        .map(rationalize_matrix)
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::Unsupported(format!("{what} has entries that are not recognizably rational")))
}

fn czero() -> ComplexRational {
    Complex::new(Rational::zero(), Rational::zero())
}

fn mat_mul(a: &RMatrix, b: &RMatrix) -> RMatrix {
    let n = a.len();
    let m = b[0].len();
    let inner = b.len();
    let mut out = vec![vec![czero(); m]; n];
    for i in 0..n {
        for k in 0..inner {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..m {
                out[i][j] = &out[i][j] + &a[i][k] * &b[k][j];
            }
        }
    }
    out
}

fn mat_add(a: &RMatrix, b: &RMatrix) -> RMatrix {
    a.iter().zip(b).map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect()).collect()
}

fn trace_of_product(a: &RMatrix, b: &RMatrix) -> ComplexRational {
    let mut acc = czero();
    for i in 0..a.len() {
        for k in 0..a[i].len() {
            acc = &acc + &a[i][k] * &b[k][i];
        }
    }
    acc
}

/// Exact positive-semidefiniteness of a Hermitian rational matrix by symmetric
/// Gaussian elimination: a zero pivot must have a zero column below it.
pub fn is_psd_exact(m: &[Vec<ComplexRational>]) -> bool {
    let n = m.len();
    let mut a: RMatrix = m.to_vec();
    for k in 0..n {
        if !a[k][k].im.is_zero() {
            return false;
        }
        let pivot = a[k][k].re.clone();
        if pivot.is_negative() {
            return false;
        }
        if pivot.is_zero() {
            if (k + 1..n).any(|i| !a[i][k].is_zero()) {
                return false;
            }
            continue;
        }
        let pivot_c = Complex::new(pivot, Rational::zero());
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let factor = &a[i][k] / &pivot_c;
            for j in k + 1..n {
                let sub = &factor * &a[k][j];
                a[i][j] = &a[i][j] - sub;
            }
        }
    }
    true
}

#[derive(Clone, Debug)]
pub struct ExactWitnessCheck {
    /// Rationalized `‖Z‖²`.
    pub norm_squared: Rational,
    /// `s·1 − Z_j² ⪰ 0` in every block, exactly.
    pub norm_bound_certified: bool,
    /// `φ(Z²) − s`.
    pub attainment: ComplexRational,
    /// `φ(ZB + BZ)` for each supplied basis element.
    pub orthogonality: Vec<ComplexRational>,
}

impl ExactWitnessCheck {
    /// All residuals vanish identically.
    pub fn is_exact(&self) -> bool {
        self.norm_bound_certified && self.attainment.is_zero() && self.orthogonality.iter().all(|r| r.is_zero())
    }

    /// Largest residual magnitude, as a float.
    pub fn max_residual(&self) -> f64 {
        let mag = |c: &ComplexRational| c.re.abs().to_f64().unwrap_or(f64::INFINITY) + c.im.abs().to_f64().unwrap_or(f64::INFINITY);
        self.orthogonality.iter().map(mag).fold(mag(&self.attainment), f64::max)
    }
}

/// Re-check a witness in exact arithmetic. `basis` must span `ℬ^h` and have
/// rational entries (normalization is irrelevant for the vanishing conditions).
pub fn verify_witness_exact(z: &Element, phi: &StateDensity, basis: &[Element]) -> Result<ExactWitnessCheck> {
    if phi.dims() != z.dims() || basis.iter().any(|b| b.dims() != z.dims()) {
        return Err(Error::Structural("element, state and basis live on different algebras".into()));
    }
    let zq = rationalize_blocks(z.blocks(), "Z")?;
    let rho = rationalize_blocks(phi.blocks(), "the witness density")?;
    let norm = z.herm_norm();
    let s = rationalize(norm * norm, MAX_DENOMINATOR)
        .ok_or_else(|| Error::Unsupported("‖Z‖² is not recognizably rational".into()))?;

    let z2: Vec<RMatrix> = zq.iter().map(|b| mat_mul(b, b)).collect();
    let mut norm_bound_certified = true;
    for b in &z2 {
        let shifted: RMatrix = b
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, x)| {
                        let d = if i == j { Complex::new(s.clone(), Rational::zero()) } else { czero() };
                        d - x
                    })
                    .collect()
            })
            .collect();
        norm_bound_certified &= is_psd_exact(&shifted);
    }

    let eval = |x: &[RMatrix]| -> ComplexRational {
        rho.iter().zip(x).fold(czero(), |acc, (r, m)| acc + trace_of_product(r, m))
    };
    let attainment = eval(&z2) - Complex::new(s.clone(), Rational::zero());
    let mut orthogonality = Vec::with_capacity(basis.len());
    for b in basis {
        let bq = rationalize_blocks(b.blocks(), "a basis element")?;
        let anti: Vec<RMatrix> =
            zq.iter().zip(&bq).map(|(zj, bj)| mat_add(&mat_mul(zj, bj), &mat_mul(bj, zj))).collect();
        orthogonality.push(eval(&anti));
    }
    Ok(ExactWitnessCheck { norm_squared: s, norm_bound_certified, attainment, orthogonality })
}
