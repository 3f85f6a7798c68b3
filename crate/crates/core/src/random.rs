//! Seeded random draws for property checks.
//!
//! Every trial gets its own ChaCha stream `(seed, index)`, so a trial can be
//! replayed without re-running the ones before it.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::algebra::{BlockAlgebra, Element, HermitianFunctional, StateDensity};
use crate::linalg::{self, CMatrix};

pub type TrialRng = ChaCha8Rng;

/// Generator for trial `index` under `seed`.
pub fn trial_rng(seed: u64, index: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Standard complex Gaussian: real and imaginary parts `N(0, ½)`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(s * re, s * im)
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    // Row-major fill keeps draws independent of nalgebra's storage order.
    let entries: Vec<Complex64> = (0..n * n).map(|_| complex_gaussian(rng)).collect();
    CMatrix::from_row_slice(n, n, &entries)
}

fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

pub fn element<R: Rng + ?Sized>(rng: &mut R, algebra: &BlockAlgebra) -> Element {
    Element::new(algebra.block_dims().iter().map(|&n| gaussian_matrix(rng, n)).collect()).expect("conforming blocks")
}

pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, algebra: &BlockAlgebra) -> Element {
    element(rng, algebra).map_blocks(hermitize)
}

/// Random element whose singular values are pushed up to at least `min_sv`.
pub fn invertible<R: Rng + ?Sized>(rng: &mut R, algebra: &BlockAlgebra, hermitian_draw: bool, min_sv: f64) -> Element {
    let x = if hermitian_draw { hermitian(rng, algebra) } else { element(rng, algebra) };
    x.map_blocks(|m| {
        if hermitian_draw {
            // Keep the element Hermitian: push eigenvalues away from 0, keeping signs.
            linalg::eigh(m).reconstruct_with(|l| if l.abs() >= min_sv { l } else if l < 0.0 { -min_sv } else { min_sv })
        } else {
            let svd = m.clone().svd(true, true);
            let u = svd.u.expect("left singular vectors");
            let v_t = svd.v_t.expect("right singular vectors");
            let s = DMatrix::from_diagonal(&svd.singular_values.map(|x| Complex64::new(x.max(min_sv), 0.0)));
            u * s * v_t
        }
    })
}

/// Random state with density blocks `G G*` (Gaussian `G`), normalized.
pub fn state<R: Rng + ?Sized>(rng: &mut R, algebra: &BlockAlgebra) -> StateDensity {
    let blocks: Vec<CMatrix> = algebra
        .block_dims()
        .iter()
        .map(|&n| {
            let g = gaussian_matrix(rng, n);
            &g * g.adjoint()
        })
        .collect();
    let total: f64 = blocks.iter().map(|b| linalg::trace(b).re).sum();
    StateDensity::new(blocks.iter().map(|b| b / Complex64::new(total, 0.0)).collect()).expect("positive density")
}

/// Random Hermitian functional of norm exactly one.
pub fn unit_functional<R: Rng + ?Sized>(rng: &mut R, algebra: &BlockAlgebra) -> HermitianFunctional {
    let w = hermitian(rng, algebra);
    let f = HermitianFunctional::new(w.into_blocks()).expect("Hermitian representative");
    let n = f.norm();
    f.scale(1.0 / n)
}

/// Uniform draw in `[lo, hi)`.
pub fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}
