//! Dense complex matrix kernels shared by every other module.
//!
//! Everything spectral goes through [`eigh`] (Hermitian eigendecomposition)
//! or through nalgebra's SVD for general blocks. Both are deterministic for a
//! fixed input.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Build a complex matrix from a real row-major slice.
pub fn from_real_rows(n: usize, rows: &[f64]) -> CMatrix {
    assert_eq!(rows.len(), n * n, "expected {} entries", n * n);
    CMatrix::from_fn(n, n, |i, j| c64(rows[i * n + j], 0.0))
}

pub fn diag_real(values: &[f64]) -> CMatrix {
    let n = values.len();
    CMatrix::from_fn(n, n, |i, j| if i == j { c64(values[i], 0.0) } else { ZERO })
}

/// Matrix unit `E_pq` of size `n`.
pub fn matrix_unit(n: usize, p: usize, q: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    m[(p, q)] = ONE;
    m
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().copied().sum()
}

/// `tr(a b)` without forming the product.
pub fn trace_of_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    debug_assert_eq!(a.ncols(), b.nrows());
    debug_assert_eq!(a.nrows(), b.ncols());
    let mut acc = ZERO;
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Hilbert–Schmidt inner product `tr(a* b)`, conjugate-linear in `a`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Hermitian eigendecomposition with eigenvalues sorted ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Eigenvectors stored as columns, in the order of `values`.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn vector(&self, k: usize) -> CVector {
        self.vectors.column(k).into_owned()
    }

    /// Rebuild `V f(Λ) V*`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            for i in 0..n {
                scaled[(i, k)] *= w;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

/// Eigendecomposition of the Hermitian part of `m`.
pub fn eigh(m: &CMatrix) -> HermitianEigen {
    let n = m.nrows();
    if n == 0 {
        return HermitianEigen { values: vec![], vectors: CMatrix::zeros(0, 0) };
    }
    if n == 1 {
        return HermitianEigen { values: vec![m[(0, 0)].re], vectors: identity(1) };
    }
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    HermitianEigen { values, vectors }
}

pub fn eigvalsh(m: &CMatrix) -> Vec<f64> {
    eigh(m).values
}

/// Largest singular value.
pub fn op_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

/// Operator norm of a matrix known to be Hermitian.
pub fn herm_op_norm(m: &CMatrix) -> f64 {
    let v = eigvalsh(m);
    v.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Sum of singular values.
pub fn trace_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().iter().sum()
}

/// `‖m − m*‖` in operator norm.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let skew = m - m.adjoint();
    // i·skew is Hermitian, so its operator norm is a spectral radius.
    herm_op_norm(&skew.map(|z| z * I))
}

/// Hermiticity test `‖W − W*‖ ≤ tol·(1 + ‖W‖)`.
pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && hermitian_defect(m) <= tol * (1.0 + op_norm(m))
}

/// Cholesky factor `L` (lower triangular, `M = L L*`) of a Hermitian matrix,
/// or `None` unless every pivot is strictly positive. Only the lower triangle
/// of `m` is read.
pub fn hermitian_cholesky(m: &CMatrix) -> Option<CMatrix> {
    let n = m.nrows();
    let mut l = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0) {
            return None;
        }
        let djj = d.sqrt();
        l[(j, j)] = Complex64::new(djj, 0.0);
        for i in (j + 1)..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Some(l)
}

/// `log det M` from a Cholesky factor.
pub fn cholesky_logdet(l: &CMatrix) -> f64 {
    (0..l.nrows()).map(|i| 2.0 * l[(i, i)].re.ln()).sum()
}

/// `M⁻¹ = L⁻* L⁻¹` from a Cholesky factor.
pub fn cholesky_inverse(l: &CMatrix) -> CMatrix {
    let n = l.nrows();
    // Forward substitution for L⁻¹, column by column.
    let mut inv_l = CMatrix::zeros(n, n);
    for c in 0..n {
        for i in c..n {
            let mut s = if i == c { ONE } else { ZERO };
            for k in c..i {
                s -= l[(i, k)] * inv_l[(k, c)];
            }
            inv_l[(i, c)] = s / l[(i, i)];
        }
    }
    inv_l.adjoint() * inv_l
}

/// Clip the spectrum of a Hermitian matrix into `[lo, hi]`.
pub fn clip_spectrum(m: &CMatrix, lo: f64, hi: f64) -> CMatrix {
    eigh(m).reconstruct_with(|x| x.clamp(lo, hi))
}

/// Orthonormal basis (as columns) of the span of the columns of `vectors`,
/// dropping directions whose singular value is below `rel_tol · σ_max`.
pub fn column_space(vectors: &CMatrix, rel_tol: f64) -> CMatrix {
    let rows = vectors.nrows();
    if vectors.ncols() == 0 || rows == 0 {
        return CMatrix::zeros(rows, 0);
    }
    let svd = vectors.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return CMatrix::zeros(rows, 0);
    }
    let keep: Vec<usize> =
        (0..svd.singular_values.len()).filter(|&k| svd.singular_values[k] > rel_tol * smax).collect();
    CMatrix::from_fn(rows, keep.len(), |i, j| u[(i, keep[j])])
}

/// Block-diagonal direct sum of square matrices.
pub fn direct_sum(blocks: &[CMatrix]) -> CMatrix {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMatrix::zeros(n, n);
    let mut offset = 0;
    for b in blocks {
        let k = b.nrows();
        out.view_mut((offset, offset), (k, k)).copy_from(b);
        offset += k;
    }
    out
}

pub fn max_abs_entry(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigh_sorts_and_reconstructs() {
        let m = from_real_rows(2, &[4.0, -3.0, -3.0, -4.0]);
        let e = eigh(&m);
        assert!((e.values[0] + 5.0).abs() < 1e-12);
        assert!((e.values[1] - 5.0).abs() < 1e-12);
        let back = e.reconstruct_with(|x| x);
        assert!(max_abs_entry(&(back - m)) < 1e-12);
    }

    #[test]
    fn complex_hermitian_spectrum() {
        // [[1, -i],[i, 1]] has eigenvalues 0 and 2.
        let m = CMatrix::from_row_slice(2, 2, &[ONE, -I, I, ONE]);
        let v = eigvalsh(&m);
        assert!(v[0].abs() < 1e-12 && (v[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn norms_of_nilpotent() {
        let m = from_real_rows(2, &[0.0, 2.0, 0.0, 0.0]);
        assert!((op_norm(&m) - 2.0).abs() < 1e-12);
        assert!((trace_norm(&m) - 2.0).abs() < 1e-12);
        assert!(!is_hermitian(&m, 1e-9));
        assert!((hermitian_defect(&m) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn trace_of_product_matches_product() {
        let a = CMatrix::from_fn(3, 3, |i, j| c64(i as f64 + 0.5, j as f64 - 1.0));
        let b = CMatrix::from_fn(3, 3, |i, j| c64((i * j) as f64, 1.0));
        let direct = trace(&(&a * &b));
        assert!((trace_of_product(&a, &b) - direct).norm() < 1e-12);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let m = CMatrix::from_row_slice(2, 2, &[ONE, I, -I, ONE * 3.0]);
        let l = hermitian_cholesky(&m).unwrap();
        assert!(max_abs_entry(&(&l * l.adjoint() - &m)) < 1e-14);
        assert!(max_abs_entry(&(cholesky_inverse(&l) * &m - identity(2))) < 1e-14);
        assert!((cholesky_logdet(&l) - 2f64.ln()).abs() < 1e-14);
        assert!(hermitian_cholesky(&diag_real(&[1.0, -1e-3])).is_none());
    }

    #[test]
    fn column_space_drops_dependent_columns() {
        let v = CMatrix::from_row_slice(2, 3, &[ONE, ONE, ZERO, ZERO, ZERO, ZERO]);
        let q = column_space(&v, 1e-12);
        assert_eq!(q.ncols(), 1);
    }
}
