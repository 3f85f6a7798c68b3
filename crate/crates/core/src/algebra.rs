//! Finite-dimensional C*-algebras `M_{n_1}(ℂ) ⊕ … ⊕ M_{n_k}(ℂ)`, their elements,
//! and linear functionals given by trace pairing.
//!
//! A functional `ψ` is stored as the tuple `(W_1, …, W_k)` with
//! `ψ(C) = Σ_j tr(W_j C_j)`. Under this pairing the dual norm of the operator
//! norm is the sum of trace norms, so `‖ψ‖` is a spectral computation and the
//! Jordan decomposition of a Hermitian functional is a blockwise spectral split.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, ONE, ZERO};

/// Default absolute tolerance for Hermiticity and state checks.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockAlgebra {
    block_dims: Vec<usize>,
}

impl BlockAlgebra {
    pub fn new(block_dims: Vec<usize>) -> Result<Self> {
        if block_dims.is_empty() {
            return Err(Error::Structural("an algebra needs at least one block".into()));
        }
        if block_dims.contains(&0) {
            return Err(Error::Structural(format!("block sizes must be positive, got {block_dims:?}")));
        }
        Ok(BlockAlgebra { block_dims })
    }

    /// The full matrix algebra `M_n(ℂ)`.
    pub fn full(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    /// `(M_n(ℂ))^m`, the algebra of `m`-tuples of `n × n` matrices.
    pub fn tuples(n: usize, m: usize) -> Result<Self> {
        Self::new(vec![n; m])
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    pub fn num_blocks(&self) -> usize {
        self.block_dims.len()
    }

    /// Complex dimension `Σ n_j²`.
    pub fn dimension(&self) -> usize {
        self.block_dims.iter().map(|n| n * n).sum()
    }

    /// Dimension `Σ n_j` of the defining representation.
    pub fn hilbert_dim(&self) -> usize {
        self.block_dims.iter().sum()
    }

    /// Same number of blocks, each of twice the size. Home of `M_2(A)`.
    pub fn doubled(&self) -> BlockAlgebra {
        BlockAlgebra { block_dims: self.block_dims.iter().map(|n| 2 * n).collect() }
    }

    pub fn zero(&self) -> Element {
        Element { blocks: self.block_dims.iter().map(|&n| CMatrix::zeros(n, n)).collect() }
    }

    pub fn identity(&self) -> Element {
        Element { blocks: self.block_dims.iter().map(|&n| linalg::identity(n)).collect() }
    }

    /// Element that is `m` in block `j` and zero elsewhere.
    pub fn embed(&self, j: usize, m: CMatrix) -> Result<Element> {
        let mut x = self.zero();
        let n = *self
            .block_dims
            .get(j)
            .ok_or_else(|| Error::Structural(format!("block index {j} out of range")))?;
        if m.shape() != (n, n) {
            return Err(Error::Structural(format!("block {j} expects {n}x{n}, got {:?}", m.shape())));
        }
        x.blocks[j] = m;
        Ok(x)
    }

    /// All matrix units `E^{(j)}_{pq}` in block-major, row-major order.
    pub fn matrix_units(&self) -> Vec<Element> {
        let mut out = Vec::with_capacity(self.dimension());
        for (j, &n) in self.block_dims.iter().enumerate() {
            for p in 0..n {
                for q in 0..n {
                    let mut x = self.zero();
                    x.blocks[j][(p, q)] = ONE;
                    out.push(x);
                }
            }
        }
        out
    }

    /// Element from blocks, checking conformance with this algebra.
    pub fn element(&self, blocks: Vec<CMatrix>) -> Result<Element> {
        let x = Element::new(blocks)?;
        self.check(&x)?;
        Ok(x)
    }

    /// Structural conformance of an element with this algebra.
    pub fn check(&self, x: &Element) -> Result<()> {
        if x.dims() != self.block_dims {
            return Err(Error::Structural(format!(
                "element has block sizes {:?}, algebra has {:?}",
                x.dims(),
                self.block_dims
            )));
        }
        Ok(())
    }
}

impl fmt::Display for BlockAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.block_dims.iter().map(|n| format!("M{n}")).collect();
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

/// A tuple of square complex matrices, one per block.
#[derive(Clone, Debug, PartialEq)]
pub struct Element {
    blocks: Vec<CMatrix>,
}

impl Element {
    pub fn new(blocks: Vec<CMatrix>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::Structural("an element needs at least one block".into()));
        }
        for (j, b) in blocks.iter().enumerate() {
            if !b.is_square() || b.nrows() == 0 {
                return Err(Error::Structural(format!("block {j} is {:?}, not a nonempty square", b.shape())));
            }
        }
        Ok(Element { blocks })
    }

    /// Element of `M_n(ℂ)` from real row-major entries.
    pub fn from_real(n: usize, rows: &[f64]) -> Result<Self> {
        if rows.len() != n * n {
            return Err(Error::Structural(format!("expected {} entries, got {}", n * n, rows.len())));
        }
        Element::new(vec![linalg::from_real_rows(n, rows)])
    }

    /// Tuple element from real row-major blocks (all of size `n`).
    pub fn tuple_from_real(n: usize, blocks: &[&[f64]]) -> Result<Self> {
        let mut out = Vec::with_capacity(blocks.len());
        for rows in blocks {
            if rows.len() != n * n {
                return Err(Error::Structural(format!("expected {} entries, got {}", n * n, rows.len())));
            }
            out.push(linalg::from_real_rows(n, rows));
        }
        Element::new(out)
    }

    pub fn dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.nrows()).collect()
    }

    pub fn algebra(&self) -> BlockAlgebra {
        BlockAlgebra { block_dims: self.dims() }
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn block(&self, j: usize) -> &CMatrix {
        &self.blocks[j]
    }

    pub fn into_blocks(self) -> Vec<CMatrix> {
        self.blocks
    }

    pub fn same_shape(&self, other: &Element) -> bool {
        self.blocks.len() == other.blocks.len()
            && self.blocks.iter().zip(&other.blocks).all(|(a, b)| a.shape() == b.shape())
    }

    pub fn expect_same_shape(&self, other: &Element) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::Structural(format!("block sizes {:?} vs {:?}", self.dims(), other.dims())))
        }
    }

    pub fn map_blocks(&self, f: impl Fn(&CMatrix) -> CMatrix) -> Element {
        Element { blocks: self.blocks.iter().map(f).collect() }
    }

    pub fn zip_blocks(&self, other: &Element, f: impl Fn(&CMatrix, &CMatrix) -> CMatrix) -> Element {
        assert!(self.same_shape(other), "block sizes {:?} vs {:?}", self.dims(), other.dims());
        Element { blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect() }
    }

    pub fn adjoint(&self) -> Element {
        self.map_blocks(|b| b.adjoint())
    }

    pub fn scale(&self, s: Complex64) -> Element {
        self.map_blocks(|b| b * s)
    }

    pub fn scale_real(&self, s: f64) -> Element {
        self.map_blocks(|b| b * Complex64::new(s, 0.0))
    }

    /// C*-norm: the largest singular value over all blocks.
    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(linalg::op_norm).fold(0.0, f64::max)
    }

    /// Norm of an element known to be Hermitian (largest |eigenvalue|).
    pub fn herm_norm(&self) -> f64 {
        self.blocks.iter().map(linalg::herm_op_norm).fold(0.0, f64::max)
    }

    /// `Σ_j tr(X_j* Y_j)`.
    pub fn hs_inner(&self, other: &Element) -> Complex64 {
        assert!(self.same_shape(other));
        self.blocks.iter().zip(&other.blocks).map(|(a, b)| linalg::hs_inner(a, b)).sum()
    }

    pub fn hs_norm(&self) -> f64 {
        self.blocks.iter().map(|b| b.norm_squared()).sum::<f64>().sqrt()
    }

    /// `Σ_j tr(X_j)`.
    pub fn trace(&self) -> Complex64 {
        self.blocks.iter().map(linalg::trace).sum()
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.blocks.iter().map(linalg::hermitian_defect).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol * (1.0 + self.norm())
    }

    /// `(X + X*)/2`.
    pub fn hermitian_part(&self) -> Element {
        self.map_blocks(|b| (b + b.adjoint()).scale(0.5))
    }

    /// `(X − X*)/(2i)`, so that `X = re + i·im` with both parts Hermitian.
    pub fn imaginary_part(&self) -> Element {
        self.map_blocks(|b| (b - b.adjoint()) * Complex64::new(0.0, -0.5))
    }

    pub fn commutator(&self, other: &Element) -> Element {
        self.zip_blocks(other, linalg::commutator)
    }

    pub fn try_inverse(&self) -> Option<Element> {
        let mut out = Vec::with_capacity(self.blocks.len());
        for b in &self.blocks {
            out.push(b.clone().try_inverse()?);
        }
        Some(Element { blocks: out })
    }

    /// Smallest singular value over all blocks.
    pub fn min_singular_value(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.clone().singular_values().iter().copied().fold(f64::INFINITY, f64::min))
            .fold(f64::INFINITY, f64::min)
    }

    /// Hermitian dilation `[[0, X*], [X, 0]]` in the doubled algebra.
    /// The result is Hermitian with the same norm as `self`.
    pub fn dilation(&self) -> Element {
        self.map_blocks(|x| {
            let n = x.nrows();
            let mut d = CMatrix::zeros(2 * n, 2 * n);
            d.view_mut((0, n), (n, n)).copy_from(&x.adjoint());
            d.view_mut((n, 0), (n, n)).copy_from(x);
            d
        })
    }

    /// Corner `(row, col)` of each block of an element of the doubled algebra.
    pub fn corner(&self, row: usize, col: usize) -> Element {
        self.map_blocks(|d| {
            let n = d.nrows() / 2;
            d.view((row * n, col * n), (n, n)).into_owned()
        })
    }

    /// `[[x, 0], [0, 0]]` blockwise in the doubled algebra.
    pub fn into_corner(&self, row: usize, col: usize) -> Element {
        self.map_blocks(|x| {
            let n = x.nrows();
            let mut d = CMatrix::zeros(2 * n, 2 * n);
            d.view_mut((row * n, col * n), (n, n)).copy_from(x);
            d
        })
    }

    /// The defining representation: all blocks on the diagonal of one matrix.
    pub fn to_direct_sum(&self) -> CMatrix {
        linalg::direct_sum(&self.blocks)
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.blocks.iter().map(linalg::max_abs_entry).fold(0.0, f64::max)
    }
}

impl Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        self.zip_blocks(rhs, |a, b| a + b)
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        self.zip_blocks(rhs, |a, b| a - b)
    }
}

impl Mul for &Element {
    type Output = Element;
    fn mul(self, rhs: &Element) -> Element {
        self.zip_blocks(rhs, |a, b| a * b)
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.map_blocks(|b| -b)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Element {
            type Output = Element;
            fn $m(self, rhs: Element) -> Element {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Element norm, checked against an algebra.
pub fn element_norm(algebra: &BlockAlgebra, x: &Element) -> Result<f64> {
    algebra.check(x)?;
    Ok(x.norm())
}

/// A general linear functional `C ↦ Σ_j tr(W_j C_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Functional {
    repr: Vec<CMatrix>,
}

impl Functional {
    pub fn new(repr: Vec<CMatrix>) -> Result<Self> {
        Element::new(repr.clone())?;
        Ok(Functional { repr })
    }

    pub fn repr(&self) -> &[CMatrix] {
        &self.repr
    }

    pub fn dims(&self) -> Vec<usize> {
        self.repr.iter().map(|w| w.nrows()).collect()
    }

    pub fn eval(&self, x: &Element) -> Complex64 {
        assert_eq!(self.dims(), x.dims(), "functional and element live on different algebras");
        self.repr.iter().zip(x.blocks()).map(|(w, c)| linalg::trace_of_product(w, c)).sum()
    }

    /// Dual norm: `Σ_j ‖W_j‖_1`.
    pub fn norm(&self) -> f64 {
        self.repr.iter().map(linalg::trace_norm).sum()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.repr.iter().all(|w| linalg::is_hermitian(w, tol))
    }

    pub fn scale(&self, s: Complex64) -> Functional {
        Functional { repr: self.repr.iter().map(|w| w * s).collect() }
    }
}

/// Hermitian functional: `ψ(C*) = conj(ψ(C))`, i.e. every `W_j` Hermitian.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianFunctional {
    repr: Vec<CMatrix>,
}

impl HermitianFunctional {
    pub fn new(repr: Vec<CMatrix>) -> Result<Self> {
        Self::with_tol(repr, DEFAULT_TOL)
    }

    /// Validate Hermiticity as `‖W − W*‖ ≤ tol·(1 + ‖W‖)`; inputs are never symmetrized.
    pub fn with_tol(repr: Vec<CMatrix>, tol: f64) -> Result<Self> {
        Element::new(repr.clone())?;
        for (j, w) in repr.iter().enumerate() {
            if !linalg::is_hermitian(w, tol) {
                return Err(Error::Contract(format!(
                    "functional block {j} is not Hermitian (defect {:.3e})",
                    linalg::hermitian_defect(w)
                )));
            }
        }
        Ok(HermitianFunctional { repr })
    }

    pub fn from_element(x: &Element) -> Result<Self> {
        Self::new(x.blocks().to_vec())
    }

    pub fn zero(algebra: &BlockAlgebra) -> Self {
        HermitianFunctional { repr: algebra.zero().into_blocks() }
    }

    pub fn repr(&self) -> &[CMatrix] {
        &self.repr
    }

    pub fn repr_element(&self) -> Element {
        Element { blocks: self.repr.clone() }
    }

    pub fn dims(&self) -> Vec<usize> {
        self.repr.iter().map(|w| w.nrows()).collect()
    }

    pub fn eval(&self, x: &Element) -> Complex64 {
        assert_eq!(self.dims(), x.dims(), "functional and element live on different algebras");
        self.repr.iter().zip(x.blocks()).map(|(w, c)| linalg::trace_of_product(w, c)).sum()
    }

    /// `Σ_j Σ_i |λ_i(W_j)|`, equal to `sup{|ψ(C)| : ‖C‖ ≤ 1}`.
    pub fn norm(&self) -> f64 {
        self.repr.iter().map(|w| linalg::eigvalsh(w).iter().map(|l| l.abs()).sum::<f64>()).sum()
    }

    /// Element `C` with `‖C‖ = 1` and `ψ(C) = ‖ψ‖` (the sign of each `W_j`).
    pub fn norming_element(&self) -> Element {
        Element {
            blocks: self
                .repr
                .iter()
                .map(|w| linalg::eigh(w).reconstruct_with(|x| if x >= 0.0 { 1.0 } else { -1.0 }))
                .collect(),
        }
    }

    /// Jordan decomposition `ψ = (ψ⁺ − ψ⁻)/2` with `ψ±` positive and orthogonal,
    /// so that `‖ψ⁺‖ + ‖ψ⁻‖ = 2‖ψ‖`.
    pub fn jordan_decompose(&self) -> JordanDecomposition {
        let mut plus = Vec::with_capacity(self.repr.len());
        let mut minus = Vec::with_capacity(self.repr.len());
        for w in &self.repr {
            let e = linalg::eigh(w);
            plus.push(e.reconstruct_with(|x| 2.0 * x.max(0.0)));
            minus.push(e.reconstruct_with(|x| 2.0 * (-x).max(0.0)));
        }
        JordanDecomposition {
            plus: HermitianFunctional { repr: plus },
            minus: HermitianFunctional { repr: minus },
        }
    }

    pub fn to_functional(&self) -> Functional {
        Functional { repr: self.repr.clone() }
    }

    pub fn scale(&self, s: f64) -> HermitianFunctional {
        HermitianFunctional { repr: self.repr.iter().map(|w| w * Complex64::new(s, 0.0)).collect() }
    }

    /// Smallest eigenvalue over all blocks of the representing tuple.
    pub fn min_eigenvalue(&self) -> f64 {
        self.repr.iter().map(|w| linalg::eigh(w).min()).fold(f64::INFINITY, f64::min)
    }

    /// `ψ(1) = Σ_j tr(W_j)`.
    pub fn total_mass(&self) -> f64 {
        self.repr.iter().map(|w| linalg::trace(w).re).sum()
    }

    /// Normalize a positive functional into a state.
    pub fn to_state(&self) -> Result<StateDensity> {
        let mass = self.total_mass();
        if mass <= 0.0 {
            return Err(Error::Contract("functional has no positive mass".into()));
        }
        StateDensity::new(self.repr.iter().map(|w| w / Complex64::new(mass, 0.0)).collect())
    }
}

impl Sub for &HermitianFunctional {
    type Output = HermitianFunctional;
    fn sub(self, rhs: &HermitianFunctional) -> HermitianFunctional {
        assert_eq!(self.dims(), rhs.dims());
        HermitianFunctional { repr: self.repr.iter().zip(&rhs.repr).map(|(a, b)| a - b).collect() }
    }
}

impl Add for &HermitianFunctional {
    type Output = HermitianFunctional;
    fn add(self, rhs: &HermitianFunctional) -> HermitianFunctional {
        assert_eq!(self.dims(), rhs.dims());
        HermitianFunctional { repr: self.repr.iter().zip(&rhs.repr).map(|(a, b)| a + b).collect() }
    }
}

/// Output of [`HermitianFunctional::jordan_decompose`].
#[derive(Clone, Debug)]
pub struct JordanDecomposition {
    pub plus: HermitianFunctional,
    pub minus: HermitianFunctional,
}

impl JordanDecomposition {
    /// `‖(ψ⁺ − ψ⁻)/2 − ψ‖` measured as the largest entry of the representing tuples.
    pub fn reconstruction_residual(&self, psi: &HermitianFunctional) -> f64 {
        let rebuilt = (&self.plus - &self.minus).scale(0.5);
        (&rebuilt - psi).repr.iter().map(linalg::max_abs_entry).fold(0.0, f64::max)
    }
}

pub fn jordan_decompose(psi: &HermitianFunctional) -> JordanDecomposition {
    psi.jordan_decompose()
}

pub fn functional_norm(psi: &HermitianFunctional) -> f64 {
    psi.norm()
}

pub fn hermitian_dilation(a: &Element) -> Element {
    a.dilation()
}

/// A state given by positive density blocks `ρ_j` with `Σ_j tr(ρ_j) = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateDensity {
    rho: Vec<CMatrix>,
}

impl StateDensity {
    pub fn new(rho: Vec<CMatrix>) -> Result<Self> {
        Self::with_tol(rho, DEFAULT_TOL)
    }

    pub fn with_tol(rho: Vec<CMatrix>, tol: f64) -> Result<Self> {
        Element::new(rho.clone())?;
        let mut total = 0.0;
        for (j, r) in rho.iter().enumerate() {
            if !linalg::is_hermitian(r, tol) {
                return Err(Error::Contract(format!("density block {j} is not Hermitian")));
            }
            let min = linalg::eigh(r).min();
            if min < -tol {
                return Err(Error::Contract(format!("density block {j} has eigenvalue {min:.3e} < 0")));
            }
            total += linalg::trace(r).re;
        }
        if (total - 1.0).abs() > tol {
            return Err(Error::Contract(format!("density has total trace {total}, expected 1")));
        }
        Ok(StateDensity { rho })
    }

    /// Vector state `C ↦ ⟨C_j v, v⟩` on block `j`; `v` is normalized here.
    pub fn vector_state(algebra: &BlockAlgebra, block: usize, v: &CVector) -> Result<Self> {
        let n = *algebra
            .block_dims()
            .get(block)
            .ok_or_else(|| Error::Structural(format!("block index {block} out of range")))?;
        if v.len() != n {
            return Err(Error::Structural(format!("vector has length {}, block {block} has size {n}", v.len())));
        }
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::Degenerate("zero vector".into()));
        }
        let u = v / Complex64::new(norm, 0.0);
        let mut rho = algebra.zero().into_blocks();
        rho[block] = &u * u.adjoint();
        Ok(StateDensity { rho })
    }

    /// `C ↦ Σ_j tr(C_j) / Σ_j n_j`.
    pub fn normalized_trace(algebra: &BlockAlgebra) -> Self {
        let total = algebra.hilbert_dim() as f64;
        StateDensity {
            rho: algebra
                .block_dims()
                .iter()
                .map(|&n| linalg::identity(n) / Complex64::new(total, 0.0))
                .collect(),
        }
    }

    /// Convex combination `Σ t_k φ_k`.
    pub fn mixture(parts: &[(f64, StateDensity)]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::Degenerate("empty mixture".into()))?;
        let mut rho: Vec<CMatrix> = first.1.rho.iter().map(|r| r * ZERO).collect();
        for (t, s) in parts {
            if s.dims() != first.1.dims() {
                return Err(Error::Structural("mixture of states on different algebras".into()));
            }
            for (acc, r) in rho.iter_mut().zip(&s.rho) {
                *acc += r * Complex64::new(*t, 0.0);
            }
        }
        StateDensity::new(rho)
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.rho
    }

    pub fn dims(&self) -> Vec<usize> {
        self.rho.iter().map(|r| r.nrows()).collect()
    }

    pub fn algebra(&self) -> BlockAlgebra {
        BlockAlgebra { block_dims: self.dims() }
    }

    pub fn eval(&self, x: &Element) -> Complex64 {
        assert_eq!(self.dims(), x.dims(), "state and element live on different algebras");
        self.rho.iter().zip(x.blocks()).map(|(r, c)| linalg::trace_of_product(r, c)).sum()
    }

    pub fn as_functional(&self) -> HermitianFunctional {
        HermitianFunctional { repr: self.rho.clone() }
    }

    pub fn density_element(&self) -> Element {
        Element { blocks: self.rho.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, diag_real, from_real_rows};

    #[test]
    fn algebra_invariants() {
        assert!(BlockAlgebra::new(vec![]).is_err());
        assert!(BlockAlgebra::new(vec![2, 0]).is_err());
        let a = BlockAlgebra::new(vec![2, 3]).unwrap();
        assert_eq!(a.dimension(), 13);
        assert_eq!(a.matrix_units().len(), 13);
        assert_eq!(a.doubled().block_dims(), &[4, 6]);
    }

    #[test]
    fn zero_norm_and_structure_errors() {
        let a = BlockAlgebra::tuples(2, 3).unwrap();
        assert_eq!(element_norm(&a, &a.zero()).unwrap(), 0.0);
        let b = BlockAlgebra::full(2).unwrap();
        assert!(matches!(element_norm(&b, &a.zero()), Err(Error::Structural(_))));
    }

    #[test]
    fn adjoint_of_product_reverses() {
        let x = Element::new(vec![CMatrix::from_fn(2, 2, |i, j| c64(i as f64 + 1.0, j as f64 - 0.5))]).unwrap();
        let y = Element::new(vec![CMatrix::from_fn(2, 2, |i, j| c64((i + j) as f64, 2.0 * i as f64))]).unwrap();
        let lhs = (&x * &y).adjoint();
        let rhs = &y.adjoint() * &x.adjoint();
        assert!((&lhs - &rhs).max_abs_entry() < 1e-14);
    }

    #[test]
    fn functional_norm_examples() {
        let pos = HermitianFunctional::new(vec![diag_real(&[1.0, 0.0])]).unwrap();
        assert!((pos.norm() - 1.0).abs() < 1e-14);
        let mixed = HermitianFunctional::new(vec![diag_real(&[0.5, -0.5])]).unwrap();
        assert!((mixed.norm() - 1.0).abs() < 1e-14);
        let bad = HermitianFunctional::new(vec![from_real_rows(2, &[0.0, 1.0, 0.0, 0.0])]);
        assert!(matches!(bad, Err(Error::Contract(_))));
    }

    #[test]
    fn jordan_examples() {
        let psi = HermitianFunctional::new(vec![diag_real(&[0.5, -0.5])]).unwrap();
        let j = psi.jordan_decompose();
        assert!(linalg::max_abs_entry(&(&j.plus.repr()[0] - diag_real(&[1.0, 0.0]))) < 1e-14);
        assert!(linalg::max_abs_entry(&(&j.minus.repr()[0] - diag_real(&[0.0, 1.0]))) < 1e-14);

        let pos = HermitianFunctional::new(vec![diag_real(&[0.25, 0.75])]).unwrap();
        let j = pos.jordan_decompose();
        assert!(linalg::max_abs_entry(&(&j.plus.repr()[0] - diag_real(&[0.5, 1.5]))) < 1e-14);
        assert!(j.minus.norm() < 1e-14);
    }

    #[test]
    fn dilation_examples() {
        let a = Element::from_real(2, &[0.0, 2.0, 0.0, 0.0]).unwrap();
        let d = a.dilation();
        assert!(d.is_hermitian(1e-14));
        assert!((d.herm_norm() - 2.0).abs() < 1e-12);
        assert_eq!(d.corner(1, 0), a);
        let h = Element::from_real(2, &[1.0, 3.0, 3.0, -2.0]).unwrap();
        assert!((h.dilation().herm_norm() - h.norm()).abs() < 1e-12);
    }

    #[test]
    fn state_validation() {
        let a = BlockAlgebra::full(2).unwrap();
        let tr = StateDensity::normalized_trace(&a);
        assert!((tr.eval(&a.identity()).re - 1.0).abs() < 1e-15);
        assert!(StateDensity::new(vec![diag_real(&[0.5, 0.6])]).is_err());
        assert!(StateDensity::new(vec![diag_real(&[1.5, -0.5])]).is_err());
        let v = CVector::from_vec(vec![c64(1.0, 0.0), c64(1.0, 0.0)]);
        let s = StateDensity::vector_state(&a, 0, &v).unwrap();
        let x = Element::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        assert!((s.eval(&x).re - 1.0).abs() < 1e-14);
    }
}
