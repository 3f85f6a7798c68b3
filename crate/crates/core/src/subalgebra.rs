//! Unital *-subalgebras of a [`BlockAlgebra`].
//!
//! A subalgebra is stored as a Hilbert–Schmidt-orthonormal basis of Hermitian
//! elements. Because the subalgebra is *-closed, the same list is both a real
//! basis of its Hermitian part and a complex basis of the whole subalgebra, so
//! `p = dim_ℝ(ℬ^h)` equals the complex dimension and the orthogonal projection is
//! `X ↦ Σ ⟨b, X⟩ b`.

use std::sync::{Arc, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::algebra::{BlockAlgebra, Element, StateDensity};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, I, ONE};

/// Tolerance for orthonormality of the stored basis.
pub const ORTHONORMAL_TOL: f64 = 1e-9;
/// Tolerance for adjoint/product/unit closure.
pub const CLOSURE_TOL: f64 = 1e-8;
/// A residual this small (relative) counts as "already in the span" while closing.
const NEW_DIRECTION_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubalgebraKind {
    /// `ℂ·1`.
    Scalars,
    /// Diagonal matrices in every block.
    Diagonal,
    /// Block-diagonal matrices in every block; the partition must sum to each block size.
    BlockDiagonal(Vec<usize>),
    /// Constant tuples `(X, …, X)`; needs all blocks of equal size.
    ConstantTuple,
    /// Span of the block identities.
    Center,
}

#[derive(Clone, Debug)]
pub struct Subalgebra {
    algebra: BlockAlgebra,
    basis: Vec<Element>,
    label: String,
    dilated: Arc<OnceLock<Subalgebra>>,
}

impl PartialEq for Subalgebra {
    fn eq(&self, other: &Self) -> bool {
        self.algebra == other.algebra && self.basis == other.basis
    }
}

impl Subalgebra {
    /// Close `generators` under adjoint, products and the unit, orthonormalize and validate.
    pub fn generated_by(algebra: &BlockAlgebra, generators: &[Element]) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::Precondition("at least one generator is required".into()));
        }
        for g in generators {
            algebra.check(g)?;
        }
        let mut basis: Vec<Element> = Vec::new();
        absorb(&mut basis, &algebra.identity());
        for g in generators {
            absorb(&mut basis, g);
        }
        let bound = algebra.dimension();
        loop {
            let before = basis.len();
            let snapshot = basis.clone();
            for i in 0..snapshot.len() {
                for j in i..snapshot.len() {
                    absorb(&mut basis, &(&snapshot[i] * &snapshot[j]));
                    if basis.len() > bound {
                        return Err(Error::Internal(format!(
                            "closure produced {} directions in an algebra of dimension {bound}",
                            basis.len()
                        )));
                    }
                }
            }
            if basis.len() == before {
                break;
            }
        }
        let s = Subalgebra::from_basis(algebra.clone(), basis, "generated".into());
        s.validate()?;
        Ok(s)
    }

    pub fn standard(algebra: &BlockAlgebra, kind: &SubalgebraKind) -> Result<Self> {
        let dims = algebra.block_dims();
        let mut basis = Vec::new();
        let label;
        match kind {
            SubalgebraKind::Scalars => {
                let n = algebra.hilbert_dim() as f64;
                basis.push(algebra.identity().scale_real(1.0 / n.sqrt()));
                label = "scalars".to_string();
            }
            SubalgebraKind::Diagonal => {
                for (j, &n) in dims.iter().enumerate() {
                    for p in 0..n {
                        basis.push(algebra.embed(j, linalg::matrix_unit(n, p, p))?);
                    }
                }
                label = "diagonal".to_string();
            }
            SubalgebraKind::BlockDiagonal(partition) => {
                if partition.contains(&0) {
                    return Err(Error::Unsupported("partition parts must be positive".into()));
                }
                let total: usize = partition.iter().sum();
                if let Some(bad) = dims.iter().find(|&&n| n != total) {
                    return Err(Error::Unsupported(format!(
                        "partition {partition:?} does not sum to block size {bad}"
                    )));
                }
                for (j, &n) in dims.iter().enumerate() {
                    let mut start = 0;
                    for &len in partition {
                        for h in hermitian_matrix_basis(len) {
                            let mut m = CMatrix::zeros(n, n);
                            m.view_mut((start, start), (len, len)).copy_from(&h);
                            basis.push(algebra.embed(j, m)?);
                        }
                        start += len;
                    }
                }
                label = format!("block_diagonal{partition:?}");
            }
            SubalgebraKind::ConstantTuple => {
                let n = dims[0];
                if dims.iter().any(|&d| d != n) {
                    return Err(Error::Unsupported(format!("constant tuples need equal block sizes, got {dims:?}")));
                }
                let m = dims.len() as f64;
                for h in hermitian_matrix_basis(n) {
                    let blocks = vec![h / Complex64::new(m.sqrt(), 0.0); dims.len()];
                    basis.push(Element::new(blocks)?);
                }
                label = "constant_tuple".to_string();
            }
            SubalgebraKind::Center => {
                for (j, &n) in dims.iter().enumerate() {
                    let scale = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
                    basis.push(algebra.embed(j, linalg::identity(n) * scale)?);
                }
                label = "center".to_string();
            }
        }
        let s = Subalgebra::from_basis(algebra.clone(), basis, label);
        s.validate()?;
        Ok(s)
    }

    fn from_basis(algebra: BlockAlgebra, basis: Vec<Element>, label: String) -> Self {
        Subalgebra { algebra, basis, label, dilated: Arc::new(OnceLock::new()) }
    }

    pub fn algebra(&self) -> &BlockAlgebra {
        &self.algebra
    }

    /// Hermitian, Hilbert–Schmidt-orthonormal basis.
    pub fn basis(&self) -> &[Element] {
        &self.basis
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `p = dim_ℝ(ℬ^h)`, which equals the complex dimension of `ℬ`.
    pub fn real_herm_dim(&self) -> usize {
        self.basis.len()
    }

    /// Every subalgebra built here contains the unit; non-unital ones are rejected.
    pub fn contains_unit(&self) -> bool {
        true
    }

    /// Check orthonormality and closure under adjoint, products and the unit.
    pub fn validate(&self) -> Result<()> {
        for (i, a) in self.basis.iter().enumerate() {
            self.algebra.check(a)?;
            for (j, b) in self.basis.iter().enumerate().skip(i) {
                let want = if i == j { ONE } else { Complex64::new(0.0, 0.0) };
                let got = a.hs_inner(b);
                if (got - want).norm() > ORTHONORMAL_TOL {
                    return Err(Error::Internal(format!("basis not orthonormal at ({i}, {j}): {got}")));
                }
            }
        }
        for (i, a) in self.basis.iter().enumerate() {
            let r = self.residual(&a.adjoint());
            if r > CLOSURE_TOL {
                return Err(Error::Precondition(format!("not closed under adjoint (element {i}, residual {r:.2e})")));
            }
            for (j, b) in self.basis.iter().enumerate() {
                let r = self.residual(&(a * b));
                if r > CLOSURE_TOL {
                    return Err(Error::Precondition(format!(
                        "not closed under multiplication ({i}, {j}, residual {r:.2e})"
                    )));
                }
            }
        }
        let r = self.residual(&self.algebra.identity());
        if r > CLOSURE_TOL {
            return Err(Error::Precondition(format!("subalgebra does not contain the unit (residual {r:.2e})")));
        }
        Ok(())
    }

    /// Coefficients `⟨b_i, X⟩`.
    pub fn coordinates(&self, x: &Element) -> Vec<Complex64> {
        self.basis.iter().map(|b| b.hs_inner(x)).collect()
    }

    /// `Σ c_i b_i` for real coefficients.
    pub fn combine_real(&self, coeffs: &[f64]) -> Element {
        let mut out = self.algebra.zero();
        for (c, b) in coeffs.iter().zip(&self.basis) {
            out = &out + &b.scale_real(*c);
        }
        out
    }

    pub fn combine(&self, coeffs: &[Complex64]) -> Element {
        let mut out = self.algebra.zero();
        for (c, b) in coeffs.iter().zip(&self.basis) {
            out = &out + &b.scale(*c);
        }
        out
    }

    /// Orthogonal projection in the Hilbert–Schmidt inner product. For a unital
    /// *-subalgebra this is the trace-preserving conditional expectation.
    pub fn project(&self, x: &Element) -> Element {
        self.combine(&self.coordinates(x))
    }

    /// `‖X − P(X)‖_HS`.
    pub fn residual(&self, x: &Element) -> f64 {
        (x - &self.project(x)).hs_norm()
    }

    pub fn contains(&self, x: &Element, tol: f64) -> bool {
        self.residual(x) <= tol * (1.0 + x.hs_norm())
    }

    /// True iff every basis element commutes with every matrix unit of the algebra.
    pub fn is_central(&self) -> bool {
        self.is_central_with_tol(1e-9)
    }

    pub fn is_central_with_tol(&self, tol: f64) -> bool {
        let units = self.algebra.matrix_units();
        self.basis.iter().all(|b| units.iter().all(|e| b.commutator(e).norm() <= tol))
    }

    /// `M_2(ℬ)` inside the doubled algebra, cached after the first call.
    pub fn dilated(&self) -> &Subalgebra {
        self.dilated.get_or_init(|| {
            let root_half = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            let mut basis = Vec::with_capacity(4 * self.basis.len());
            for h in &self.basis {
                basis.push(h.into_corner(0, 0));
                basis.push(h.into_corner(1, 1));
                basis.push((&h.into_corner(0, 1) + &h.into_corner(1, 0)).scale(root_half));
                let ih = h.scale(I);
                basis.push((&ih.into_corner(1, 0) - &ih.into_corner(0, 1)).scale(root_half));
            }
            Subalgebra::from_basis(self.algebra.doubled(), basis, format!("M2({})", self.label))
        })
    }
}

/// Add the Hermitian and anti-Hermitian directions of `x` to an orthonormal Hermitian list.
fn absorb(basis: &mut Vec<Element>, x: &Element) {
    for part in [x.hermitian_part(), x.imaginary_part()] {
        let scale = part.hs_norm();
        if scale == 0.0 {
            continue;
        }
        let mut v = part;
        for _ in 0..2 {
            for b in basis.iter() {
                let c = b.hs_inner(&v).re;
                v = &v - &b.scale_real(c);
            }
        }
        let r = v.hs_norm();
        if r > NEW_DIRECTION_TOL * scale {
            basis.push(v.scale_real(1.0 / r));
        }
    }
}

/// HS-orthonormal Hermitian basis of `M_n(ℂ)`: `E_pp`, `(E_pq + E_qp)/√2`, `i(E_pq − E_qp)/√2`.
pub fn hermitian_matrix_basis(n: usize) -> Vec<CMatrix> {
    let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut out = Vec::with_capacity(n * n);
    for p in 0..n {
        for q in 0..n {
            let m = if p == q {
                linalg::matrix_unit(n, p, p)
            } else if p < q {
                (linalg::matrix_unit(n, p, q) + linalg::matrix_unit(n, q, p)) * r
            } else {
                (linalg::matrix_unit(n, p, q) - linalg::matrix_unit(n, q, p)) * (I * r)
            };
            out.push(m);
        }
    }
    out
}

pub fn build_subalgebra(algebra: &BlockAlgebra, generators: &[Element]) -> Result<Subalgebra> {
    Subalgebra::generated_by(algebra, generators)
}

pub fn standard_subalgebra(algebra: &BlockAlgebra, kind: &SubalgebraKind) -> Result<Subalgebra> {
    Subalgebra::standard(algebra, kind)
}

pub fn hs_project(x: &Element, s: &Subalgebra) -> Result<Element> {
    s.algebra().check(x)?;
    Ok(s.project(x))
}

/// Result of [`radial_retraction`].
#[derive(Clone, Debug)]
pub struct RadialRetraction {
    pub retracted: Element,
    pub norm: f64,
    pub distance_before: f64,
    pub distance_after: f64,
}

/// Pull `F` (in a central subalgebra) back into the ball of radius `‖A‖` by the
/// functional calculus `λ ↦ λ·min(1, ‖A‖/|λ|)`; never increases the distance to `A`.
pub fn radial_retraction(a: &Element, f: &Element, s: &Subalgebra) -> Result<RadialRetraction> {
    s.algebra().check(a)?;
    s.algebra().check(f)?;
    if !s.is_central() {
        return Err(Error::Precondition("radial retraction needs a central subalgebra".into()));
    }
    if !s.contains(f, CLOSURE_TOL) {
        return Err(Error::Precondition("F is not in the subalgebra".into()));
    }
    let radius = a.norm();
    if radius == 0.0 {
        return Err(Error::Degenerate("‖A‖ = 0: the retraction target ball is {0}".into()));
    }
    let blocks = f
        .blocks()
        .iter()
        .map(|fj| {
            let n = fj.nrows();
            let lambda = linalg::trace(fj) / Complex64::new(n as f64, 0.0);
            let mag = lambda.norm();
            let shrink = if mag > radius { radius / mag } else { 1.0 };
            linalg::identity(n) * (lambda * shrink)
        })
        .collect();
    let g = Element::new(blocks)?;
    let out = RadialRetraction {
        norm: g.norm(),
        distance_before: (a - f).norm(),
        distance_after: (a - &g).norm(),
        retracted: g,
    };
    if out.norm > radius + 1e-12 || out.distance_after > out.distance_before + 1e-9 {
        return Err(Error::Internal(format!(
            "retraction check failed: ‖G‖ = {}, ‖A‖ = {radius}, ‖A−G‖ = {}, ‖A−F‖ = {}",
            out.norm, out.distance_after, out.distance_before
        )));
    }
    Ok(out)
}

/// Gram matrix of a state on the subalgebra basis.
#[derive(Clone, Debug)]
pub struct StateRestriction {
    /// `gram[(i, j)] = φ(b_i* b_j)`.
    pub gram: DMatrix<Complex64>,
    pub min_eig: f64,
}

impl StateRestriction {
    pub fn is_faithful(&self, tol: f64) -> bool {
        self.min_eig > tol
    }
}

pub fn restrict_state(phi: &StateDensity, s: &Subalgebra) -> Result<StateRestriction> {
    if phi.algebra() != *s.algebra() {
        return Err(Error::Structural("state and subalgebra live on different algebras".into()));
    }
    let p = s.basis().len();
    let mut gram = DMatrix::zeros(p, p);
    for i in 0..p {
        let bi_adj = s.basis()[i].adjoint();
        for j in 0..p {
            gram[(i, j)] = phi.eval(&(&bi_adj * &s.basis()[j]));
        }
    }
    let min_eig = linalg::eigh(&gram).min();
    Ok(StateRestriction { gram, min_eig })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, diag_real};

    fn m2() -> BlockAlgebra {
        BlockAlgebra::full(2).unwrap()
    }

    #[test]
    fn generated_scalar_and_diagonal() {
        let a = m2();
        let s = Subalgebra::generated_by(&a, &[a.identity()]).unwrap();
        assert_eq!(s.real_herm_dim(), 1);
        let d = Subalgebra::generated_by(&a, &[Element::new(vec![diag_real(&[1.0, 0.0])]).unwrap()]).unwrap();
        assert_eq!(d.real_herm_dim(), 2);
    }

    #[test]
    fn generated_constant_flip() {
        let a = BlockAlgebra::tuples(2, 3).unwrap();
        let flip: &[f64] = &[0.0, 1.0, 1.0, 0.0];
        let x = Element::tuple_from_real(2, &[flip; 3]).unwrap();
        let s = Subalgebra::generated_by(&a, &[x.clone()]).unwrap();
        assert_eq!(s.real_herm_dim(), 2);
        assert!(s.contains(&a.identity(), 1e-10));
        assert!(s.contains(&x, 1e-10));
    }

    #[test]
    fn generators_must_conform() {
        let a = m2();
        let other = BlockAlgebra::full(3).unwrap().identity();
        assert!(matches!(Subalgebra::generated_by(&a, &[other]), Err(Error::Structural(_))));
        assert!(matches!(Subalgebra::generated_by(&a, &[]), Err(Error::Precondition(_))));
    }

    #[test]
    fn standard_kinds() {
        let t = BlockAlgebra::tuples(2, 3).unwrap();
        let c = Subalgebra::standard(&t, &SubalgebraKind::ConstantTuple).unwrap();
        assert_eq!(c.real_herm_dim(), 4);
        assert!(!c.is_central());

        let mixed = BlockAlgebra::new(vec![2, 3]).unwrap();
        let z = Subalgebra::standard(&mixed, &SubalgebraKind::Center).unwrap();
        assert_eq!(z.real_herm_dim(), 2);
        assert!(z.is_central());
        assert!(matches!(
            Subalgebra::standard(&mixed, &SubalgebraKind::ConstantTuple),
            Err(Error::Unsupported(_))
        ));

        let d = Subalgebra::standard(&m2(), &SubalgebraKind::Diagonal).unwrap();
        assert_eq!(d.real_herm_dim(), 2);
        assert!(!d.is_central());

        let bd = Subalgebra::standard(&BlockAlgebra::full(3).unwrap(), &SubalgebraKind::BlockDiagonal(vec![2, 1]))
            .unwrap();
        assert_eq!(bd.real_herm_dim(), 5);
    }

    #[test]
    fn projection_examples() {
        let a = m2();
        let d = Subalgebra::standard(&a, &SubalgebraKind::Diagonal).unwrap();
        let off = Element::from_real(2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(d.project(&off).max_abs_entry() < 1e-15);
        let inside = Element::new(vec![diag_real(&[3.0, -1.0])]).unwrap();
        assert!((&d.project(&inside) - &inside).max_abs_entry() < 1e-10);

        let t = BlockAlgebra::tuples(2, 3).unwrap();
        let c = Subalgebra::standard(&t, &SubalgebraKind::ConstantTuple).unwrap();
        let x = Element::new(vec![diag_real(&[2.0, 5.0]), diag_real(&[0.0, 0.0]), diag_real(&[0.0, 0.0])]).unwrap();
        let want = Element::new(vec![diag_real(&[2.0 / 3.0, 5.0 / 3.0]); 3]).unwrap();
        assert!((&c.project(&x) - &want).max_abs_entry() < 1e-12);
    }

    #[test]
    fn dilated_subalgebra_is_closed() {
        let t = BlockAlgebra::tuples(2, 2).unwrap();
        let c = Subalgebra::standard(&t, &SubalgebraKind::ConstantTuple).unwrap();
        let d = c.dilated();
        assert_eq!(d.real_herm_dim(), 16);
        d.validate().unwrap();
    }

    #[test]
    fn retraction_examples() {
        let a = m2();
        let s = Subalgebra::standard(&a, &SubalgebraKind::Scalars).unwrap();
        let x = Element::new(vec![diag_real(&[1.0, -0.5])]).unwrap();
        let f = a.identity().scale_real(3.0);
        let r = radial_retraction(&x, &f, &s).unwrap();
        assert!((&r.retracted - &a.identity()).max_abs_entry() < 1e-15);

        let small = a.identity().scale_real(0.25);
        let r = radial_retraction(&x, &small, &s).unwrap();
        assert_eq!(r.retracted, small);

        let d = Subalgebra::standard(&a, &SubalgebraKind::Diagonal).unwrap();
        assert!(matches!(radial_retraction(&x, &f, &d), Err(Error::Precondition(_))));
        assert!(matches!(radial_retraction(&a.zero(), &f, &s), Err(Error::Degenerate(_))));
    }

    #[test]
    fn restriction_examples() {
        let a = m2();
        let d = Subalgebra::standard(&a, &SubalgebraKind::Diagonal).unwrap();
        let tr = StateDensity::normalized_trace(&a);
        let r = restrict_state(&tr, &d).unwrap();
        assert!((r.gram[(0, 0)].re - 0.5).abs() < 1e-15 && (r.gram[(1, 1)].re - 0.5).abs() < 1e-15);
        assert!(r.is_faithful(1e-9));
        let e1 = StateDensity::vector_state(&a, 0, &nalgebra::DVector::from_vec(vec![c64(1.0, 0.0), c64(0.0, 0.0)]))
            .unwrap();
        let r = restrict_state(&e1, &d).unwrap();
        assert!(!r.is_faithful(1e-9));
    }
}
