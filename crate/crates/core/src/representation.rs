//! GNS representations, the Hermitian unitary realizing the quotient seminorm
//! as a commutator norm, two-vector representations of norm-one functionals,
//! and the associated derivations.

use num_complex::Complex64;

use crate::algebra::{BlockAlgebra, Element, Functional, HermitianFunctional, StateDensity};
use crate::certificate::{self, ExtremalSpaces};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, I, ONE, ZERO};
use crate::subalgebra::Subalgebra;

/// Gram eigenvalues below this fraction of the largest are quotiented out.
pub const GNS_NULL_TOL: f64 = 1e-12;
/// Relative singular-value cutoff when spanning cyclic subspaces.
const SPAN_TOL: f64 = 1e-10;
/// Cutoff for `π(ℬ)ξ`. A computed witness is only accurate to about `1e-8`,
/// and directions that small are noise in the witness, not part of the span.
const WITNESS_SPAN_TOL: f64 = 1e-6;

/// A *-representation of a block algebra on `ℂ^dim`, stored through the images
/// of the matrix units, with a cyclic vector `ξ` and optionally a second vector `η`.
#[derive(Clone, Debug)]
pub struct Representation {
    source: BlockAlgebra,
    units: Vec<CMatrix>,
    pub xi: CVector,
    pub eta: Option<CVector>,
}

impl Representation {
    pub fn source(&self) -> &BlockAlgebra {
        &self.source
    }

    pub fn dim(&self) -> usize {
        self.xi.len()
    }

    /// `π(X) = Σ x_{j,pq} π(E^{(j)}_{pq})`.
    pub fn pi(&self, x: &Element) -> CMatrix {
        assert_eq!(x.dims(), self.source.block_dims(), "element from a different algebra");
        let d = self.dim();
        let mut out = CMatrix::zeros(d, d);
        let mut k = 0;
        for b in x.blocks() {
            let n = b.nrows();
            for p in 0..n {
                for q in 0..n {
                    let c = b[(p, q)];
                    if c != ZERO {
                        out += &self.units[k] * c;
                    }
                    k += 1;
                }
            }
        }
        out
    }

    /// `⟨π(C)ξ, η⟩` (or `⟨π(C)ξ, ξ⟩` without a second vector).
    pub fn coefficient(&self, c: &Element) -> Complex64 {
        let v = self.pi(c) * &self.xi;
        let eta = self.eta.as_ref().unwrap_or(&self.xi);
        eta.dotc(&v)
    }

    /// Largest defect of `π(E*) = π(E)*`, `π(EF) = π(E)π(F)` over matrix units and `π(1) = 1`.
    pub fn homomorphism_defect(&self) -> f64 {
        let units = self.source.matrix_units();
        let mut worst = linalg::max_abs_entry(&(self.pi(&self.source.identity()) - linalg::identity(self.dim())));
        for (a, ea) in units.iter().enumerate() {
            let pa = &self.units[a];
            worst = worst.max(linalg::max_abs_entry(&(self.pi(&ea.adjoint()) - pa.adjoint())));
            for (b, eb) in units.iter().enumerate() {
                let lhs = self.pi(&(ea * eb));
                worst = worst.max(linalg::max_abs_entry(&(lhs - pa * &self.units[b])));
            }
        }
        worst
    }

    /// Restrict to the cyclic subspace `span π(𝒜)ξ`, projecting `η` onto it.
    pub fn restrict_to_cyclic(&self) -> Representation {
        let cols: Vec<CVector> = self.units.iter().map(|u| u * &self.xi).collect();
        let span = linalg::column_space(&CMatrix::from_columns(&cols), SPAN_TOL);
        let q_adj = span.adjoint();
        Representation {
            source: self.source.clone(),
            units: self.units.iter().map(|u| &q_adj * u * &span).collect(),
            xi: &q_adj * &self.xi,
            eta: self.eta.as_ref().map(|e| &q_adj * e),
        }
    }

    fn direct_sum(parts: &[(&Representation, Complex64, Complex64)]) -> Representation {
        let source = parts[0].0.source.clone();
        let units = (0..parts[0].0.units.len())
            .map(|k| linalg::direct_sum(&parts.iter().map(|(r, _, _)| r.units[k].clone()).collect::<Vec<_>>()))
            .collect();
        let stack = |f: &dyn Fn(&(&Representation, Complex64, Complex64)) -> CVector| {
            let pieces: Vec<CVector> = parts.iter().map(f).collect();
            CVector::from_iterator(pieces.iter().map(|p| p.len()).sum(), pieces.iter().flat_map(|p| p.iter().copied()))
        };
        let xi = stack(&|(r, a, _)| &r.xi * *a);
        let eta = stack(&|(r, _, b)| &r.xi * *b);
        Representation { source, units, xi, eta: Some(eta) }
    }
}

/// GNS representation of a state: `⟨a, c⟩ = φ(c*a)` on the algebra, modulo its
/// null space, with `π` acting by left multiplication and `ξ` the class of `1`.
pub fn gns(algebra: &BlockAlgebra, phi: &StateDensity) -> Result<Representation> {
    if phi.algebra() != *algebra {
        return Err(Error::Structural("state lives on a different algebra".into()));
    }
    StateDensity::new(phi.blocks().to_vec()).map_err(|e| Error::Contract(format!("not a state: {e}")))?;
    // Matrix units are orthogonal across blocks; within block j,
    // φ(E_tu* E_pq) = δ_tp ρ_j[q, u], so the Gram matrix is I ⊗ ρ_jᵀ per block.
    let dims = algebra.block_dims();
    let total: usize = algebra.dimension();
    let mut gram = CMatrix::zeros(total, total);
    let mut offset = 0;
    for (j, &n) in dims.iter().enumerate() {
        let rho = &phi.blocks()[j];
        for p in 0..n {
            for q in 0..n {
                for u in 0..n {
                    // Row index (t = p, u), column (p, q): φ(E_pu* E_pq) = ρ[q, u].
                    gram[(offset + p * n + u, offset + p * n + q)] = rho[(q, u)];
                }
            }
        }
        offset += n * n;
    }
    let eig = linalg::eigh(&gram);
    let max = eig.max();
    if max <= 0.0 {
        return Err(Error::Contract("state has a zero Gram matrix".into()));
    }
    let keep: Vec<usize> = (0..eig.values.len()).filter(|&k| eig.values[k] > GNS_NULL_TOL * max).collect();
    let r = keep.len();
    // T = M^{1/2} W*, T⁺ = W M^{-1/2}: coordinates of classes in an orthonormal basis.
    let t = CMatrix::from_fn(r, total, |i, c| eig.vectors[(c, keep[i])].conj() * eig.values[keep[i]].sqrt());
    let t_plus = CMatrix::from_fn(total, r, |c, i| eig.vectors[(c, keep[i])] / eig.values[keep[i]].sqrt());

    let mut units = Vec::with_capacity(total);
    let mut off = 0;
    for &n in dims {
        for p in 0..n {
            for q in 0..n {
                // E_pq · E_sv = δ_qs E_pv: left multiplication maps coordinate (q, v) to (p, v).
                let mut left = CMatrix::zeros(total, total);
                for v in 0..n {
                    left[(off + p * n + v, off + q * n + v)] = ONE;
                }
                units.push(&t * left * &t_plus);
            }
        }
        off += n * n;
    }
    let mut one = CVector::zeros(total);
    let mut off = 0;
    for &n in dims {
        for p in 0..n {
            one[off + p * n + p] = ONE;
        }
        off += n * n;
    }
    let xi = &t * one;
    Ok(Representation { source: algebra.clone(), units, xi, eta: None })
}

/// `(H, π, U)` with `U` a Hermitian unitary commuting with `π(ℬ)`.
#[derive(Clone, Debug)]
pub struct CommutatorSeminorm {
    pub rep: Representation,
    pub u: CMatrix,
}

impl CommutatorSeminorm {
    /// `½‖[U, π(C)]‖`.
    pub fn eval(&self, c: &Element) -> f64 {
        let p = self.rep.pi(c);
        0.5 * linalg::op_norm(&(&self.u * &p - &p * &self.u))
    }

    /// `max(‖U − U*‖, ‖U² − 1‖)`.
    pub fn unitary_defect(&self) -> f64 {
        let n = self.u.nrows();
        linalg::op_norm(&(&self.u - self.u.adjoint())).max(linalg::op_norm(&(&self.u * &self.u - linalg::identity(n))))
    }

    /// `max_b ‖[U, π(b)]‖` over a basis of ℬ.
    pub fn commutation_defect(&self, s: &Subalgebra) -> f64 {
        s.basis()
            .iter()
            .map(|b| {
                let p = self.rep.pi(b);
                linalg::op_norm(&(&self.u * &p - &p * &self.u))
            })
            .fold(0.0, f64::max)
    }
}

/// Build `U = 2P − 1` from a witness of ℬ-minimality of `Z`, where `P`
/// projects onto `π(ℬ)ξ` in the GNS space of the (pinched) witness.
pub fn commutator_unitary(z: &Element, s: &Subalgebra, phi: &StateDensity) -> Result<CommutatorSeminorm> {
    let check = certificate::verify_witness(z, phi, s, certificate::DEFAULT_CERT_TOL)?;
    if !check.valid {
        return Err(Error::Precondition(format!("witness does not verify: {:?}", check.residuals)));
    }
    // Cross terms between E₊ and E₋ are invisible to the witness conditions but
    // would tilt π(Z)ξ away from the complement of π(ℬ)ξ.
    let spaces = ExtremalSpaces::new(&z.hermitian_part(), certificate::EIG_TOLS[certificate::EIG_TOLS.len() - 1]);
    let (pinched, _) = spaces.pinch(phi.blocks());
    let total: f64 = pinched.iter().map(|r| linalg::trace(r).re).sum();
    let pinched = StateDensity::with_tol(pinched.iter().map(|r| r / Complex64::new(total, 0.0)).collect(), 1e-8)?;
    let rep = gns(s.algebra(), &pinched)?;
    let cols: Vec<CVector> = s.basis().iter().map(|b| rep.pi(b) * &rep.xi).collect();
    let q = linalg::column_space(&CMatrix::from_columns(&cols), WITNESS_SPAN_TOL);
    let p = &q * q.adjoint();
    let u = p * Complex64::new(2.0, 0.0) - linalg::identity(rep.dim());
    Ok(CommutatorSeminorm { rep, u })
}

pub fn commutator_seminorm_eval(cs: &CommutatorSeminorm, c: &Element) -> Result<f64> {
    cs.rep.source().check(c)?;
    Ok(cs.eval(c))
}

fn check_unit_norm(norm: f64) -> Result<()> {
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::Precondition(format!("functional must have norm 1, got {norm}")));
    }
    Ok(())
}

/// `(π, ξ, η)` with `ψ(C) = ⟨π(C)ξ, η⟩` and `‖ξ‖ = ‖η‖ = 1`, for a Hermitian
/// functional of norm one. Goes through the doubled algebra; see
/// [`functional_rep_doubled`].
pub fn functional_rep(psi: &HermitianFunctional) -> Result<Representation> {
    functional_rep_doubled(&psi.to_functional())
}

/// Shortcut for Hermitian `ψ` through its Jordan decomposition directly:
/// `ξ = √a ξ⁺ ⊕ √b ξ⁻`, `η = √a ξ⁺ ⊕ −√b ξ⁻`.
pub fn functional_rep_direct(psi: &HermitianFunctional) -> Result<Representation> {
    check_unit_norm(psi.norm())?;
    let algebra = psi.repr_element().algebra();
    let jd = psi.jordan_decompose();
    let mut parts = Vec::new();
    let mut reps = Vec::new();
    for (part, sign) in [(&jd.plus, 1.0), (&jd.minus, -1.0)] {
        let mass = part.total_mass();
        if mass <= 1e-14 {
            continue;
        }
        let weight = (mass / 2.0).sqrt();
        reps.push((gns(&algebra, &part.to_state()?)?, weight, sign));
    }
    for (r, w, sign) in &reps {
        parts.push((r, Complex64::new(*w, 0.0), Complex64::new(w * sign, 0.0)));
    }
    Ok(Representation::direct_sum(&parts))
}

/// Same output for an arbitrary functional of norm one, built through the
/// doubled algebra: `ψ₂([[A, C], [B, D]]) = ½(ψ(B) + conj ψ(C*))` is Hermitian
/// with norm one, its Jordan parts are states, and compressing the direct sum
/// of their GNS representations to the upper-left corner recovers `ψ`.
pub fn functional_rep_doubled(psi: &Functional) -> Result<Representation> {
    check_unit_norm(psi.norm())?;
    let algebra = Element::new(psi.repr().to_vec())?.algebra();
    let doubled = algebra.doubled();
    // ψ₂ is represented by ½[[0, W], [W*, 0]].
    let w2: Vec<CMatrix> = psi
        .repr()
        .iter()
        .map(|w| {
            let n = w.nrows();
            let mut m = CMatrix::zeros(2 * n, 2 * n);
            m.view_mut((0, n), (n, n)).copy_from(&(w * Complex64::new(0.5, 0.0)));
            m.view_mut((n, 0), (n, n)).copy_from(&(w.adjoint() * Complex64::new(0.5, 0.0)));
            m
        })
        .collect();
    let psi2 = HermitianFunctional::new(w2)?;
    let jd = psi2.jordan_decompose();
    let plus = gns(&doubled, &jd.plus.to_state()?)?;
    let minus = gns(&doubled, &jd.minus.to_state()?)?;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let pi2 = Representation::direct_sum(&[
        (&plus, Complex64::new(r, 0.0), Complex64::new(r, 0.0)),
        (&minus, Complex64::new(r, 0.0), Complex64::new(-r, 0.0)),
    ]);
    let eta2 = pi2.eta.clone().expect("direct sum carries a second vector");

    let corner = pi2.pi(&algebra.identity().into_corner(0, 0));
    let flip = pi2.pi(&(&algebra.identity().into_corner(0, 1) + &algebra.identity().into_corner(1, 0)));
    let q = linalg::column_space(&corner, SPAN_TOL);
    let q_adj = q.adjoint();
    // Each Jordan part of ψ₂ puts mass ½ on the corner, so the compressed
    // vectors have norm 1/√2.
    let sqrt2 = Complex64::new(std::f64::consts::SQRT_2, 0.0);
    let units = algebra.matrix_units().iter().map(|e| &q_adj * pi2.pi(&e.into_corner(0, 0)) * &q).collect();
    let compressed = Representation {
        source: algebra,
        units,
        xi: &q_adj * &pi2.xi * sqrt2,
        eta: Some(&q_adj * (flip * eta2) * sqrt2),
    };
    Ok(compressed.restrict_to_cyclic())
}

/// `C ↦ δ_V(C) = ½[V, π(C)]` with `V = iU`.
#[derive(Clone, Debug)]
pub struct Derivation {
    cs: CommutatorSeminorm,
    v: CMatrix,
}

impl Derivation {
    pub fn apply(&self, c: &Element) -> CMatrix {
        let p = self.cs.rep.pi(c);
        (&self.v * &p - &p * &self.v) * Complex64::new(0.5, 0.0)
    }

    pub fn norm(&self, c: &Element) -> f64 {
        linalg::op_norm(&self.apply(c))
    }

    /// `‖δ(AC) − δ(A)π(C) − π(A)δ(C)‖`.
    pub fn leibniz_defect(&self, a: &Element, c: &Element) -> f64 {
        let lhs = self.apply(&(a * c));
        let rhs = self.apply(a) * self.cs.rep.pi(c) + self.cs.rep.pi(a) * self.apply(c);
        linalg::op_norm(&(lhs - rhs))
    }

    /// `‖δ(C*) − δ(C)*‖`.
    pub fn star_defect(&self, c: &Element) -> f64 {
        linalg::op_norm(&(self.apply(&c.adjoint()) - self.apply(c).adjoint()))
    }
}

pub fn derivation_seminorm(cs: &CommutatorSeminorm) -> Derivation {
    Derivation { cs: cs.clone(), v: &cs.u * I }
}
