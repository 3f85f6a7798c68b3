//! State-based certificates of ℬ-minimality.
//!
//! A Hermitian `Z` is ℬ-minimal (its best approximation in ℬ is `0`) exactly
//! when some state `φ` has `φ(Z²) = ‖Z‖²` and `φ(ZB + BZ) = 0` for every
//! `B ∈ ℬ^h`. The first condition pins `φ` to the extremal eigenspaces
//! `E₊ ⊕ E₋` of `Z` (eigenvalues `±‖Z‖`). On that support the constraint
//! matrices `ZB + BZ` have no `E₊ × E₋` cross terms, so a witness may always be
//! pinched to `P₊ρP₊ + P₋ρP₋` without losing validity; every density produced
//! here is pinched in that sense.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{BlockAlgebra, Element, HermitianFunctional, StateDensity};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::subalgebra::{restrict_state, Subalgebra};

/// Default verification tolerance (relative to `‖Z‖` and `‖Z‖²`).
pub const DEFAULT_CERT_TOL: f64 = 1e-5;
/// Eigenspace membership tolerances tried in order, relative to `‖Z‖`.
pub const EIG_TOLS: [f64; 3] = [1e-8, 1e-6, 1e-4];
/// Gram eigenvalue threshold for faithfulness on ℬ.
pub const FAITHFUL_TOL: f64 = 1e-9;

/// A vector state `C ↦ ⟨C_j v, v⟩` on block `j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PureState {
    pub block: usize,
    #[serde(with = "complex_vec")]
    pub vector: CVector,
}

impl PureState {
    pub fn eval(&self, x: &Element) -> Complex64 {
        let m = x.block(self.block);
        (self.vector.adjoint() * m * &self.vector)[(0, 0)]
    }
}

/// `Z`-definite pure states with signs and convex weights, `ψ = Σ t_j ε_j φ_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub pure_states: Vec<PureState>,
    pub signs: Vec<i8>,
    pub weights: Vec<f64>,
    pub residuals: BTreeMap<String, f64>,
}

impl Witness {
    /// Validates the weights and normalizes the vectors.
    pub fn new(pure_states: Vec<PureState>, signs: Vec<i8>, weights: Vec<f64>) -> Result<Self> {
        if pure_states.is_empty() || pure_states.len() != signs.len() || signs.len() != weights.len() {
            return Err(Error::Contract(format!(
                "witness needs equally many states, signs and weights ({}, {}, {})",
                pure_states.len(),
                signs.len(),
                weights.len()
            )));
        }
        if signs.iter().any(|s| *s != 1 && *s != -1) {
            return Err(Error::Contract("signs must be +1 or -1".into()));
        }
        if weights.iter().any(|t| !(*t > 0.0)) {
            return Err(Error::Contract("weights must be positive".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::Contract(format!("weights sum to {total}, expected 1")));
        }
        let mut states = pure_states;
        for s in &mut states {
            let n = s.vector.norm();
            if n == 0.0 {
                return Err(Error::Degenerate("zero vector in witness".into()));
            }
            s.vector /= Complex64::new(n, 0.0);
        }
        Ok(Witness { pure_states: states, signs, weights, residuals: BTreeMap::new() })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// The state `Σ t_j φ_j`.
    pub fn density(&self, algebra: &BlockAlgebra) -> Result<StateDensity> {
        let mut rho = algebra.zero().into_blocks();
        for (s, t) in self.pure_states.iter().zip(&self.weights) {
            let n = *algebra
                .block_dims()
                .get(s.block)
                .ok_or_else(|| Error::Structural(format!("pure state on missing block {}", s.block)))?;
            if s.vector.len() != n {
                return Err(Error::Structural(format!("vector of length {} on block of size {n}", s.vector.len())));
            }
            rho[s.block] += &s.vector * s.vector.adjoint() * Complex64::new(*t, 0.0);
        }
        StateDensity::new(rho)
    }

    /// `ψ = Σ t_j ε_j φ_j` without verification.
    pub fn signed_functional(&self, algebra: &BlockAlgebra) -> Result<HermitianFunctional> {
        let mut w = algebra.zero().into_blocks();
        for ((s, t), e) in self.pure_states.iter().zip(&self.weights).zip(&self.signs) {
            algebra.block_dims().get(s.block).ok_or_else(|| Error::Structural("pure state on missing block".into()))?;
            w[s.block] += &s.vector * s.vector.adjoint() * Complex64::new(t * f64::from(*e), 0.0);
        }
        HermitianFunctional::new(w)
    }

    /// Verify against `(Z, ℬ)`, storing the residuals in the witness.
    pub fn verify(&mut self, z: &Element, s: &Subalgebra, tol: f64) -> Result<WitnessCheck> {
        let phi = self.density(s.algebra())?;
        let check = verify_witness(z, &phi, s, tol)?;
        let norm = z.herm_norm();
        let definiteness = self
            .pure_states
            .iter()
            .zip(&self.signs)
            .map(|(p, e)| definiteness_residual(z, p, f64::from(*e) * norm))
            .fold(0.0, f64::max);
        self.residuals.extend(check.residuals.clone());
        self.residuals.insert("definiteness".into(), definiteness / norm.max(f64::MIN_POSITIVE));
        let valid = check.valid && definiteness <= tol * norm;
        Ok(WitnessCheck { valid, residuals: self.residuals.clone() })
    }

    fn is_verified(&self, tol: f64) -> bool {
        ["norm_attainment", "orthogonality"].iter().all(|k| self.residuals.get(*k).is_some_and(|r| *r <= tol))
    }
}

/// `‖Z_j v − λ v‖`, which bounds `|φ(ZC) − λφ(C)|` by `‖C‖` times itself.
fn definiteness_residual(z: &Element, p: &PureState, lambda: f64) -> f64 {
    let zv = z.block(p.block) * &p.vector;
    (zv - &p.vector * Complex64::new(lambda, 0.0)).norm()
}

#[derive(Clone, Debug)]
pub struct WitnessCheck {
    pub valid: bool,
    pub residuals: BTreeMap<String, f64>,
}

/// Orthonormal bases of the `±‖Z‖` eigenspaces in every block.
#[derive(Clone, Debug)]
pub struct ExtremalSpaces {
    pub norm: f64,
    pub plus: Vec<CMatrix>,
    pub minus: Vec<CMatrix>,
}

impl ExtremalSpaces {
    pub fn new(z: &Element, rel_tol: f64) -> Self {
        let norm = z.herm_norm();
        let cut = rel_tol * norm;
        let mut plus = Vec::new();
        let mut minus = Vec::new();
        for b in z.blocks() {
            let e = linalg::eigh(b);
            let pick = |keep: &dyn Fn(f64) -> bool| {
                let idx: Vec<usize> = (0..e.values.len()).filter(|&k| keep(e.values[k])).collect();
                CMatrix::from_fn(b.nrows(), idx.len(), |i, c| e.vectors[(i, idx[c])])
            };
            plus.push(pick(&|l| l >= norm - cut));
            minus.push(pick(&|l| l <= -norm + cut));
        }
        ExtremalSpaces { norm, plus, minus }
    }

    pub fn dimension(&self) -> usize {
        self.plus.iter().chain(&self.minus).map(|v| v.ncols()).sum()
    }

    /// `P₊ρP₊ + P₋ρP₋` per block, plus the trace mass that lay outside `E₊ ⊕ E₋`.
    pub fn pinch(&self, rho: &[CMatrix]) -> (Vec<CMatrix>, f64) {
        let mut out = Vec::with_capacity(rho.len());
        let mut inside = 0.0;
        let mut total = 0.0;
        for ((r, vp), vm) in rho.iter().zip(&self.plus).zip(&self.minus) {
            let mut acc = CMatrix::zeros(r.nrows(), r.ncols());
            for v in [vp, vm] {
                if v.ncols() == 0 {
                    continue;
                }
                let compressed = v.adjoint() * r * v;
                inside += linalg::trace(&compressed).re;
                acc += v * compressed * v.adjoint();
            }
            total += linalg::trace(r).re;
            out.push(acc);
        }
        (out, (total - inside).max(0.0))
    }
}

/// Check `|φ(Z²) − ‖Z‖²| ≤ tol·‖Z‖²` and `|φ(ZB + BZ)| ≤ tol·‖Z‖` for every basis `B`.
pub fn verify_witness(z: &Element, phi: &StateDensity, s: &Subalgebra, tol: f64) -> Result<WitnessCheck> {
    s.algebra().check(z)?;
    if phi.algebra() != *s.algebra() {
        return Err(Error::Structural("state and subalgebra live on different algebras".into()));
    }
    let norm = z.herm_norm();
    if norm == 0.0 {
        return Err(Error::Degenerate("Z = 0".into()));
    }
    let z2 = z * z;
    let attain = (phi.eval(&z2).re - norm * norm).abs() / (norm * norm);
    let mut worst = 0.0_f64;
    let mut residuals = BTreeMap::new();
    for (i, b) in s.basis().iter().enumerate() {
        let c = &(z * b) + &(b * z);
        let r = phi.eval(&c).norm() / norm;
        residuals.insert(format!("orthogonality[{i}]"), r);
        worst = worst.max(r);
    }
    residuals.insert("norm_attainment".into(), attain);
    residuals.insert("orthogonality".into(), worst);
    Ok(WitnessCheck { valid: attain <= tol && worst <= tol, residuals })
}

#[derive(Clone, Debug)]
pub struct WitnessOptions {
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        WitnessOptions { tol: DEFAULT_CERT_TOL, max_sweeps: 20_000 }
    }
}

/// Search for a witness state of ℬ-minimality of the Hermitian element `Z`.
///
/// Failure is a diagnostic only: it does not prove that `Z` is not minimal.
pub fn find_witness(z: &Element, s: &Subalgebra) -> Result<StateDensity> {
    find_witness_with(z, s, &WitnessOptions::default())
}

pub fn find_witness_with(z: &Element, s: &Subalgebra, opts: &WitnessOptions) -> Result<StateDensity> {
    s.algebra().check(z)?;
    if !z.is_hermitian(1e-9) {
        return Err(Error::Precondition("witness search needs a Hermitian element; dilate first".into()));
    }
    let z = z.hermitian_part();
    let norm = z.herm_norm();
    if norm == 0.0 {
        return Err(Error::Degenerate("Z = 0 has no witness".into()));
    }
    let mut last = String::new();
    for (attempt, &eig_tol) in EIG_TOLS.iter().enumerate() {
        if attempt > 0 {
            log::warn!("witness search retrying with widened support, eigenvalue tolerance {eig_tol:e}·‖Z‖");
        }
        let spaces = ExtremalSpaces::new(&z, eig_tol);
        let rho = dykstra_witness(&z, s, &spaces, opts.max_sweeps);
        match StateDensity::with_tol(rho, 1e-9) {
            Ok(phi) => {
                let check = verify_witness(&z, &phi, s, opts.tol)?;
                if check.valid {
                    return Ok(phi);
                }
                last = format!("{:?}", check.residuals.iter().filter(|(k, _)| !k.contains('[')).collect::<Vec<_>>());
            }
            Err(e) => last = e.to_string(),
        }
    }
    Err(Error::Certification(format!("no witness state found on the extremal eigenspaces (last residuals {last})")))
}

/// One pinched piece of the search space: `V R V*` with `R ⪰ 0` on block `j`.
struct Piece {
    block: usize,
    basis: CMatrix,
}

/// Dykstra between the positive cone and the affine set `{tr R = 1, ⟨C_i, R⟩ = 0}`.
fn dykstra_witness(z: &Element, s: &Subalgebra, spaces: &ExtremalSpaces, max_sweeps: usize) -> Vec<CMatrix> {
    let mut pieces = Vec::new();
    for (j, (vp, vm)) in spaces.plus.iter().zip(&spaces.minus).enumerate() {
        for v in [vp, vm] {
            if v.ncols() > 0 {
                pieces.push(Piece { block: j, basis: v.clone() });
            }
        }
    }
    let norm = spaces.norm;
    let dims: Vec<usize> = pieces.iter().map(|p| p.basis.ncols()).collect();
    let total_dim: usize = dims.iter().sum();

    // Constraint list: trace first, then one per basis element.
    let mut constraints: Vec<Vec<CMatrix>> = vec![dims.iter().map(|&d| linalg::identity(d)).collect()];
    let mut targets = vec![1.0];
    for b in s.basis() {
        let c = &(z * b) + &(b * z);
        constraints.push(
            pieces
                .iter()
                .map(|p| {
                    let m = p.basis.adjoint() * c.block(p.block) * &p.basis / Complex64::new(norm, 0.0);
                    (&m + m.adjoint()).scale(0.5)
                })
                .collect(),
        );
        targets.push(0.0);
    }
    let inner = |x: &[CMatrix], y: &[CMatrix]| -> f64 { x.iter().zip(y).map(|(a, b)| linalg::hs_inner(a, b).re).sum() };
    let m = constraints.len();
    let gram = DMatrix::from_fn(m, m, |a, b| inner(&constraints[a], &constraints[b]));
    let gram_pinv = gram.pseudo_inverse(1e-12).unwrap_or_else(|_| DMatrix::zeros(m, m));
    let project_affine = |x: &[CMatrix]| -> Vec<CMatrix> {
        let r = DVector::from_fn(m, |a, _| inner(&constraints[a], x) - targets[a]);
        let y = &gram_pinv * r;
        let mut out = x.to_vec();
        for (a, c) in constraints.iter().enumerate() {
            for (o, ca) in out.iter_mut().zip(c) {
                *o -= ca * Complex64::new(y[a], 0.0);
            }
        }
        out
    };
    let project_psd = |x: &[CMatrix]| -> Vec<CMatrix> { x.iter().map(|r| linalg::clip_spectrum(r, 0.0, f64::INFINITY)).collect() };
    let candidate = |x: &[CMatrix]| -> (Vec<CMatrix>, f64) {
        let mut c = project_psd(x);
        let tr: f64 = c.iter().map(|r| linalg::trace(r).re).sum();
        if tr > 0.0 {
            c.iter_mut().for_each(|r| *r /= Complex64::new(tr, 0.0));
        }
        let viol = (1..m).map(|a| inner(&constraints[a], &c).abs()).fold(0.0, f64::max);
        (c, viol)
    };

    let mut r: Vec<CMatrix> =
        dims.iter().map(|&d| linalg::identity(d) / Complex64::new(total_dim.max(1) as f64, 0.0)).collect();
    let mut inc: Vec<CMatrix> = dims.iter().map(|&d| CMatrix::zeros(d, d)).collect();
    let (mut best, mut best_viol) = candidate(&r);
    let mut window_best = best_viol;
    for sweep in 1..=max_sweeps {
        if best_viol <= 1e-14 {
            break;
        }
        let x: Vec<CMatrix> = r.iter().zip(&inc).map(|(a, b)| a + b).collect();
        let p = project_psd(&x);
        inc = x.iter().zip(&p).map(|(a, b)| a - b).collect();
        r = project_affine(&p);
        if sweep % 10 == 0 {
            let (c, v) = candidate(&r);
            if v < best_viol {
                best = c;
                best_viol = v;
            }
        }
        if sweep % 2000 == 0 {
            if best_viol > 0.5 * window_best {
                break;
            }
            window_best = best_viol;
        }
    }

    let mut rho = s.algebra().zero().into_blocks();
    for (p, rr) in pieces.iter().zip(&best) {
        rho[p.block] += &p.basis * rr * p.basis.adjoint();
    }
    // Remove round-off asymmetry; the pieces are Hermitian by construction.
    rho.iter().map(|m| (m + m.adjoint()).scale(0.5)).collect()
}

/// Split a witness state into `Z`-definite vector states.
pub fn decompose_pure(phi: &StateDensity, z: &Element) -> Result<Witness> {
    decompose_pure_with(phi, z, DEFAULT_CERT_TOL)
}

pub fn decompose_pure_with(phi: &StateDensity, z: &Element, tol: f64) -> Result<Witness> {
    if phi.dims() != z.dims() {
        return Err(Error::Structural("state and element live on different algebras".into()));
    }
    let norm = z.herm_norm();
    if norm == 0.0 {
        return Err(Error::Degenerate("Z = 0".into()));
    }
    let spaces = ExtremalSpaces::new(z, EIG_TOLS[EIG_TOLS.len() - 1]);
    let (_, outside) = spaces.pinch(phi.blocks());
    if outside > tol {
        return Err(Error::Certification(format!(
            "state puts mass {outside:.3e} outside the extremal eigenspaces of Z"
        )));
    }
    let mut states = Vec::new();
    let mut signs = Vec::new();
    let mut weights = Vec::new();
    for (j, rho) in phi.blocks().iter().enumerate() {
        for (v, sign) in [(&spaces.plus[j], 1i8), (&spaces.minus[j], -1i8)] {
            if v.ncols() == 0 {
                continue;
            }
            let compressed = v.adjoint() * rho * v;
            let e = linalg::eigh(&compressed);
            for (k, &w) in e.values.iter().enumerate() {
                if w > 1e-12 {
                    states.push(PureState { block: j, vector: v * e.vector(k) });
                    signs.push(sign);
                    weights.push(w);
                }
            }
        }
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::Certification("state has no mass on the extremal eigenspaces".into()));
    }
    weights.iter_mut().for_each(|w| *w /= total);
    let mut w = Witness::new(states, signs, weights)?;
    let definiteness = w
        .pure_states
        .iter()
        .zip(&w.signs)
        .map(|(p, e)| definiteness_residual(z, p, f64::from(*e) * norm))
        .fold(0.0, f64::max)
        / norm;
    if definiteness > tol {
        return Err(Error::Certification(format!("pure state not definite on Z (residual {definiteness:.3e})")));
    }
    w.residuals.insert("mass_outside".into(), outside);
    w.residuals.insert("definiteness".into(), definiteness);
    Ok(w)
}

/// Reduce to at most `p + 1` pure states, `p = dim_ℝ(ℬ^h)`.
pub fn caratheodory_reduce(w: &Witness, s: &Subalgebra) -> Result<Witness> {
    caratheodory_reduce_with_basis(w, s.basis())
}

/// Carathéodory elimination against an explicit real basis of the constraint
/// space. The bound becomes `len(basis) + 1`.
pub fn caratheodory_reduce_with_basis(w: &Witness, basis: &[Element]) -> Result<Witness> {
    let merged = merge_duplicates(w);
    let p = basis.len();
    let mut states = merged.pure_states;
    let mut signs = merged.signs;
    let mut t = merged.weights;

    let values = |states: &[PureState], signs: &[i8]| -> DMatrix<f64> {
        DMatrix::from_fn(p + 1, states.len(), |i, j| {
            if i == p {
                1.0
            } else {
                f64::from(signs[j]) * states[j].eval(&basis[i]).re
            }
        })
    };
    let constraint = |m: &DMatrix<f64>, t: &[f64]| -> DVector<f64> { m * DVector::from_column_slice(t) };
    let start_m = values(&states, &signs);
    let start_c = constraint(&start_m, &t);

    while states.len() > p + 1 {
        let m = values(&states, &signs);
        let k = states.len();
        let mtm = m.transpose() * &m;
        let eig = SymmetricEigen::new(mtm);
        let (min_idx, min_val) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
        let scale = eig.eigenvalues.iter().fold(0.0_f64, |a, v| a.max(v.abs())).max(1.0);
        if min_val > 1e-10 * scale {
            return Err(Error::Reduction(format!(
                "no null direction among {k} states (smallest Gram eigenvalue {min_val:.3e})"
            )));
        }
        let n: Vec<f64> = eig.eigenvectors.column(min_idx).iter().copied().collect();
        // Orient so that some entry is positive; Σ n_j = 0 guarantees both signs occur.
        let n: Vec<f64> = if n.iter().cloned().fold(f64::NEG_INFINITY, f64::max) > 0.0 { n } else { n.iter().map(|x| -x).collect() };
        let mut alpha = f64::INFINITY;
        let mut drop = usize::MAX;
        for j in 0..k {
            if n[j] > 1e-14 {
                let a = t[j] / n[j];
                if a < alpha {
                    alpha = a;
                    drop = j;
                }
            }
        }
        if drop == usize::MAX {
            return Err(Error::Reduction("null direction has no positive entry".into()));
        }
        for j in 0..k {
            t[j] -= alpha * n[j];
        }
        t[drop] = 0.0;
        let keep: Vec<usize> = (0..k).filter(|&j| t[j] > 1e-15).collect();
        states = keep.iter().map(|&j| states[j].clone()).collect();
        signs = keep.iter().map(|&j| signs[j]).collect();
        t = keep.iter().map(|&j| t[j]).collect();
        let total: f64 = t.iter().sum();
        t.iter_mut().for_each(|x| *x /= total);
    }
    let end_m = values(&states, &signs);
    let end_c = constraint(&end_m, &t);
    let drift = (end_c - start_c).amax();
    let mut out = Witness::new(states, signs, t)?;
    out.residuals = w.residuals.clone();
    out.residuals.insert("reduction_drift".into(), drift);
    Ok(out)
}

/// Merge states on the same block with parallel vectors and equal signs.
fn merge_duplicates(w: &Witness) -> Witness {
    let mut states: Vec<PureState> = Vec::new();
    let mut signs: Vec<i8> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    for ((s, e), t) in w.pure_states.iter().zip(&w.signs).zip(&w.weights) {
        let found = states.iter().zip(&signs).position(|(q, f)| {
            q.block == s.block && f == e && (q.vector.dotc(&s.vector).norm() - 1.0).abs() < 1e-12
        });
        match found {
            Some(i) => weights[i] += t,
            None => {
                states.push(s.clone());
                signs.push(*e);
                weights.push(*t);
            }
        }
    }
    Witness { pure_states: states, signs, weights, residuals: w.residuals.clone() }
}

/// One-stop certificate: search, decompose, reduce, verify.
pub fn certify_minimal(z: &Element, s: &Subalgebra) -> Result<Witness> {
    let phi = find_witness(z, s)?;
    let w = decompose_pure(&phi, z)?;
    let mut w = caratheodory_reduce(&w, s)?;
    let check = w.verify(z, s, DEFAULT_CERT_TOL)?;
    if !check.valid {
        return Err(Error::Certification(format!("reduced witness failed verification: {:?}", check.residuals)));
    }
    Ok(w)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Uniqueness {
    Unique,
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct UniquenessReport {
    pub verdict: Uniqueness,
    /// Smallest eigenvalue of the Gram matrix of `φ` on ℬ.
    pub min_eig: f64,
}

/// A witness faithful on ℬ proves `0` is the only best approximation of `Z`.
pub fn uniqueness_check(z: &Element, phi: &StateDensity, s: &Subalgebra) -> Result<UniquenessReport> {
    let check = verify_witness(z, phi, s, DEFAULT_CERT_TOL)?;
    if !check.valid {
        return Err(Error::Precondition("uniqueness check needs a verified witness".into()));
    }
    let r = restrict_state(phi, s)?;
    let verdict = if r.is_faithful(FAITHFUL_TOL) { Uniqueness::Unique } else { Uniqueness::Inconclusive };
    Ok(UniquenessReport { verdict, min_eig: r.min_eig })
}

/// `ψ = Σ t_j ε_j φ_j` for a witness that has passed [`Witness::verify`].
pub fn witness_to_functional(w: &Witness, algebra: &BlockAlgebra) -> Result<HermitianFunctional> {
    if !w.is_verified(DEFAULT_CERT_TOL) {
        return Err(Error::Contract("witness has not been verified".into()));
    }
    Witness::new(w.pure_states.clone(), w.signs.clone(), w.weights.clone())?;
    w.signed_functional(algebra)
}

#[derive(Clone, Debug)]
pub struct FunctionalCheck {
    pub valid: bool,
    pub norm: f64,
    pub orthogonality: f64,
    /// `|ψ(A) − ‖A − B‖|`.
    pub attainment: f64,
}

/// `‖ψ‖ ≤ 1`, `ψ ⟂ ℬ` and `ψ(A) = ‖A − B‖` together certify that `B` is a best approximation of `A`.
pub fn verify_functional_witness(
    psi: &HermitianFunctional,
    a: &Element,
    b: &Element,
    s: &Subalgebra,
    tol: f64,
) -> Result<FunctionalCheck> {
    s.algebra().check(a)?;
    s.algebra().check(b)?;
    if psi.dims() != s.algebra().block_dims() {
        return Err(Error::Structural("functional and subalgebra live on different algebras".into()));
    }
    if !s.contains(b, 1e-8) {
        return Err(Error::Precondition("B is not in the subalgebra".into()));
    }
    let norm = psi.norm();
    let orthogonality = s.basis().iter().map(|x| psi.eval(x).norm()).fold(0.0, f64::max);
    let attainment = (psi.eval(a) - Complex64::new((a - b).norm(), 0.0)).norm();
    Ok(FunctionalCheck {
        valid: norm <= 1.0 + tol && orthogonality <= tol && attainment <= tol,
        norm,
        orthogonality,
        attainment,
    })
}

mod complex_vec {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &CVector, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = v.iter().map(|z| [z.re, z.im]).collect();
        pairs.serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<CVector, D::Error> {
        let pairs: Vec<[f64; 2]> = Vec::deserialize(de)?;
        Ok(CVector::from_iterator(pairs.len(), pairs.iter().map(|p| Complex64::new(p[0], p[1]))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c64;
    use crate::subalgebra::SubalgebraKind;

    fn flip_setup() -> (Element, Subalgebra) {
        let a = BlockAlgebra::full(2).unwrap();
        let d = Subalgebra::standard(&a, &SubalgebraKind::Diagonal).unwrap();
        (Element::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap(), d)
    }

    fn unit(x: f64, y: f64) -> CVector {
        let n = (x * x + y * y).sqrt();
        CVector::from_vec(vec![c64(x / n, 0.0), c64(y / n, 0.0)])
    }

    #[test]
    fn flip_witness_found_and_decomposed() {
        let (x, d) = flip_setup();
        let phi = find_witness(&x, &d).unwrap();
        let want = StateDensity::normalized_trace(&BlockAlgebra::full(2).unwrap());
        // ½ v₊v₊* + ½ v₋v₋* is the normalized trace here.
        assert!(linalg::max_abs_entry(&(&phi.blocks()[0] - &want.blocks()[0])) < 1e-8);
        let w = decompose_pure(&phi, &x).unwrap();
        assert_eq!(w.len(), 2);
        let mut signs = w.signs.clone();
        signs.sort();
        assert_eq!(signs, vec![-1, 1]);
        assert!(w.weights.iter().all(|t| (t - 0.5).abs() < 1e-8));
    }

    #[test]
    fn vector_state_fails_orthogonality() {
        let (x, d) = flip_setup();
        let phi = StateDensity::vector_state(d.algebra(), 0, &unit(1.0, 1.0)).unwrap();
        let check = verify_witness(&x, &phi, &d, 1e-5).unwrap();
        assert!(!check.valid);
        assert!(check.residuals["norm_attainment"] < 1e-12);
        assert!(check.residuals["orthogonality"] > 0.5);
    }

    #[test]
    fn trace_state_fails_attainment() {
        let a = BlockAlgebra::full(3).unwrap();
        let s = Subalgebra::standard(&a, &SubalgebraKind::Scalars).unwrap();
        let z = Element::new(vec![linalg::diag_real(&[1.0, 0.0, -1.0])]).unwrap();
        let check = verify_witness(&z, &StateDensity::normalized_trace(&a), &s, 1e-5).unwrap();
        assert!(!check.valid);
        assert!(check.residuals["norm_attainment"] > 0.1);
    }

    #[test]
    fn rank_one_decomposition() {
        let (x, _) = flip_setup();
        let a = BlockAlgebra::full(2).unwrap();
        let phi = StateDensity::vector_state(&a, 0, &unit(1.0, 1.0)).unwrap();
        let w = decompose_pure(&phi, &x).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w.signs, vec![1]);
        assert!((w.weights[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn duplicates_merge() {
        let a = BlockAlgebra::full(2).unwrap();
        let s = Subalgebra::standard(&a, &SubalgebraKind::Scalars).unwrap();
        let st = PureState { block: 0, vector: unit(1.0, 0.0) };
        let w = Witness::new(vec![st; 6], vec![1; 6], vec![1.0 / 6.0; 6]).unwrap();
        let r = caratheodory_reduce(&w, &s).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r.weights[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn scalar_witness_is_unique() {
        let a = BlockAlgebra::full(2).unwrap();
        let s = Subalgebra::standard(&a, &SubalgebraKind::Scalars).unwrap();
        let z = Element::new(vec![linalg::diag_real(&[2.0, -2.0])]).unwrap();
        let phi = find_witness(&z, &s).unwrap();
        let u = uniqueness_check(&z, &phi, &s).unwrap();
        assert_eq!(u.verdict, Uniqueness::Unique);
    }

    #[test]
    fn flip_functional() {
        let (x, d) = flip_setup();
        let mut w = certify_minimal(&x, &d).unwrap();
        assert!(w.verify(&x, &d, 1e-9).unwrap().valid);
        let psi = witness_to_functional(&w, d.algebra()).unwrap();
        assert!((psi.eval(&x).re - 1.0).abs() < 1e-8);
        let half_x = x.scale_real(0.5);
        assert!(linalg::max_abs_entry(&(&psi.repr()[0] - half_x.block(0))) < 1e-8);
        let zero = d.algebra().zero();
        assert!(verify_functional_witness(&psi, &x, &zero, &d, 1e-8).unwrap().valid);
    }

    #[test]
    fn unverified_witness_is_rejected() {
        let a = BlockAlgebra::full(2).unwrap();
        let w = Witness::new(vec![PureState { block: 0, vector: unit(1.0, 0.0) }], vec![1], vec![1.0]).unwrap();
        assert!(matches!(witness_to_functional(&w, &a), Err(Error::Contract(_))));
    }
}
