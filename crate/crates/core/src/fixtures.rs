//! Worked examples with known answers, built from integer data.

use crate::algebra::{BlockAlgebra, Element, StateDensity};
use crate::certificate::{PureState, Witness};
use crate::error::Result;
use crate::linalg::{c64, diag_real, CVector};
use crate::subalgebra::{Subalgebra, SubalgebraKind};

/// Three copies of `M_2` with the constant tuples as subalgebra.
pub fn triple_m2() -> (BlockAlgebra, Subalgebra) {
    let algebra = BlockAlgebra::tuples(2, 3).expect("valid dims");
    let s = Subalgebra::standard(&algebra, &SubalgebraKind::ConstantTuple).expect("constant tuples");
    (algebra, s)
}

fn constant(m: &[f64]) -> Element {
    Element::tuple_from_real(2, &[m, m, m]).expect("2x2 blocks")
}

fn real_vector(entries: &[f64]) -> CVector {
    let norm = entries.iter().map(|x| x * x).sum::<f64>().sqrt();
    CVector::from_iterator(entries.len(), entries.iter().map(|x| c64(x / norm, 0.0)))
}

/// Minimal element with a unique best approximation whose norm exceeds the
/// norm of the target.
#[derive(Clone, Debug)]
pub struct Badnear {
    pub algebra: BlockAlgebra,
    pub subalgebra: Subalgebra,
    /// `(diag(2, 5), [[4, −3], [−3, −4]], [[4, 3], [3, −4]])`, of norm 5.
    pub z: Element,
    /// Constant `diag(−8, 0)`.
    pub b: Element,
    /// `A = Z + B`, of norm 7.
    pub a: Element,
}

impl Badnear {
    pub fn new() -> Self {
        let (algebra, subalgebra) = triple_m2();
        let z = Element::tuple_from_real(2, &[&[2.0, 0.0, 0.0, 5.0], &[4.0, -3.0, -3.0, -4.0], &[4.0, 3.0, 3.0, -4.0]])
            .expect("2x2 blocks");
        let b = constant(&[-8.0, 0.0, 0.0, 0.0]);
        let a = &z + &b;
        Badnear { algebra, subalgebra, z, b, a }
    }

    /// Eigenvector states of `Z` at `±5`: `φ¹₊`, `φ²₊`, `φ²₋`, `φ³₊`, `φ³₋`.
    pub fn pure_states() -> [(PureState, i8); 5] {
        let ps = |block, v: &[f64]| PureState { block, vector: real_vector(v) };
        [
            (ps(0, &[0.0, 1.0]), 1),
            (ps(1, &[3.0, -1.0]), 1),
            (ps(1, &[1.0, 3.0]), -1),
            (ps(2, &[3.0, 1.0]), 1),
            (ps(2, &[1.0, -3.0]), -1),
        ]
    }

    /// `|ψ| = (8φ¹₊ + φ²₊ + 4φ²₋ + 5φ³₋)/18` with signs `(+, +, −, −)`.
    pub fn witness(&self) -> Witness {
        let states = Self::pure_states();
        let pick = [0usize, 1, 2, 4];
        Witness::new(
            pick.iter().map(|&k| states[k].0.clone()).collect(),
            pick.iter().map(|&k| states[k].1).collect(),
            vec![8.0 / 18.0, 1.0 / 18.0, 4.0 / 18.0, 5.0 / 18.0],
        )
        .expect("valid witness data")
    }

    pub fn witness_state(&self) -> StateDensity {
        self.witness().density(&self.algebra).expect("valid density")
    }

    /// Constant real symmetric matrices `{1, diag(1, −1), X}`, spanning the
    /// real part of the constant tuples' Hermitian part.
    pub fn real_basis() -> Vec<Element> {
        vec![constant(&[1.0, 0.0, 0.0, 1.0]), constant(&[1.0, 0.0, 0.0, -1.0]), constant(&[0.0, 1.0, 1.0, 0.0])]
    }

    /// All five eigenvector states with weights `(16, 1, 9, 1, 9)/36`; it
    /// annihilates [`Badnear::real_basis`] and needs reduction to at most four.
    pub fn five_state_witness() -> Witness {
        let states = Self::pure_states();
        Witness::new(
            states.iter().map(|(p, _)| p.clone()).collect(),
            states.iter().map(|(_, s)| *s).collect(),
            [16.0, 1.0, 9.0, 1.0, 9.0].iter().map(|w| w / 36.0).collect(),
        )
        .expect("valid witness data")
    }
}

impl Default for Badnear {
    fn default() -> Self {
        Self::new()
    }
}

/// `A = (1, diag(1, −1), diag(1, 0))`: every constant `diag(t, 0)` with
/// `0 ≤ t ≤ 2` is a best approximation, at distance 1.
#[derive(Clone, Debug)]
pub struct NonUnique {
    pub algebra: BlockAlgebra,
    pub subalgebra: Subalgebra,
    pub a: Element,
}

impl NonUnique {
    pub fn new() -> Self {
        let (algebra, subalgebra) = triple_m2();
        let a = Element::tuple_from_real(2, &[&[1.0, 0.0, 0.0, 1.0], &[1.0, 0.0, 0.0, -1.0], &[1.0, 0.0, 0.0, 0.0]])
            .expect("2x2 blocks");
        NonUnique { algebra, subalgebra, a }
    }

    /// Constant `diag(t, 0)`.
    pub fn candidate(t: f64) -> Element {
        constant(&[t, 0.0, 0.0, 0.0])
    }
}

impl Default for NonUnique {
    fn default() -> Self {
        Self::new()
    }
}

/// The center problem for `(E11, E22, X)` in `(M_2)^3`.
#[derive(Clone, Debug)]
pub struct Exercise {
    pub algebra: BlockAlgebra,
    pub subalgebra: Subalgebra,
    pub a: Element,
}

impl Exercise {
    pub fn new() -> Self {
        let (algebra, subalgebra) = triple_m2();
        let a = Element::tuple_from_real(2, &[&[1.0, 0.0, 0.0, 0.0], &[0.0, 0.0, 0.0, 1.0], &[0.0, 1.0, 1.0, 0.0]])
            .expect("2x2 blocks");
        Exercise { algebra, subalgebra, a }
    }

    /// Conjugation by `X` swaps the first two entries and fixes the third, so
    /// averaging a best approximation with its conjugate lands in the real span
    /// of constant `1` and `X`; these two directions suffice for a grid search.
    pub fn symmetric_directions() -> Vec<Element> {
        vec![constant(&[1.0, 0.0, 0.0, 1.0]), constant(&[0.0, 1.0, 1.0, 0.0])]
    }
}

impl Default for Exercise {
    fn default() -> Self {
        Self::new()
    }
}

/// The flip `X` against the diagonal of `M_2`, with the even mixture of its
/// `±1` eigenvector states as witness.
pub fn flip() -> Result<(Element, Subalgebra, StateDensity)> {
    let algebra = BlockAlgebra::full(2)?;
    let s = Subalgebra::standard(&algebra, &SubalgebraKind::Diagonal)?;
    let x = Element::from_real(2, &[0.0, 1.0, 1.0, 0.0])?;
    let plus = StateDensity::vector_state(&algebra, 0, &real_vector(&[1.0, 1.0]))?;
    let minus = StateDensity::vector_state(&algebra, 0, &real_vector(&[1.0, -1.0]))?;
    let phi = StateDensity::mixture(&[(0.5, plus), (0.5, minus)])?;
    Ok((x, s, phi))
}

/// `diag(a, b)` as a single-block element.
pub fn diagonal(values: &[f64]) -> Element {
    Element::new(vec![diag_real(values)]).expect("square block")
}
