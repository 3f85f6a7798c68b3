//! Best approximation of elements of finite-dimensional C*-algebras by
//! elements of unital C*-subalgebras, with state-based optimality certificates,
//! commutator realizations of the quotient seminorm, and property checks.

pub mod algebra;
pub mod certificate;
pub mod error;
pub mod exact;
pub mod fixtures;
pub mod harness;
pub mod io;
pub mod linalg;
pub mod random;
pub mod representation;
pub mod solver;
pub mod subalgebra;

pub use algebra::{BlockAlgebra, Element, Functional, HermitianFunctional, StateDensity};
pub use error::{Error, Result};
pub use subalgebra::{Subalgebra, SubalgebraKind};
