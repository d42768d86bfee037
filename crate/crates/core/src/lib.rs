//! λ-biased random walks on ℤᵈ: exact kernels, path combinatorics, Monte Carlo
//! estimators, and weighted spanning-tree samplers.

pub mod budget;
pub mod combinatorics;
pub mod error;
pub mod kernel;
pub mod lattice;
pub mod mc;
pub mod par;
pub mod rng;
pub mod spanning;

pub use budget::Budget;
pub use error::{Error, Result};
pub use lattice::{Lambda, Lattice, LatticePoint, StepRule};
