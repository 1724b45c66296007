//! Exact computation with generalized torsion elements: word calculus in
//! free products of cyclic groups, product-of-conjugates certificates,
//! counting quasimorphisms with certified scl bounds, and finitely
//! presented knot-group constructions with a budgeted triviality prover.

pub mod certificates;
pub mod error;
pub mod presentations;
pub mod quasimorphisms;
pub mod scl;
pub mod words;

pub use error::{Error, Result};
