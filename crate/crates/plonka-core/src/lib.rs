//! Decomposition of finite algebras into direct systems.
//!
//! Given a finite algebra as operation tables, this library enumerates its
//! isolated subalgebras, organizes them into frames, searches sound sets of
//! Płonka homomorphisms between the complement algebras, assembles the
//! resulting direct systems, and verifies that each one composes back to the
//! input. The forward construction (building the Płonka sum of a given
//! direct system) and the partition-function characterization are included
//! as independent cross-checks.
//!
//! Pipeline entry point: [`systems::decompose`]. Document formats and
//! reports: [`format`] and [`report`].

pub mod algebra;
pub mod error;
pub mod format;
pub mod frames;
pub mod isolation;
pub mod partition;
pub mod phom;
pub mod report;
pub mod systems;

#[cfg(test)]
mod testdata;

pub use algebra::{ElemSet, ElementId, ElementMap, FiniteAlgebra, Operation};
pub use error::{Error, Result};

/// Caps on the exponential stages. The subset scan behind the isolated-family
/// enumeration is 2^n in the universe size; frame enumeration is 2^k in the
/// family size; table storage is n^arity.
#[derive(Clone, Copy, Debug)]
pub struct Limits {
    pub max_universe: usize,
    pub max_family: usize,
    pub max_arity: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_universe: 16,
            max_family: 20,
            max_arity: 3,
        }
    }
}

impl Limits {
    pub fn with_max_universe(self, max_universe: usize) -> Self {
        Limits {
            max_universe,
            ..self
        }
    }
}
