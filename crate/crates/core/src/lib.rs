//! Exact geometry of hyperbolically embedded factors in free products.
//!
//! The group universe is a free product of base factors (free abelian,
//! cyclic, free, or given by a finite multiplication table), with elements in
//! syllable normal form. On top of it the crate builds the coned-off graph
//! (one cone vertex per coset, cone edges of length 1/4), coset projections,
//! separating and relevant cosets, traces of simplices on cosets, and the
//! extension operator taking alternating cochains on the factors to
//! G-invariant alternating cochains on the whole group. Everything is exact:
//! rational arithmetic only, finite windows for anything quantified over an
//! infinite group.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod bbf;
pub mod chain;
pub mod checks;
pub mod cochain;
pub mod coned;
mod error;
pub mod extension;
pub mod group;
pub mod rational;
pub mod reconstruction;

pub use error::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

pub use chain::{Chain, CoefficientKind, EdgeFunction, ModuleVector, OrientedEdge, Simplex};
pub use cochain::{Cochain, CochainSpec, Domain, Kernel};
pub use coned::{ConedSpace, ConedVertex, Coset, Geodesic, RelativeMetric};
pub use extension::{Extension, FamilyCochain};
pub use group::{FactorElem, FactorKind, FactorSpec, GroupElement, GroupModel, RelativeGenerators, Syllable, Window};
pub use rational::{Dist, NormSq, Rational};
