//! Edge classification, thin graphs and product analysis for finite idempotent algebras.

pub mod algebra;
pub mod campaign;
pub mod caps;
pub mod clone;
pub mod closure;
pub mod congruence;
pub mod context;
pub mod corpus;
pub mod edges;
pub mod error;
pub mod graph;
pub mod hs;
pub mod product;
pub mod random;
pub mod report;
pub mod structure;
pub mod term;
pub mod thin;
pub mod uniform;
pub mod verify;

pub use algebra::{FiniteAlgebra, OpTable};
pub use closure::{sg_closure, subpower_generate, Derivation, Subpower, Subuniverse};
pub use congruence::{Partition, Tolerance};
pub use error::{Error, Result};
pub use term::Term;
