//! Spectral independence via approximate inverses of influence matrices.
//!
//! The crate builds exact Gibbs distributions of the monomer-dimer and
//! hardcore models on small multigraphs, their influence matrices, the
//! local-block approximate inverses `Q` and `W`, the tree recursions for the
//! hardcore model, and the Glauber dynamics chain, so that every spectral
//! bound can be checked numerically against brute force.

pub mod approx_inverse;
pub mod dynamics;
pub mod error;
pub mod gibbs;
pub mod graph;
pub mod influence;
pub mod linalg;
pub mod recursions;

pub use approx_inverse::{ApproxInverse, Certificate, Variant, Verdict};
pub use dynamics::{FunctionOnStates, GlauberChain};
pub use error::{BlockOwner, Error, Result};
pub use gibbs::{GibbsOracle, ModelInstance, ModelKind, Pinning, State};
pub use influence::{Influences, LabeledMatrix};
pub use graph::{Multigraph, PathTree, RootedTree};
pub use linalg::{Matrix, Tolerances};
pub use recursions::HardcoreRecursion;
