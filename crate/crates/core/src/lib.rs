//! Splitting Gibbs measures of three-state hard-core models on Cayley trees.
//!
//! The crate finds and classifies boundary-law fixed points of the tree
//! recursion for the `wand` and `hinge` activity graphs (translation-invariant,
//! two-class and weakly periodic patterns), locates the critical activities
//! where the number of solutions changes, and checks everything against an
//! exact enumeration of finite volumes.

pub mod error;
pub mod model;
pub mod oracle;
pub mod phase;
pub mod recursion;
pub mod sampler;
pub mod solvers;

pub use error::{Error, Result};
pub use model::{
    ActivityGraph, Configuration, FieldAssignment, FiniteVolume, ModelParams, RootDegree,
};
pub use recursion::{AgmPattern, BoundaryField, FieldVector4, FieldVector8, WeaklyPeriodicPattern};
