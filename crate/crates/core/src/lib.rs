//! Computable convergence theory for Bochner-integrable step-function
//! sequences on the dyadic probability space `[0, 1)`.

pub mod convergence;
pub mod dyadic;
pub mod error;
pub mod functionals;
pub mod gallery;
pub mod oscillation;
pub mod random;
pub mod seq;
pub mod stepfn;
pub mod tight;

pub use dyadic::{Dyadic, DyadicPartition, DyadicSet, Resolution};
pub use error::{Error, Result};
pub use seq::{Functional, SeqVec, SpaceKind};
pub use stepfn::{FunctionSequence, StepFunction, ValueBlock, REAL_KIND};
