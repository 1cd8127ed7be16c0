//! Bounds on the symmetric secure capacity of secure index coding instances.

pub mod acyclic;
pub mod bound;
pub mod chain;
pub mod error;
pub mod fixtures;
pub mod loglin;
pub mod lower;
pub mod lp;
pub mod mask;
pub mod model;
pub mod oracle;
pub mod partition;
pub mod report;
pub mod smais;
pub mod spm;

pub use bound::{BoundValue, Rational};
pub use error::{Error, Result};
pub use mask::SubsetMask;
pub use model::{Notation, Party, ProblemInstance};
pub use partition::GPartition;
