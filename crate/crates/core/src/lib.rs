//! Replicas of complete binary trees inside vertex subsets: exact signature
//! counting, density thresholds for monochromatic replicas, the random
//! split coloring and its single-branch equivalent, arithmetic-progression
//! replicas, and the extension to trees of higher arity.
//!
//! Everything that feeds a verdict is exact: weights are dyadic rationals,
//! signature families are materialized in full, and threshold inequalities
//! are decided by integer arithmetic rather than floating point. Randomized
//! procedures take explicit seeds and reproduce bit-for-bit.
//!
//! The `parallel` feature (on by default) runs the family sweep and the
//! Monte Carlo batches on a rayon pool; disabling it yields the same
//! results sequentially.

pub mod density;
pub mod error;
pub mod exact;
pub mod par;
pub mod rng;
pub mod sary;
pub mod signature;
pub mod split;
pub mod stats;
pub mod tree;
pub mod witness;

pub use error::{Error, Result};
pub use rng::SplitRng;
pub use signature::{Signature, SignatureFamily};
pub use tree::{DyadicWeight, TreeSubset, VertexId};
pub use witness::EmbeddingWitness;
