//! Overlapping temporal community detection in dynamic networks.
//!
//! Detects possibly-overlapping communities that persist across the
//! snapshots of a time-evolving network. Each snapshot's cover is encoded as
//! a symmetric matrix `Y = U Uᵀ` counting shared communities per node pair;
//! detection maximizes a weighted ℓ1 snapshot quality minus a temporal
//! smoothness cost, with the combinatorial cover constraint relaxed to a
//! trace-norm budget. The relaxation is solved by projected subgradient
//! ascent on the factors `U^t`, then rounded back to discrete covers with
//! symmetric NMF and tracked across time by mutual-best Jaccard matching.
//!
//! The crate ships the solver ([`solver`]), the objective pieces
//! ([`objective`]), discrete rounding and label tracking ([`postprocess`]),
//! synthetic generators with ground truth ([`synthgen`]), evaluation metrics
//! and a phase-transition sweep ([`eval`]), a brute-force oracle for tiny
//! instances ([`oracle`]), text formats ([`netio`]) and a batch CLI
//! ([`cli`]). See the `examples/` directory for one runnable walk-through
//! per capability.

pub mod model;
pub mod netio;
pub mod objective;

pub use model::{
    assignment_of, cover_matrix_of, trace_norm_of_cover, AssignmentMatrix, Cover, CoverMatrix,
    CoverTimeline, DynamicNetwork, FactorSet, Snapshot,
};
pub use objective::{ObjectiveConfig, WeightMatrix};
