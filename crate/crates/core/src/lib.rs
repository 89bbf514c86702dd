//! Exact state-vector simulation toolkit for planted MAX-3-XORSAT spin
//! glasses: instance generation with certified brute-force ground truth, a
//! Trotterized annealing engine with an oscillating transverse-field drive,
//! the iterative seeded protocol built on it, a semi-greedy classical
//! baseline, and exponential scaling-fit analysis.
//!
//! The crate is deterministic end to end: every stochastic work item derives
//! its own counter-based RNG, so results are byte-identical across reruns and
//! across worker counts. Data-parallel execution over rayon is enabled by the
//! default `parallel` feature; disabling it leaves the same sequential kernels
//! that parallel builds fall back to at small sizes.

pub mod analysis;
pub mod classical;
pub mod engine;
pub mod error;
pub mod formats;
pub mod instance;
pub mod protocol;
pub mod util;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
