//! Nonnegative matrix factorization with an analytically optimal pairwise
//! component merge.
//!
//! The main entry point is [`pipeline::run_pipeline`]: an initial NMF is
//! augmented with extra components ([`recovery`]), refined as an
//! over-complete factorization, reduced back to the target rank by greedy
//! optimal merges ([`merge`]), and polished by a final NMF ([`solvers`]).
//! [`pipeline::improve_existing`] applies the same steps to a solution
//! obtained elsewhere.

pub mod error;
pub mod fixtures;
pub mod init;
pub mod linalg;
pub mod matrix;
pub mod merge;
pub mod metrics;
pub mod pipeline;
pub mod recovery;
pub mod solvers;

pub use error::{NmfError, Result};
pub use init::{InitKind, InitSpec};
pub use matrix::{DataMatrix, Factorization};
pub use merge::{greedy_merge, merge_pair, merge_penalty, normalize_columns, pair_statistics, MergeSolution, PairStatistics};
pub use pipeline::{improve_existing, run_pipeline, PipelineConfig, PipelineResult};
pub use solvers::{fitting_error_percent, objective, solve, Algorithm, RunTrace, SolverConfig};
