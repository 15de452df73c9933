//! Level processes of permutations and samples, hook-length statistics of
//! Young shapes, the Plancherel measure, and tests of the IID hypothesis
//! built on them.
//!
//! The central reduction: a sample (or permutation) is fed through row
//! insertion; the resulting shape `λ` has Plancherel law `(f^λ)² / n!` when
//! the sample is IID from a continuous distribution, whatever that
//! distribution is. Statistics of `λ` such as `H = Σ ln hook` therefore give
//! distribution-free tests.

pub mod decomposable;
pub mod error;
pub mod exec;
pub mod lntable;
pub mod models;
pub mod plancherel;
pub mod report;
pub mod rsk;
pub mod stats;
pub mod testing;
pub mod young;

pub use error::{Error, Result};
pub use exec::{replica_rng, Exec};
pub use rsk::{
    insert_value, inverse_rsk, level_process, rank_permutation, rsk, rsk_shape, y_process,
    z_rescale, LevelProcess, Permutation, RealTableau, RskPair, ShapeBuilder,
};
pub use young::{
    hook_lengths, is_standard, log_dim, partitions_of, syt_count, BigCount, HookField, Partition,
    Partitions, StandardTableau,
};
