//! Control-based graph embeddings and contrastive learning.
//!
//! The pipeline turns a graph into a fixed-dimension feature vector built
//! from controllability statistics of leader-follower consensus dynamics
//! (`graph` + `controllability` + `embedding`), generates augmented graphs
//! that provably do not decrease the distance-based controllability lower
//! bound (`pmi` + `augment`), pretrains an encoder with the NT-Xent
//! contrastive loss (`train`), and evaluates the frozen representations by
//! linear graph classification (`eval`). TUDataset-format parsing and the
//! binary cache/checkpoint formats live in `data`.

pub mod augment;
pub mod controllability;
pub mod data;
pub mod embedding;
pub mod eval;
pub mod graph;
pub mod pmi;
pub mod rng;
pub mod synth;
pub mod train;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid leader set: {0}")]
    InvalidLeaders(String),

    /// The follower block is not positive definite, so the infinite-horizon
    /// Gramian does not converge. Signals a follower component with no leader.
    #[error("unstable follower dynamics: {0}")]
    Stability(String),

    #[error("target state outside the controllable subspace (residual {residual:.3e})")]
    UnreachableState { residual: f64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("empty dataset")]
    EmptyDataset,

    #[error("degenerate label distribution: {0}")]
    DegenerateLabels(String),

    #[error("parse error in {file}:{line}: {msg}")]
    Parse {
        file: String,
        line: usize,
        msg: String,
    },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("file format mismatch: {0}")]
    FormatMismatch(String),

    /// Final verification after an augmentation found a changed leader
    /// distance. This is a logic bug, not a user error.
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
