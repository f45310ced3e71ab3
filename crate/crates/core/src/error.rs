use std::path::PathBuf;

use thiserror::Error;

use crate::topology::NodeId;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed topology file {path}: {detail}")]
    Parse { path: PathBuf, detail: String },

    #[error("invalid node ids: {0}")]
    InvalidIds(String),

    #[error("nodes {a} and {b} share the same position")]
    CoincidentNodes { a: NodeId, b: NodeId },

    #[error("node {node} at ({x}, {y}) lies outside [0, {area_side}] on some axis")]
    OutOfBounds {
        node: NodeId,
        x: f64,
        y: f64,
        area_side: f64,
    },

    #[error("topology has no nodes")]
    EmptyTopology,

    #[error("invalid parameters: {0}")]
    InvalidSpec(String),

    #[error("unknown node {id} (topology has {count} nodes)")]
    UnknownNode { id: NodeId, count: usize },

    #[error("topology is disconnected: node {unreachable} is unreachable")]
    Disconnected { unreachable: NodeId },

    #[error(
        "no connected topology found for seed {seed} with radius {radius} m \
         after {attempts} attempts"
    )]
    GenerationFailed {
        seed: u64,
        radius: f64,
        attempts: usize,
    },

    #[error("pairwise force requires a positive separation, got {r}")]
    NonPositiveDistance { r: f64 },

    #[error("correlation requires at least 2 samples, got {n}")]
    InsufficientSamples { n: usize },

    #[error("internal consistency error: {0}")]
    Internal(String),
}
