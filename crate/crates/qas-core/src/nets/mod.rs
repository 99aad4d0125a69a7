//! Kolmogorov-Arnold and perceptron Q-networks behind one
//! forward/backward/parameter interface, with Adam and checkpointing.

mod adam;
mod checkpoint;
mod init;
mod kan;
mod mlp;
mod network;
mod spline;

pub use adam::{adam_step, AdamParams, AdamState};
pub use checkpoint::{decode, encode, load_checkpoint, save_checkpoint};
pub use kan::{KanLayer, KanLayerCache, KanLayerGrads};
pub use mlp::{Activation, MlpLayer, MlpLayerCache, MlpLayerGrads};
pub use network::{
    kan_param_count, mlp_param_count, KanSettings, Layer, LayerCache, LayerGrads, Network,
    NetworkCache, NetworkGrads, NetworkKind,
};
pub use spline::{silu, silu_deriv, SplineGrid};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NetError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("bad network shape: {0}")]
    BadShape(String),
    #[error("bad spline grid: {0}")]
    BadGrid(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("checkpoint io at {path}: {source}")]
    CheckpointIo { path: String, source: std::io::Error },
    #[error("not a checkpoint file (bad magic)")]
    BadMagic,
    #[error("unsupported checkpoint version {0}")]
    UnsupportedVersion(u32),
    #[error("corrupt checkpoint: {0}")]
    Corrupt(String),
}
