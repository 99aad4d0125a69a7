//! The two RL environments — state preparation and chemistry — with their
//! action spaces, tensor encoding, rewards and the variational inner loop.

mod action;
mod chem;
mod encode;
mod stateprep;
mod vqe;

pub use action::{build_action_space, ActionSpace, ProblemKind};
pub use chem::{ChemConfig, ChemEnv, CurriculumState, CHEMICAL_ACCURACY};
pub use encode::Encoder;
pub use stateprep::{StatePrepConfig, StatePrepEnv};
pub use vqe::{optimize_angles, InnerOptConfig};

use thiserror::Error;

use crate::nets::NetError;
use crate::pauli::PauliError;
use crate::qsim::{CircuitMetrics, SimError};

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("action {action} out of range for action space of size {size}")]
    ActionOutOfRange { action: usize, size: usize },
    #[error("episode is already done")]
    EpisodeDone,
    #[error("circuit length {len} exceeds D_max = {max}")]
    CircuitTooLong { len: usize, max: usize },
    #[error("need at least 2 qubits, got {0}")]
    TooFewQubits(usize),
    #[error("bad encoding: {0}")]
    BadEncoding(String),
    #[error("bad environment config: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Net(#[from] NetError),
}

/// What an environment hands back after one action.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub next_state: Vec<f64>,
    pub reward: f64,
    pub done: bool,
    pub info: StepInfo,
}

/// Step diagnostics, consistent with re-simulating the episode circuit.
#[derive(Debug, Clone)]
pub struct StepInfo {
    /// Fidelity (state preparation) or energy error above the exact ground
    /// state (chemistry).
    pub value: f64,
    pub metrics: CircuitMetrics,
    pub admissible: bool,
    pub optimal: bool,
}
