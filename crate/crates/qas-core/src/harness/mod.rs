//! Experiment orchestration: config ingestion, the episode loop, interval
//! metrics, deterministic logging and cross-seed aggregation.

mod aggregate;
mod config;
mod logs;
mod run;

pub use aggregate::{aggregate_files, aggregate_summaries, Aggregate, AggregateInterval};
pub use config::{AgentSection, ChemSection, NetworkSection, Problem, RunConfig, StatePrepSection};
pub use logs::{read_summary, write_summary, EpisodeCsvWriter, CSV_HEADER};
pub use run::{
    build_network, interval_summaries, run_experiment, success_probability, BestCircuit,
    EpisodeRecord, IntervalSummary, RunOutput, RunSummary,
};

use std::path::Path;

use thiserror::Error;

use crate::agent::AgentError;
use crate::envs::EnvError;
use crate::nets::NetError;
use crate::pauli::PauliError;
use crate::qsim::{run_circuit, Circuit, CircuitMetrics, GateOp, NoiseSpec, SimError};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config invalid:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),
    #[error("io error at {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// What to measure a replayed circuit against.
pub enum ReplayTarget {
    Bell,
    Ghz,
    Hamiltonian(std::path::PathBuf),
}

/// Metrics and figure of merit from re-simulating a logged circuit.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ReplayReport {
    pub metrics: CircuitMetrics,
    /// Fidelity against the target state, when one was given.
    pub fidelity: Option<f64>,
    /// Energy, exact ground energy and error, for Hamiltonian targets.
    pub energy: Option<f64>,
    pub c_min: Option<f64>,
    pub energy_error: Option<f64>,
}

/// Re-simulates `gates` from `|0…0⟩` (noisy when `noise` is given) and
/// evaluates it against the chosen target.
pub fn replay(
    gates: Vec<GateOp>,
    num_qubits: usize,
    noise: Option<NoiseSpec>,
    target: ReplayTarget,
) -> Result<ReplayReport, HarnessError> {
    let circuit = Circuit::from_gates(num_qubits, gates)?;
    let metrics = circuit.metrics();
    let state = run_circuit(&circuit, noise.as_ref())?;
    let mut report =
        ReplayReport { metrics, fidelity: None, energy: None, c_min: None, energy_error: None };
    match target {
        ReplayTarget::Bell => {
            report.fidelity = Some(state.fidelity(&crate::qsim::bell_state())?);
        }
        ReplayTarget::Ghz => {
            report.fidelity = Some(state.fidelity(&crate::qsim::ghz_state(num_qubits))?);
        }
        ReplayTarget::Hamiltonian(path) => {
            let h = crate::pauli::Hamiltonian::from_file(path)?;
            let energy = h.expectation(&state)?;
            let c_min = h.exact_ground_energy()?;
            report.energy = Some(energy);
            report.c_min = Some(c_min);
            report.energy_error = Some(energy - c_min);
        }
    }
    Ok(report)
}

/// Parses a `;`-separated gate list, e.g. `"H(0); CX(0,1)"`.
pub fn parse_gate_list(text: &str) -> Result<Vec<GateOp>, HarnessError> {
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<GateOp>().map_err(HarnessError::from))
        .collect()
}

/// Convenience used by the CLI and tests: resolve a path relative to a base
/// directory unless it is already absolute.
pub fn resolve_path(path: &Path, base: Option<&Path>) -> std::path::PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        match base {
            Some(b) => b.join(path),
            None => path.to_path_buf(),
        }
    }
}
