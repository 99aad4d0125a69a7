//! Run configuration: JSON file sections with defaults resolved per problem
//! and network kind, validated with field-path error messages.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::agent::{AgentConfig, EpsilonSchedule};
use crate::envs::{ChemConfig, InnerOptConfig, ProblemKind, StatePrepConfig};
use crate::nets::{Activation, NetworkKind};
use crate::pauli::Hamiltonian;
use crate::qsim::NoiseSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Problem {
    Bell,
    Ghz,
    Chem,
}

impl Problem {
    pub fn default_d_max(self) -> usize {
        match self {
            Problem::Bell => 6,
            Problem::Ghz => 12,
            Problem::Chem => 40,
        }
    }

    pub fn num_qubits(self) -> usize {
        match self {
            Problem::Bell => 2,
            Problem::Ghz => 3,
            Problem::Chem => 4,
        }
    }

    pub fn kind(self) -> ProblemKind {
        match self {
            Problem::Chem => ProblemKind::Chemistry,
            _ => ProblemKind::StatePrep,
        }
    }

    /// Known minimal admissible gate count, when one is defined.
    pub fn optimal_gate_count(self) -> Option<usize> {
        match self {
            Problem::Bell => Some(2),
            Problem::Ghz => Some(3),
            Problem::Chem => None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkSection {
    pub kind: NetworkKind,
    pub shape: Vec<usize>,
    #[serde(default)]
    pub grid_size: Option<usize>,
    #[serde(default)]
    pub spline_order: Option<usize>,
    #[serde(default)]
    pub activation: Option<Activation>,
}

/// Agent hyperparameters as they appear in the file; unset fields resolve to
/// the documented defaults (lr depends on the network kind, ε decay on the
/// episode budget).
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSection {
    pub gamma: Option<f64>,
    pub lr: Option<f64>,
    pub batch_size: Option<usize>,
    pub target_sync_every: Option<u64>,
    pub buffer_capacity: Option<usize>,
    pub train_start: Option<usize>,
    pub epsilon_start: Option<f64>,
    pub epsilon_end: Option<f64>,
    pub epsilon_decay_rate: Option<f64>,
}

impl AgentSection {
    pub fn resolve(&self, kind: NetworkKind, num_episodes: u64) -> AgentConfig {
        let default_lr = match kind {
            NetworkKind::Kan => 1e-3,
            NetworkKind::Mlp => 1e-4,
        };
        let default_decay = 5.0 / (num_episodes.max(1) as f64);
        AgentConfig {
            gamma: self.gamma.unwrap_or(0.99),
            lr: self.lr.unwrap_or(default_lr),
            batch_size: self.batch_size.unwrap_or(64),
            target_sync_every: self.target_sync_every.unwrap_or(100),
            buffer_capacity: self.buffer_capacity.unwrap_or(20_000),
            train_start: self.train_start.unwrap_or(500),
            epsilon: EpsilonSchedule {
                start: self.epsilon_start.unwrap_or(1.0),
                end: self.epsilon_end.unwrap_or(0.05),
                decay_rate: self.epsilon_decay_rate.unwrap_or(default_decay),
            },
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatePrepSection {
    pub d_max: Option<usize>,
    pub fidelity_threshold: Option<f64>,
    pub success_reward: Option<f64>,
    pub noise: Option<NoiseSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChemSection {
    pub hamiltonian_path: PathBuf,
    #[serde(default)]
    pub d_max: Option<usize>,
    #[serde(default)]
    pub xi: Option<f64>,
    #[serde(default)]
    pub curriculum: Option<bool>,
    #[serde(default)]
    pub inner_iterations: Option<usize>,
    #[serde(default)]
    pub inner_lr: Option<f64>,
    #[serde(default)]
    pub inner_restarts: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub problem: Problem,
    pub network: NetworkSection,
    #[serde(default)]
    pub agent: AgentSection,
    #[serde(default)]
    pub stateprep: Option<StatePrepSection>,
    #[serde(default)]
    pub chem: Option<ChemSection>,
    pub num_episodes: u64,
    #[serde(default = "default_intervals")]
    pub intervals: usize,
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// When true, episodes.csv carries measured wall time per episode (and
    /// is no longer byte-reproducible across runs); when false the seconds
    /// column is a 0 placeholder and timing lives in summary.json only.
    #[serde(default)]
    pub log_timing: bool,
}

fn default_intervals() -> usize {
    4
}

impl RunConfig {
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, HarnessError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let config: RunConfig = serde_json::from_str(&text).map_err(|e| {
            HarnessError::Config(vec![format!("{}: {e}", path.display())])
        })?;
        Ok(config)
    }

    pub fn d_max(&self) -> usize {
        match self.problem {
            Problem::Chem => self
                .chem
                .as_ref()
                .and_then(|c| c.d_max)
                .unwrap_or_else(|| self.problem.default_d_max()),
            _ => self
                .stateprep
                .as_ref()
                .and_then(|s| s.d_max)
                .unwrap_or_else(|| self.problem.default_d_max()),
        }
    }

    /// Encoded input length implied by problem and D_max.
    pub fn input_len(&self) -> usize {
        let n = self.problem.num_qubits();
        let n1q = self.problem.kind().one_qubit_kinds().len();
        self.d_max() * n * (n + n1q) + usize::from(self.problem == Problem::Chem)
    }

    pub fn action_count(&self) -> usize {
        let n = self.problem.num_qubits();
        n * (n - 1) + n * self.problem.kind().one_qubit_kinds().len()
    }

    pub fn resolved_agent(&self) -> AgentConfig {
        self.agent.resolve(self.network.kind, self.num_episodes)
    }

    /// Full validation with one message per offending field path.
    pub fn validate(&self) -> Result<(), HarnessError> {
        let mut errors = Vec::new();
        if self.intervals == 0 {
            errors.push("intervals: must be positive".to_string());
        } else if self.num_episodes % self.intervals as u64 != 0 {
            errors.push(format!(
                "intervals: {} does not divide num_episodes = {}",
                self.intervals, self.num_episodes
            ));
        }
        if self.network.shape.len() < 2 {
            errors.push("network.shape: needs at least input and output sizes".to_string());
        } else {
            let want_in = self.input_len();
            let want_out = self.action_count();
            if self.network.shape[0] != want_in {
                errors.push(format!(
                    "network.shape[0]: {} does not match encoded input length {want_in}",
                    self.network.shape[0]
                ));
            }
            if *self.network.shape.last().unwrap() != want_out {
                errors.push(format!(
                    "network.shape[last]: {} does not match action count {want_out}",
                    self.network.shape.last().unwrap()
                ));
            }
        }
        if self.network.kind == NetworkKind::Kan {
            if self.network.grid_size == Some(0) {
                errors.push("network.grid_size: must be positive".to_string());
            }
            if self.network.spline_order == Some(0) {
                errors.push("network.spline_order: must be positive".to_string());
            }
        }
        if let Err(e) = self.resolved_agent().validate() {
            errors.push(format!("agent.{e}"));
        }
        match self.problem {
            Problem::Chem => {
                if self.chem.is_none() {
                    errors.push("chem: section required for the chem problem".to_string());
                }
                if let Some(chem) = &self.chem {
                    if chem.xi.is_some_and(|x| x <= 0.0) {
                        errors.push("chem.xi: must be positive".to_string());
                    }
                }
            }
            _ => {
                if let Some(sp) = &self.stateprep {
                    if let Some(t) = sp.fidelity_threshold {
                        if !(0.0 < t && t < 1.0) {
                            errors.push(format!("stateprep.fidelity_threshold: {t} not in (0,1)"));
                        }
                    }
                    if let Some(noise) = &sp.noise {
                        if noise.validate().is_err() {
                            errors.push(format!(
                                "stateprep.noise: probabilities ({}, {}) not in [0,1]",
                                noise.p_x, noise.p_dep
                            ));
                        }
                    }
                }
            }
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(HarnessError::Config(errors))
        }
    }

    pub fn stateprep_config(&self) -> Result<StatePrepConfig, HarnessError> {
        let section = self.stateprep.clone().unwrap_or_default();
        let target = match self.problem {
            Problem::Bell => crate::qsim::bell_state(),
            Problem::Ghz => crate::qsim::ghz_state(3),
            Problem::Chem => {
                return Err(HarnessError::Config(vec![
                    "problem: chem has no state-preparation target".to_string(),
                ]))
            }
        };
        Ok(StatePrepConfig {
            num_qubits: self.problem.num_qubits(),
            d_max: self.d_max(),
            target,
            fidelity_threshold: section.fidelity_threshold.unwrap_or(0.98),
            success_reward: section.success_reward.unwrap_or(5.0),
            noise: section.noise,
            optimal_gate_count: self.problem.optimal_gate_count(),
        })
    }

    /// Loads the Hamiltonian file and assembles the chemistry environment
    /// config, resolving the path relative to `base` when it is relative.
    pub fn chem_config(&self, base: Option<&Path>) -> Result<ChemConfig, HarnessError> {
        let Some(section) = &self.chem else {
            return Err(HarnessError::Config(vec!["chem: section missing".to_string()]));
        };
        let path = if section.hamiltonian_path.is_relative() {
            match base {
                Some(b) => b.join(&section.hamiltonian_path),
                None => section.hamiltonian_path.clone(),
            }
        } else {
            section.hamiltonian_path.clone()
        };
        let hamiltonian = Hamiltonian::from_file(&path)?;
        Ok(ChemConfig {
            hamiltonian,
            d_max: self.d_max(),
            xi: section.xi.unwrap_or(crate::envs::CHEMICAL_ACCURACY),
            inner: InnerOptConfig {
                iterations: section.inner_iterations.unwrap_or(300),
                lr: section.inner_lr.unwrap_or(0.05),
                restarts: section.inner_restarts.unwrap_or(1),
            },
            curriculum: section.curriculum.unwrap_or(true),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell_json() -> &'static str {
        r#"{
            "problem": "bell",
            "network": { "kind": "kan", "shape": [84, 2, 12], "grid_size": 5, "spline_order": 3 },
            "num_episodes": 100,
            "seed": 1
        }"#
    }

    #[test]
    fn minimal_bell_config_parses_and_validates() {
        let cfg: RunConfig = serde_json::from_str(bell_json()).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.d_max(), 6);
        assert_eq!(cfg.input_len(), 84);
        assert_eq!(cfg.action_count(), 12);
        let agent = cfg.resolved_agent();
        assert_eq!(agent.lr, 1e-3); // KAN default
        assert!((agent.epsilon.decay_rate - 0.05).abs() < 1e-15); // 5 / 100
    }

    #[test]
    fn mlp_gets_the_smaller_default_lr() {
        let cfg: RunConfig = serde_json::from_str(
            r#"{
                "problem": "ghz",
                "network": { "kind": "mlp", "shape": [288, 30, 30, 30, 21] },
                "num_episodes": 8000,
                "seed": 3
            }"#,
        )
        .unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.resolved_agent().lr, 1e-4);
    }

    #[test]
    fn validation_reports_field_paths() {
        let cfg: RunConfig = serde_json::from_str(
            r#"{
                "problem": "bell",
                "network": { "kind": "kan", "shape": [83, 2, 13] },
                "num_episodes": 10,
                "intervals": 3,
                "seed": 1
            }"#,
        )
        .unwrap();
        let Err(HarnessError::Config(errors)) = cfg.validate() else {
            panic!("expected validation failure")
        };
        assert!(errors.iter().any(|e| e.starts_with("intervals:")), "{errors:?}");
        assert!(errors.iter().any(|e| e.starts_with("network.shape[0]:")), "{errors:?}");
        assert!(errors.iter().any(|e| e.starts_with("network.shape[last]:")), "{errors:?}");
    }

    #[test]
    fn chem_requires_its_section() {
        let cfg: RunConfig = serde_json::from_str(
            r#"{
                "problem": "chem",
                "network": { "kind": "kan", "shape": [1121, 3, 3, 3, 24] },
                "num_episodes": 4,
                "intervals": 4,
                "seed": 0
            }"#,
        )
        .unwrap();
        assert_eq!(cfg.input_len(), 1121);
        assert_eq!(cfg.action_count(), 24);
        let Err(HarnessError::Config(errors)) = cfg.validate() else {
            panic!("expected validation failure")
        };
        assert!(errors.iter().any(|e| e.starts_with("chem:")));
    }
}
