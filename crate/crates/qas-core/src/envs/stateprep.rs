//! Entangled-state preparation environment with a fidelity-based reward.

use num_complex::Complex64;

use super::{build_action_space, ActionSpace, Encoder, EnvError, ProblemKind, StepInfo, StepOutcome};
use crate::qsim::{run_circuit, Circuit, NoiseSpec};

#[derive(Debug, Clone)]
pub struct StatePrepConfig {
    pub num_qubits: usize,
    pub d_max: usize,
    /// Pure target state of dimension `2^num_qubits`.
    pub target: Vec<Complex64>,
    /// Success threshold on fidelity; the reward jumps to `success_reward`
    /// at or above it.
    pub fidelity_threshold: f64,
    pub success_reward: f64,
    pub noise: Option<NoiseSpec>,
    /// Known minimal gate count for the optimal-circuit flag (2 for Bell,
    /// 3 for GHZ).
    pub optimal_gate_count: Option<usize>,
}

impl StatePrepConfig {
    pub fn validate(&self) -> Result<(), EnvError> {
        if self.target.len() != 1 << self.num_qubits {
            return Err(EnvError::BadConfig(format!(
                "target has dimension {}, expected {}",
                self.target.len(),
                1 << self.num_qubits
            )));
        }
        if !(0.0 < self.fidelity_threshold && self.fidelity_threshold < 1.0) {
            return Err(EnvError::BadConfig(format!(
                "fidelity_threshold {} must lie in (0, 1)",
                self.fidelity_threshold
            )));
        }
        if self.d_max == 0 {
            return Err(EnvError::BadConfig("d_max must be positive".into()));
        }
        if let Some(noise) = &self.noise {
            noise.validate()?;
        }
        Ok(())
    }
}

/// One episode loop owns one environment; `reset` starts a new episode.
#[derive(Debug)]
pub struct StatePrepEnv {
    config: StatePrepConfig,
    space: ActionSpace,
    encoder: Encoder,
    circuit: Circuit,
    done: bool,
    succeeded: bool,
    last_fidelity: f64,
}

impl StatePrepEnv {
    pub fn new(config: StatePrepConfig) -> Result<Self, EnvError> {
        config.validate()?;
        let space = build_action_space(config.num_qubits, ProblemKind::StatePrep)?;
        let encoder = Encoder::new(
            config.d_max,
            config.num_qubits,
            ProblemKind::StatePrep.one_qubit_kinds(),
            false,
        );
        let circuit = Circuit::new(config.num_qubits);
        Ok(Self { config, space, encoder, circuit, done: false, succeeded: false, last_fidelity: 0.0 })
    }

    pub fn action_space(&self) -> &ActionSpace {
        &self.space
    }

    pub fn encoder(&self) -> &Encoder {
        &self.encoder
    }

    pub fn config(&self) -> &StatePrepConfig {
        &self.config
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn last_fidelity(&self) -> f64 {
        self.last_fidelity
    }

    pub fn reset(&mut self) -> Vec<f64> {
        self.circuit = Circuit::new(self.config.num_qubits);
        self.done = false;
        self.succeeded = false;
        self.last_fidelity = 0.0;
        self.encoded()
    }

    pub fn encoded(&self) -> Vec<f64> {
        self.encoder.encode(&self.circuit).expect("episode circuit within D_max")
    }

    /// Episode ended in the success branch of the reward.
    pub fn is_admissible(&self) -> bool {
        self.done && self.succeeded
    }

    /// Admissible and at the known minimal gate count.
    pub fn is_optimal(&self) -> bool {
        self.is_admissible()
            && self
                .config
                .optimal_gate_count
                .is_some_and(|minimal| self.circuit.len() == minimal)
    }

    pub fn step(&mut self, action: usize) -> Result<StepOutcome, EnvError> {
        if self.done {
            return Err(EnvError::EpisodeDone);
        }
        let gate = self.space.gate(action)?;
        self.circuit.push(gate)?;
        let state = run_circuit(&self.circuit, self.config.noise.as_ref())?;
        let fidelity = state.fidelity(&self.config.target)?;
        self.last_fidelity = fidelity;

        let success = fidelity >= self.config.fidelity_threshold;
        let reward = if success { self.config.success_reward } else { fidelity };
        if success {
            self.succeeded = true;
            self.done = true;
        } else if self.circuit.len() >= self.config.d_max {
            self.done = true;
        }
        Ok(StepOutcome {
            next_state: self.encoded(),
            reward,
            done: self.done,
            info: StepInfo {
                value: fidelity,
                metrics: self.circuit.metrics(),
                admissible: self.is_admissible(),
                optimal: self.is_optimal(),
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::bell_state;

    fn bell_env(noise: Option<NoiseSpec>) -> StatePrepEnv {
        StatePrepEnv::new(StatePrepConfig {
            num_qubits: 2,
            d_max: 6,
            target: bell_state(),
            fidelity_threshold: 0.98,
            success_reward: 5.0,
            noise,
            optimal_gate_count: Some(2),
        })
        .unwrap()
    }

    fn action_for(env: &StatePrepEnv, text: &str) -> usize {
        env.action_space().index_of(&text.parse().unwrap()).unwrap()
    }

    #[test]
    fn optimal_bell_episode() {
        let mut env = bell_env(None);
        env.reset();
        let h0 = action_for(&env, "H(0)");
        let cx01 = action_for(&env, "CX(0,1)");
        let out = env.step(h0).unwrap();
        // |⟨Φ+|(|00⟩+|10⟩)/√2|² = 1/4
        assert!((out.reward - 0.25).abs() < 1e-12);
        assert!(!out.done);
        let out = env.step(cx01).unwrap();
        assert_eq!(out.reward, 5.0);
        assert!(out.done);
        assert!((out.info.value - 1.0).abs() < 1e-12);
        assert!(env.is_admissible());
        assert!(env.is_optimal());
        assert!(env.step(h0).is_err());
    }

    #[test]
    fn orthogonal_state_earns_zero() {
        let mut env = bell_env(None);
        env.reset();
        let x0 = action_for(&env, "X(0)");
        let out = env.step(x0).unwrap();
        assert!(out.reward.abs() < 1e-12);
        assert!(!out.done);
    }

    #[test]
    fn admissible_but_not_optimal() {
        let mut env = bell_env(None);
        env.reset();
        for a in ["X(0)", "X(0)", "H(0)", "CX(0,1)"] {
            let idx = action_for(&env, a);
            env.step(idx).unwrap();
        }
        assert!(env.is_admissible());
        assert!(!env.is_optimal());
    }

    #[test]
    fn truncated_episode_is_not_admissible() {
        let mut env = bell_env(None);
        env.reset();
        let t1 = action_for(&env, "T(1)");
        for step in 0..6 {
            let out = env.step(t1).unwrap();
            assert_eq!(out.done, step == 5);
        }
        assert!(!env.is_admissible());
        assert!(!env.is_optimal());
        // episode length never exceeds D_max
        assert_eq!(env.circuit().len(), 6);
    }

    #[test]
    fn noisy_bell_caps_below_success_threshold_at_high_noise() {
        let mut env = bell_env(Some(NoiseSpec::new(0.3, 0.2).unwrap()));
        env.reset();
        let h0 = action_for(&env, "H(0)");
        let cx01 = action_for(&env, "CX(0,1)");
        env.step(h0).unwrap();
        let out = env.step(cx01).unwrap();
        // joint depolarizing ceiling: (1-p) + p/4 = 0.85 < 0.98 threshold
        assert!((out.info.value - 0.85).abs() < 1e-12);
        assert!(!out.done);
        assert!((out.reward - 0.85).abs() < 1e-12);
    }

    #[test]
    fn rewards_stay_in_contract_range() {
        let mut env = bell_env(None);
        env.reset();
        let mut seed = 99u64;
        for _ in 0..200 {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            let a = (seed >> 33) as usize % env.action_space().size();
            let out = env.step(a).unwrap();
            assert!(
                (0.0..=1.0).contains(&out.reward) || out.reward == 5.0,
                "reward {} outside [0,1] ∪ {{5}}",
                out.reward
            );
            if out.done {
                env.reset();
            }
        }
    }
}
