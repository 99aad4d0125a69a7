//! Ground-state search environment: each action appends a gate, the inner
//! loop re-optimizes every rotation angle, and the reward follows the
//! three-branch shaped scheme against the exact ground energy.

use std::collections::VecDeque;

use rand::RngExt;

use super::{build_action_space, ActionSpace, Encoder, EnvError, InnerOptConfig, ProblemKind, StepInfo, StepOutcome};
use super::vqe::optimize_angles;
use crate::pauli::Hamiltonian;
use crate::qsim::{Circuit, QuantumState};

/// Chemical accuracy in Hartree.
pub const CHEMICAL_ACCURACY: f64 = 0.0016;

#[derive(Debug, Clone)]
pub struct ChemConfig {
    pub hamiltonian: Hamiltonian,
    pub d_max: usize,
    /// Error threshold (Hartree) for the success branch; the curriculum
    /// floors at this value.
    pub xi: f64,
    pub inner: InnerOptConfig,
    /// Start ξ at 10× its floor and halve on sustained success.
    pub curriculum: bool,
}

impl ChemConfig {
    pub fn validate(&self) -> Result<(), EnvError> {
        if self.xi <= 0.0 {
            return Err(EnvError::BadConfig(format!("xi = {} must be positive", self.xi)));
        }
        if self.d_max == 0 {
            return Err(EnvError::BadConfig("d_max must be positive".into()));
        }
        if self.hamiltonian.num_qubits() < 2 {
            return Err(EnvError::TooFewQubits(self.hamiltonian.num_qubits()));
        }
        Ok(())
    }
}

/// Adaptive success threshold: ξ starts at `10×` the floor and halves
/// whenever at least 20% of the last 100 episodes succeeded, never dropping
/// below the floor.
#[derive(Debug, Clone)]
pub struct CurriculumState {
    current: f64,
    floor: f64,
    window: VecDeque<bool>,
}

impl CurriculumState {
    const WINDOW: usize = 100;
    const SUCCESS_RATE: f64 = 0.2;
    const START_FACTOR: f64 = 10.0;

    fn new(floor: f64, enabled: bool) -> Self {
        let current = if enabled { floor * Self::START_FACTOR } else { floor };
        Self { current, floor, window: VecDeque::with_capacity(Self::WINDOW) }
    }

    pub fn current(&self) -> f64 {
        self.current
    }

    fn record_episode(&mut self, succeeded: bool) {
        if self.window.len() == Self::WINDOW {
            self.window.pop_front();
        }
        self.window.push_back(succeeded);
        if self.current > self.floor && self.window.len() == Self::WINDOW {
            let successes = self.window.iter().filter(|&&s| s).count();
            if successes as f64 >= Self::SUCCESS_RATE * Self::WINDOW as f64 {
                self.current = (self.current / 2.0).max(self.floor);
                self.window.clear();
            }
        }
    }
}

/// Third reward branch: progress toward the ground state, clamped at −1.
pub(crate) fn shaped_reward(prev_cost: f64, cost: f64, c_min: f64) -> f64 {
    let denom = prev_cost - c_min;
    if denom <= f64::EPSILON {
        return 0.0;
    }
    ((prev_cost - cost) / denom).max(-1.0)
}

#[derive(Debug)]
pub struct ChemEnv {
    config: ChemConfig,
    space: ActionSpace,
    encoder: Encoder,
    c_min: f64,
    vacuum_cost: f64,
    curriculum: CurriculumState,
    circuit: Circuit,
    thetas: Vec<f64>,
    prev_cost: f64,
    last_error: f64,
    done: bool,
    solved_at_floor: bool,
    succeeded_at_xi: bool,
}

impl ChemEnv {
    pub fn new(config: ChemConfig) -> Result<Self, EnvError> {
        config.validate()?;
        let n = config.hamiltonian.num_qubits();
        let space = build_action_space(n, ProblemKind::Chemistry)?;
        let encoder = Encoder::new(config.d_max, n, ProblemKind::Chemistry.one_qubit_kinds(), true);
        // C_min is recomputed from the ingested terms, never taken from config
        let c_min = config.hamiltonian.exact_ground_energy()?;
        let vacuum_cost = config.hamiltonian.expectation(&QuantumState::zero_pure(n))?;
        let curriculum = CurriculumState::new(config.xi, config.curriculum);
        let circuit = Circuit::new(n);
        Ok(Self {
            config,
            space,
            encoder,
            c_min,
            vacuum_cost,
            curriculum,
            circuit,
            thetas: Vec::new(),
            prev_cost: vacuum_cost,
            last_error: vacuum_cost - c_min,
            done: false,
            solved_at_floor: false,
            succeeded_at_xi: false,
        })
    }

    pub fn action_space(&self) -> &ActionSpace {
        &self.space
    }

    pub fn encoder(&self) -> &Encoder {
        &self.encoder
    }

    pub fn config(&self) -> &ChemConfig {
        &self.config
    }

    pub fn c_min(&self) -> f64 {
        self.c_min
    }

    pub fn curriculum(&self) -> &CurriculumState {
        &self.curriculum
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    /// Energy error of the last optimized circuit, `C_t − C_min`.
    pub fn last_error(&self) -> f64 {
        self.last_error
    }

    /// Episode reached chemical accuracy (the ξ floor), regardless of the
    /// curriculum stage that ended it.
    pub fn is_admissible(&self) -> bool {
        self.done && self.solved_at_floor
    }

    pub fn reset(&mut self) -> Vec<f64> {
        if self.done {
            self.curriculum.record_episode(self.succeeded_at_xi);
        }
        self.circuit = Circuit::new(self.config.hamiltonian.num_qubits());
        self.thetas.clear();
        self.prev_cost = self.vacuum_cost;
        self.last_error = self.vacuum_cost - self.c_min;
        self.done = false;
        self.solved_at_floor = false;
        self.succeeded_at_xi = false;
        self.encoded()
    }

    pub fn encoded(&self) -> Vec<f64> {
        self.encoder.encode(&self.circuit).expect("episode circuit within D_max")
    }

    pub fn step<R: RngExt + ?Sized>(&mut self, action: usize, rng: &mut R) -> Result<StepOutcome, EnvError> {
        if self.done {
            return Err(EnvError::EpisodeDone);
        }
        // fresh rotation parameters enter at angle zero
        let gate = self.space.gate_with_angle(action, 0.0)?;
        self.circuit.push(gate)?;
        let (thetas, cost) =
            optimize_angles(&self.circuit, &self.config.hamiltonian, &self.config.inner, Some(&self.thetas), rng)?;
        self.thetas = thetas;
        let error = cost - self.c_min;
        self.last_error = error;

        let xi = self.curriculum.current();
        let reward = if error < xi {
            self.done = true;
            self.succeeded_at_xi = true;
            self.solved_at_floor = error < self.config.xi;
            5.0
        } else if self.circuit.len() >= self.config.d_max {
            self.done = true;
            -5.0
        } else {
            shaped_reward(self.prev_cost, cost, self.c_min)
        };
        self.prev_cost = cost;

        Ok(StepOutcome {
            next_state: self.encoded(),
            reward,
            done: self.done,
            info: StepInfo {
                value: error,
                metrics: self.circuit.metrics(),
                admissible: self.is_admissible(),
                optimal: false,
            },
        })
    }
}
