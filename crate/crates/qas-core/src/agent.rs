//! Double deep-Q learning: ε-greedy selection, experience replay, DDQN
//! targets, smooth-L1 training steps and hard target synchronization.

use rand::RngExt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nets::{adam_step, AdamState, NetError, Network};

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("policy and target networks differ in shape")]
    MismatchedPair,
    #[error(transparent)]
    Net(#[from] NetError),
}

/// One `(s, a, r, s′, done)` record.
#[derive(Debug, Clone)]
pub struct Transition {
    pub state: Vec<f64>,
    pub action: usize,
    pub reward: f64,
    pub next_state: Vec<f64>,
    pub done: bool,
}

/// Fixed-capacity ring buffer; overwrites the oldest entry when full.
#[derive(Debug)]
pub struct ReplayBuffer {
    capacity: usize,
    storage: Vec<Transition>,
    cursor: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay buffer capacity must be positive");
        Self { capacity, storage: Vec::with_capacity(capacity.min(4096)), cursor: 0 }
    }

    pub fn push(&mut self, t: Transition) {
        if self.storage.len() < self.capacity {
            self.storage.push(t);
        } else {
            self.storage[self.cursor] = t;
        }
        self.cursor = (self.cursor + 1) % self.capacity;
    }

    pub fn len(&self) -> usize {
        self.storage.len()
    }

    pub fn is_empty(&self) -> bool {
        self.storage.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn get(&self, idx: usize) -> &Transition {
        &self.storage[idx]
    }

    /// Uniform sample (with replacement) of `batch` indices.
    pub fn sample_indices<R: RngExt + ?Sized>(&self, batch: usize, rng: &mut R) -> Vec<usize> {
        (0..batch).map(|_| rng.random_range(0..self.storage.len())).collect()
    }

    #[cfg(test)]
    fn contains_reward(&self, r: f64) -> bool {
        self.storage.iter().any(|t| t.reward == r)
    }
}

/// `ε(e) = end + (start − end)·exp(−decay_rate·e)`, nonincreasing in `e`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSchedule {
    pub start: f64,
    pub end: f64,
    pub decay_rate: f64,
}

impl EpsilonSchedule {
    pub fn epsilon_at(&self, episode: u64) -> f64 {
        self.end + (self.start - self.end) * (-self.decay_rate * episode as f64).exp()
    }
}

impl Default for EpsilonSchedule {
    fn default() -> Self {
        Self { start: 1.0, end: 0.05, decay_rate: 5.0 / 10_000.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AgentConfig {
    pub gamma: f64,
    pub lr: f64,
    pub batch_size: usize,
    pub target_sync_every: u64,
    pub buffer_capacity: usize,
    pub epsilon: EpsilonSchedule,
    /// Minimum buffer fill before training starts.
    pub train_start: usize,
}

impl Default for AgentConfig {
    fn default() -> Self {
        Self {
            gamma: 0.99,
            lr: 1e-3,
            batch_size: 64,
            target_sync_every: 100,
            buffer_capacity: 20_000,
            epsilon: EpsilonSchedule::default(),
            train_start: 500,
        }
    }
}

impl AgentConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(format!("gamma = {} must lie in [0, 1)", self.gamma));
        }
        if self.lr <= 0.0 || !self.lr.is_finite() {
            return Err(format!("lr = {} must be positive", self.lr));
        }
        if self.batch_size == 0 || self.buffer_capacity == 0 || self.target_sync_every == 0 {
            return Err("batch_size, buffer_capacity and target_sync_every must be positive".into());
        }
        if self.epsilon.start < self.epsilon.end {
            return Err(format!(
                "epsilon start {} must be >= end {}",
                self.epsilon.start, self.epsilon.end
            ));
        }
        Ok(())
    }
}

/// Policy network plus its periodically synchronized frozen copy.
#[derive(Debug, Clone)]
pub struct QPair {
    pub policy: Network,
    pub target: Network,
}

impl QPair {
    pub fn new(policy: Network) -> Self {
        let target = policy.clone();
        Self { policy, target }
    }
}

/// Greedy on `Q(state,·)` with probability `1−ε`, uniform otherwise.
/// Ties break toward the lowest index.
pub fn select_action<R: RngExt + ?Sized>(
    policy: &Network,
    state: &[f64],
    epsilon: f64,
    rng: &mut R,
) -> Result<usize, AgentError> {
    let n_actions = policy.output_len();
    if rng.random::<f64>() < epsilon {
        return Ok(rng.random_range(0..n_actions));
    }
    let q = policy.infer(state)?;
    Ok(argmax(&q))
}

pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// `y = r` on terminal transitions, else
/// `y = r + γ·Q_target(s′, argmax_a′ Q_policy(s′, a′))`. The target network
/// receives no gradient.
pub fn ddqn_targets(
    batch: &[&Transition],
    pair: &QPair,
    gamma: f64,
) -> Result<Vec<f64>, AgentError> {
    let mut out = Vec::with_capacity(batch.len());
    for t in batch {
        if t.done {
            out.push(t.reward);
        } else {
            let q_policy = pair.policy.infer(&t.next_state)?;
            let q_target = pair.target.infer(&t.next_state)?;
            out.push(t.reward + gamma * q_target[argmax(&q_policy)]);
        }
    }
    Ok(out)
}

/// Mean over the batch of `0.5d²` for `|d| < 1` and `|d| − 0.5` otherwise.
pub fn smooth_l1(prediction: &[f64], target: &[f64]) -> f64 {
    debug_assert_eq!(prediction.len(), target.len());
    let total: f64 = prediction
        .iter()
        .zip(target.iter())
        .map(|(&p, &t)| {
            let d = (p - t).abs();
            if d < 1.0 {
                0.5 * d * d
            } else {
                d - 0.5
            }
        })
        .sum();
    total / prediction.len() as f64
}

fn smooth_l1_grad(d: f64) -> f64 {
    if d.abs() < 1.0 {
        d
    } else {
        d.signum()
    }
}

/// One agent per run: owns the network pair, replay buffer, optimizer state
/// and the global training-step counter.
pub struct Agent {
    pub pair: QPair,
    pub buffer: ReplayBuffer,
    pub config: AgentConfig,
    adam: AdamState,
    train_steps: u64,
}

impl Agent {
    pub fn new(policy: Network, config: AgentConfig) -> Self {
        let adam = AdamState::new(policy.param_count(), config.lr);
        Self {
            pair: QPair::new(policy),
            buffer: ReplayBuffer::new(config.buffer_capacity),
            config,
            adam,
            train_steps: 0,
        }
    }

    pub fn train_steps(&self) -> u64 {
        self.train_steps
    }

    pub fn adam(&self) -> &AdamState {
        &self.adam
    }

    pub fn select_action<R: RngExt + ?Sized>(
        &self,
        state: &[f64],
        epsilon: f64,
        rng: &mut R,
    ) -> Result<usize, AgentError> {
        select_action(&self.pair.policy, state, epsilon, rng)
    }

    pub fn observe(&mut self, t: Transition) {
        self.buffer.push(t);
    }

    /// Samples a batch, regresses `Q_policy(s, a)` onto the DDQN targets
    /// under smooth-L1, applies one Adam step to the policy only, and hard-
    /// copies policy → target every `target_sync_every` steps. Returns the
    /// batch loss, or `None` while the buffer is below `train_start`.
    pub fn train_step<R: RngExt + ?Sized>(&mut self, rng: &mut R) -> Result<Option<f64>, AgentError> {
        if self.buffer.len() < self.config.train_start.max(1) {
            return Ok(None);
        }
        let indices = self.buffer.sample_indices(self.config.batch_size, rng);
        let batch: Vec<&Transition> = indices.iter().map(|&i| self.buffer.get(i)).collect();
        let targets = ddqn_targets(&batch, &self.pair, self.config.gamma)?;

        let mut grads = self.pair.policy.zero_grads();
        let mut predictions = Vec::with_capacity(batch.len());
        let inv_batch = 1.0 / batch.len() as f64;
        for (t, &y) in batch.iter().zip(targets.iter()) {
            let (q, cache) = self.pair.policy.forward(&t.state)?;
            let pred = q[t.action];
            predictions.push(pred);
            let mut grad_out = vec![0.0; q.len()];
            grad_out[t.action] = smooth_l1_grad(pred - y) * inv_batch;
            self.pair.policy.backward(&cache, &grad_out, &mut grads);
        }
        let loss = smooth_l1(&predictions, &targets);

        adam_step(&mut self.pair.policy, &grads, &mut self.adam)?;
        self.train_steps += 1;
        if self.train_steps % self.config.target_sync_every == 0 {
            self.pair.target.copy_parameters_from(&self.pair.policy)?;
        }
        Ok(Some(loss))
    }
}
