//! Quantum architecture search engine.
//!
//! A reinforcement-learning loop constructs quantum circuits gate by gate:
//! a double deep-Q agent, whose Q-function is either a Kolmogorov-Arnold
//! network (learnable spline edges) or a multi-layer perceptron, acts in one
//! of two environments — maximally-entangled state preparation under
//! noiseless or noisy gate models, and molecular ground-state search with a
//! variational inner loop over rotation angles.
//!
//! Module map:
//! - [`qsim`] — exact statevector / density-matrix simulation,
//! - [`pauli`] — Pauli-sum Hamiltonians, ingestion and exact ground energies,
//! - [`nets`] — KAN and MLP networks, Adam, checkpoints,
//! - [`agent`] — replay buffer, ε-greedy policy, double-DQN updates,
//! - [`envs`] — the two environments, circuit encoding and the VQE inner loop,
//! - [`harness`] — experiment orchestration, metrics, logging and configs.

pub mod agent;
pub mod envs;
pub mod harness;
pub mod nets;
pub mod pauli;
pub mod qsim;
