//! Exact simulation of few-qubit circuits: statevectors for the noiseless
//! gate model, density matrices for the noisy one, plus fidelity and
//! circuit metrics.
//!
//! Everything here is plain value semantics — no shared mutable state — so
//! independent episodes and seeds can simulate concurrently.

mod gate;
mod noise;
mod state;

pub use gate::{Circuit, CircuitMetrics, GateKind, GateOp};
pub use noise::{apply_bitflip_channel, apply_depolarizing_channel, NoiseSpec};
pub use state::QuantumState;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("qubit {qubit} out of range for {num_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("{gate}: missing rotation angle")]
    MissingAngle { gate: &'static str },
    #[error("{gate}: {detail}")]
    BadOperands { gate: &'static str, detail: String },
    #[error("{name} = {value} is not a probability")]
    BadProbability { name: &'static str, value: f64 },
    #[error("{0} requires a density matrix")]
    RequiresMixed(&'static str),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid state: {0}")]
    InvalidState(String),
}

/// Runs `circuit` from `|0…0⟩`. Without noise the state stays a pure
/// statevector; with noise it becomes a density matrix and every 1-qubit
/// gate is followed by the bit-flip channel on its qubit while every CX is
/// followed by the depolarizing channel on its two qubits.
pub fn run_circuit(circuit: &Circuit, noise: Option<&NoiseSpec>) -> Result<QuantumState, SimError> {
    match noise {
        None => {
            let mut state = QuantumState::zero_pure(circuit.num_qubits());
            for gate in circuit.gates() {
                state.apply_gate(gate)?;
            }
            Ok(state)
        }
        Some(spec) => {
            spec.validate()?;
            let mut state = QuantumState::zero_mixed(circuit.num_qubits());
            for gate in circuit.gates() {
                state.apply_gate(gate)?;
                if gate.kind.arity() == 2 {
                    apply_depolarizing_channel(&mut state, &gate.qubits, spec.p_dep)?;
                } else {
                    apply_bitflip_channel(&mut state, gate.qubits[0], spec.p_x)?;
                }
            }
            Ok(state)
        }
    }
}

/// `(|00⟩ + |11⟩)/√2`.
pub fn bell_state() -> Vec<num_complex::Complex64> {
    use num_complex::Complex64;
    use std::f64::consts::FRAC_1_SQRT_2;
    vec![
        Complex64::new(FRAC_1_SQRT_2, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(FRAC_1_SQRT_2, 0.0),
    ]
}

/// `(|0…0⟩ + |1…1⟩)/√2` on `n` qubits.
pub fn ghz_state(n: usize) -> Vec<num_complex::Complex64> {
    use num_complex::Complex64;
    use std::f64::consts::FRAC_1_SQRT_2;
    let dim = 1 << n;
    let mut v = vec![Complex64::new(0.0, 0.0); dim];
    v[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    v[dim - 1] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    v
}
