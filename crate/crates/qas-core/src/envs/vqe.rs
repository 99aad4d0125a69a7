//! Variational inner loop: minimizes `⟨ψ(θ)|H|ψ(θ)⟩` over all rotation
//! angles with Adam on parameter-shift gradients.

use rand::RngExt;
use serde::{Deserialize, Serialize};

use super::EnvError;
use crate::nets::AdamState;
use crate::pauli::Hamiltonian;
use crate::qsim::{Circuit, QuantumState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InnerOptConfig {
    pub iterations: usize,
    pub lr: f64,
    pub restarts: usize,
}

impl Default for InnerOptConfig {
    fn default() -> Self {
        Self { iterations: 300, lr: 0.05, restarts: 1 }
    }
}

/// Constant-step Adam plateaus around the optimum at the step scale, so the
/// inner loop runs a travel phase at the configured rate and then anneals
/// the step geometrically to `lr × 1e-5`.
fn lr_schedule(lr: f64, iteration: usize, total: usize) -> f64 {
    let travel = (total * 3) / 5;
    if iteration < travel || total <= travel {
        return lr;
    }
    let anneal = (total - travel) as f64;
    let factor = 1e-5f64.powf((iteration - travel) as f64 / anneal);
    lr * factor
}

/// Noiseless energy of the circuit with rotation angles replaced by `thetas`.
fn energy(circuit: &Circuit, h: &Hamiltonian, thetas: &[f64]) -> Result<f64, EnvError> {
    let mut state = QuantumState::zero_pure(circuit.num_qubits());
    let mut next_theta = 0;
    for gate in circuit.gates() {
        if gate.kind.is_rotation() {
            let mut g = gate.clone();
            g.angle = Some(thetas[next_theta]);
            next_theta += 1;
            state.apply_gate(&g)?;
        } else {
            state.apply_gate(gate)?;
        }
    }
    Ok(h.expectation(&state)?)
}

/// Exact gradient via `∂C/∂θ_j = [C(θ + (π/2)e_j) − C(θ − (π/2)e_j)] / 2`.
fn parameter_shift_gradient(
    circuit: &Circuit,
    h: &Hamiltonian,
    thetas: &[f64],
) -> Result<Vec<f64>, EnvError> {
    let shift = std::f64::consts::FRAC_PI_2;
    let mut grad = Vec::with_capacity(thetas.len());
    let mut probe = thetas.to_vec();
    for j in 0..thetas.len() {
        probe[j] = thetas[j] + shift;
        let plus = energy(circuit, h, &probe)?;
        probe[j] = thetas[j] - shift;
        let minus = energy(circuit, h, &probe)?;
        probe[j] = thetas[j];
        grad.push((plus - minus) / 2.0);
    }
    Ok(grad)
}

/// Minimizes the energy over the circuit's rotation angles and returns
/// `(θ*, C(θ*))` — the best point seen across iterations and restarts, so
/// the result never exceeds the warm start's evaluated energy.
///
/// The first restart starts from `warm_start` (padded with zeros for newly
/// added gates; all-zero when absent); further restarts draw angles
/// uniformly from `[0, 2π)`.
pub fn optimize_angles<R: RngExt + ?Sized>(
    circuit: &Circuit,
    h: &Hamiltonian,
    opt: &InnerOptConfig,
    warm_start: Option<&[f64]>,
    rng: &mut R,
) -> Result<(Vec<f64>, f64), EnvError> {
    let num_params = circuit.gates().iter().filter(|g| g.kind.is_rotation()).count();
    if num_params == 0 {
        let value = energy(circuit, h, &[])?;
        return Ok((Vec::new(), value));
    }

    let mut warm = vec![0.0; num_params];
    if let Some(ws) = warm_start {
        let n = ws.len().min(num_params);
        warm[..n].copy_from_slice(&ws[..n]);
    }

    let mut best_thetas = warm.clone();
    let mut best_value = energy(circuit, h, &warm)?;
    for restart in 0..opt.restarts.max(1) {
        let mut thetas = if restart == 0 {
            warm.clone()
        } else {
            (0..num_params).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect()
        };
        let mut adam = AdamState::new(num_params, opt.lr);
        for iteration in 0..opt.iterations {
            let grad = parameter_shift_gradient(circuit, h, &thetas)?;
            adam.params.lr = lr_schedule(opt.lr, iteration, opt.iterations);
            adam.step_flat(&mut thetas, &grad)?;
            let value = energy(circuit, h, &thetas)?;
            if value < best_value {
                best_value = value;
                best_thetas = thetas.clone();
            }
        }
    }
    Ok((best_thetas, best_value))
}
