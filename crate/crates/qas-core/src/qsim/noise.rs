//! Gate-error channels, applied by exact density-matrix evolution.
//!
//! Single-qubit gates are followed by a bit-flip channel on their qubit;
//! CX gates are followed by a depolarizing channel that with probability
//! `p_dep` replaces the joint state of both touched qubits with the
//! maximally mixed state.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::state::QuantumState;
use super::SimError;

/// Noise levels for the noisy gate model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub p_x: f64,
    pub p_dep: f64,
}

impl NoiseSpec {
    pub fn new(p_x: f64, p_dep: f64) -> Result<Self, SimError> {
        check_probability("p_x", p_x)?;
        check_probability("p_dep", p_dep)?;
        Ok(Self { p_x, p_dep })
    }

    pub fn validate(&self) -> Result<(), SimError> {
        check_probability("p_x", self.p_x)?;
        check_probability("p_dep", self.p_dep)
    }
}

fn check_probability(name: &'static str, p: f64) -> Result<(), SimError> {
    if !(0.0..=1.0).contains(&p) || !p.is_finite() {
        return Err(SimError::BadProbability { name, value: p });
    }
    Ok(())
}

/// `ρ → (1−p)ρ + p XρX` on one qubit. Kraus set `{√(1−p)·I, √p·X}`.
pub fn apply_bitflip_channel(state: &mut QuantumState, qubit: usize, p: f64) -> Result<(), SimError> {
    check_probability("p_x", p)?;
    let QuantumState::Mixed { n, rho } = state else {
        return Err(SimError::RequiresMixed("bit-flip channel"));
    };
    if qubit >= *n {
        return Err(SimError::QubitOutOfRange { qubit, num_qubits: *n });
    }
    let dim = 1 << *n;
    let m = 1 << (*n - 1 - qubit);
    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            out[i * dim + j] =
                rho[i * dim + j].scale(1.0 - p) + rho[(i ^ m) * dim + (j ^ m)].scale(p);
        }
    }
    *rho = out;
    Ok(())
}

/// `ρ → (1−p)ρ + p · (Tr_q ρ) ⊗ I/2^|q|`: with probability `p` the listed
/// qubits are jointly replaced by the maximally mixed state.
pub fn apply_depolarizing_channel(
    state: &mut QuantumState,
    qubits: &[usize],
    p: f64,
) -> Result<(), SimError> {
    check_probability("p_dep", p)?;
    let QuantumState::Mixed { n, rho } = state else {
        return Err(SimError::RequiresMixed("depolarizing channel"));
    };
    let mut group_mask = 0usize;
    for &q in qubits {
        if q >= *n {
            return Err(SimError::QubitOutOfRange { qubit: q, num_qubits: *n });
        }
        group_mask |= 1 << (*n - 1 - q);
    }
    let dim = 1 << *n;
    let k = qubits.len() as u32;
    let frac = p / f64::from(1u32 << k);

    // Enumerate the bit patterns of the replaced qubits once.
    let group_patterns: Vec<usize> = (0..dim).filter(|i| i & !group_mask == 0).collect();

    let mut out: Vec<Complex64> = rho.iter().map(|v| v.scale(1.0 - p)).collect();
    for i in 0..dim {
        for j in 0..dim {
            // (Tr_q ρ ⊗ I/2^k) is nonzero only where the replaced qubits agree.
            if i & group_mask != j & group_mask {
                continue;
            }
            let (irest, jrest) = (i & !group_mask, j & !group_mask);
            let mut partial = Complex64::new(0.0, 0.0);
            for &gp in &group_patterns {
                partial += rho[(irest | gp) * dim + (jrest | gp)];
            }
            out[i * dim + j] += partial.scale(frac);
        }
    }
    *rho = out;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::gate::GateOp;
    use num_complex::Complex64;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn amp(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn bitflip_on_zero_state() {
        let mut s = QuantumState::zero_mixed(1);
        apply_bitflip_channel(&mut s, 0, 0.1).unwrap();
        let zero = vec![amp(1.0), amp(0.0)];
        assert!((s.fidelity(&zero).unwrap() - 0.9).abs() < 1e-12);
        assert!((s.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bitflip_leaves_plus_invariant() {
        let mut s = QuantumState::zero_mixed(1);
        s.apply_gate(&GateOp::h(0)).unwrap();
        let before = s.clone();
        apply_bitflip_channel(&mut s, 0, 0.37).unwrap();
        let (QuantumState::Mixed { rho: a, .. }, QuantumState::Mixed { rho: b, .. }) = (&before, &s)
        else {
            unreachable!()
        };
        for (x, y) in a.iter().zip(b.iter()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn bitflip_certain_flip() {
        let mut s = QuantumState::zero_mixed(1);
        apply_bitflip_channel(&mut s, 0, 1.0).unwrap();
        let one = vec![amp(0.0), amp(1.0)];
        assert!((s.fidelity(&one).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn depolarizing_full_strength_gives_maximally_mixed() {
        let mut s = QuantumState::zero_mixed(2);
        s.apply_gate(&GateOp::h(0)).unwrap();
        s.apply_gate(&GateOp::cx(0, 1)).unwrap();
        apply_depolarizing_channel(&mut s, &[0, 1], 1.0).unwrap();
        let bell = vec![amp(FRAC_1_SQRT_2), amp(0.0), amp(0.0), amp(FRAC_1_SQRT_2)];
        assert!((s.fidelity(&bell).unwrap() - 0.25).abs() < 1e-12);
        let QuantumState::Mixed { rho, .. } = &s else { unreachable!() };
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 0.25 } else { 0.0 };
                assert!((rho[i * 4 + j] - amp(want)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn depolarizing_zero_strength_is_identity() {
        let mut s = QuantumState::zero_mixed(2);
        s.apply_gate(&GateOp::h(0)).unwrap();
        s.apply_gate(&GateOp::cx(0, 1)).unwrap();
        let before = s.clone();
        apply_depolarizing_channel(&mut s, &[0, 1], 0.0).unwrap();
        assert_eq!(before, s);
    }

    #[test]
    fn channels_reject_bad_probability() {
        let mut s = QuantumState::zero_mixed(1);
        assert!(apply_bitflip_channel(&mut s, 0, -0.1).is_err());
        assert!(apply_depolarizing_channel(&mut s, &[0], 1.5).is_err());
        let mut pure = QuantumState::zero_pure(1);
        assert!(apply_bitflip_channel(&mut pure, 0, 0.1).is_err());
    }
}
