//! Deterministic index ↔ gate tables for the two problem families.

use serde::{Deserialize, Serialize};

use super::EnvError;
use crate::qsim::{GateKind, GateOp};

/// Which gate alphabet the environment exposes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    /// `{CX, X, Y, Z, H, T}` — non-parameterized gates.
    StatePrep,
    /// `{CX, RX, RY, RZ}` — parameterized single-qubit rotations.
    Chemistry,
}

impl ProblemKind {
    pub fn one_qubit_kinds(self) -> &'static [GateKind] {
        match self {
            ProblemKind::StatePrep => {
                &[GateKind::X, GateKind::Y, GateKind::Z, GateKind::H, GateKind::T]
            }
            ProblemKind::Chemistry => &[GateKind::Rx, GateKind::Ry, GateKind::Rz],
        }
    }
}

/// Bijective action table: all `CX(c,t)` pairs in lexicographic `(c,t)`
/// order, then one-qubit gates grouped by kind then qubit. Size is
/// `N(N−1) + N·|one_qubit_kinds|`.
#[derive(Debug, Clone)]
pub struct ActionSpace {
    num_qubits: usize,
    one_qubit_kinds: Vec<GateKind>,
    entries: Vec<(GateKind, Vec<usize>)>,
}

pub fn build_action_space(num_qubits: usize, problem: ProblemKind) -> Result<ActionSpace, EnvError> {
    if num_qubits < 2 {
        return Err(EnvError::TooFewQubits(num_qubits));
    }
    let kinds = problem.one_qubit_kinds().to_vec();
    let mut entries = Vec::with_capacity(num_qubits * (num_qubits - 1) + num_qubits * kinds.len());
    for control in 0..num_qubits {
        for target in 0..num_qubits {
            if control != target {
                entries.push((GateKind::Cx, vec![control, target]));
            }
        }
    }
    for &kind in &kinds {
        for q in 0..num_qubits {
            entries.push((kind, vec![q]));
        }
    }
    Ok(ActionSpace { num_qubits, one_qubit_kinds: kinds, entries })
}

impl ActionSpace {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn one_qubit_kinds(&self) -> &[GateKind] {
        &self.one_qubit_kinds
    }

    /// Gate template for an action index; rotations get `angle`.
    pub fn gate_with_angle(&self, action: usize, angle: f64) -> Result<GateOp, EnvError> {
        let (kind, qubits) = self
            .entries
            .get(action)
            .ok_or(EnvError::ActionOutOfRange { action, size: self.entries.len() })?;
        Ok(GateOp {
            kind: *kind,
            qubits: qubits.clone(),
            angle: kind.is_rotation().then_some(angle),
        })
    }

    /// Gate template with rotation angles defaulting to zero.
    pub fn gate(&self, action: usize) -> Result<GateOp, EnvError> {
        self.gate_with_angle(action, 0.0)
    }

    /// Inverse lookup, ignoring rotation angles.
    pub fn index_of(&self, gate: &GateOp) -> Option<usize> {
        self.entries.iter().position(|(k, q)| *k == gate.kind && q == &gate.qubits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_match_the_problem_definitions() {
        assert_eq!(build_action_space(2, ProblemKind::StatePrep).unwrap().size(), 12);
        assert_eq!(build_action_space(3, ProblemKind::StatePrep).unwrap().size(), 21);
        assert_eq!(build_action_space(4, ProblemKind::Chemistry).unwrap().size(), 24);
    }

    #[test]
    fn rejects_single_qubit_register() {
        assert!(build_action_space(1, ProblemKind::StatePrep).is_err());
    }

    #[test]
    fn index_gate_mapping_is_bijective() {
        for (n, p) in [(2, ProblemKind::StatePrep), (3, ProblemKind::StatePrep), (4, ProblemKind::Chemistry)] {
            let space = build_action_space(n, p).unwrap();
            for a in 0..space.size() {
                let g = space.gate(a).unwrap();
                assert_eq!(space.index_of(&g), Some(a));
            }
        }
    }

    #[test]
    fn ordering_is_cx_pairs_then_kind_then_qubit() {
        let space = build_action_space(2, ProblemKind::StatePrep).unwrap();
        assert_eq!(space.gate(0).unwrap(), GateOp::cx(0, 1));
        assert_eq!(space.gate(1).unwrap(), GateOp::cx(1, 0));
        assert_eq!(space.gate(2).unwrap(), GateOp::x(0));
        assert_eq!(space.gate(3).unwrap(), GateOp::x(1));
        assert_eq!(space.gate(10).unwrap(), GateOp::t(0));
        assert_eq!(space.gate(11).unwrap(), GateOp::t(1));
        assert!(space.gate(12).is_err());
    }
}
