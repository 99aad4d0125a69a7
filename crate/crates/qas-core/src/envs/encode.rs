//! Tensor-based binary encoding of circuits into Q-network inputs.
//!
//! A circuit becomes a `D_max × (N + N_1q) × N` binary tensor, flattened in
//! (slice, row, column) order: slice `t` describes gate `t`; `CX(c→q)` sets
//! the cell at row `c`, column `q` of the leading `N × N` block; a one-qubit
//! gate of kind index `g` on qubit `q` sets row `N + g`, column `q`. The
//! chemistry variant appends one scalar, `t / D_max`, for horizon awareness.

use super::{ActionSpace, EnvError};
use crate::qsim::{Circuit, GateKind, GateOp};

#[derive(Debug, Clone)]
pub struct Encoder {
    d_max: usize,
    num_qubits: usize,
    one_qubit_kinds: Vec<GateKind>,
    time_feature: bool,
}

impl Encoder {
    pub fn new(d_max: usize, num_qubits: usize, one_qubit_kinds: &[GateKind], time_feature: bool) -> Self {
        Self { d_max, num_qubits, one_qubit_kinds: one_qubit_kinds.to_vec(), time_feature }
    }

    pub fn d_max(&self) -> usize {
        self.d_max
    }

    /// Flattened input length: `D_max · N · (N + N_1q)`, plus the optional
    /// trailing scalar.
    pub fn len(&self) -> usize {
        let n = self.num_qubits;
        self.d_max * n * (n + self.one_qubit_kinds.len()) + usize::from(self.time_feature)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn slice_len(&self) -> usize {
        self.num_qubits * (self.num_qubits + self.one_qubit_kinds.len())
    }

    pub fn encode(&self, circuit: &Circuit) -> Result<Vec<f64>, EnvError> {
        if circuit.len() > self.d_max {
            return Err(EnvError::CircuitTooLong { len: circuit.len(), max: self.d_max });
        }
        let n = self.num_qubits;
        let mut out = vec![0.0; self.len()];
        for (t, gate) in circuit.gates().iter().enumerate() {
            let base = t * self.slice_len();
            let cell = match gate.kind {
                GateKind::Cx => gate.qubits[0] * n + gate.qubits[1],
                kind => {
                    let g = self
                        .one_qubit_kinds
                        .iter()
                        .position(|&k| k == kind)
                        .ok_or_else(|| EnvError::BadEncoding(format!("{kind:?} not in gate set")))?;
                    (n + g) * n + gate.qubits[0]
                }
            };
            out[base + cell] = 1.0;
        }
        if self.time_feature {
            let last = out.len() - 1;
            out[last] = circuit.len() as f64 / self.d_max as f64;
        }
        Ok(out)
    }

    /// Inverse of [`encode`](Self::encode) up to rotation angles (which the
    /// tensor does not carry; decoded rotations get angle 0).
    pub fn decode(&self, data: &[f64], space: &ActionSpace) -> Result<Vec<GateOp>, EnvError> {
        if data.len() != self.len() {
            return Err(EnvError::BadEncoding(format!(
                "encoded length {} does not match encoder length {}",
                data.len(),
                self.len()
            )));
        }
        let n = self.num_qubits;
        let mut gates = Vec::new();
        let mut ended = false;
        for t in 0..self.d_max {
            let slice = &data[t * self.slice_len()..(t + 1) * self.slice_len()];
            let cells: Vec<usize> = slice
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != 0.0)
                .map(|(i, _)| i)
                .collect();
            match cells.len() {
                0 => ended = true,
                1 => {
                    if ended {
                        return Err(EnvError::BadEncoding(format!("gap before slice {t}")));
                    }
                    let (row, col) = (cells[0] / n, cells[0] % n);
                    let gate = if row < n {
                        GateOp::cx(row, col)
                    } else {
                        let kind = self.one_qubit_kinds[row - n];
                        GateOp {
                            kind,
                            qubits: vec![col],
                            angle: kind.is_rotation().then_some(0.0),
                        }
                    };
                    if space.index_of(&gate).is_none() {
                        return Err(EnvError::BadEncoding(format!("slice {t}: {gate} not in action space")));
                    }
                    gates.push(gate);
                }
                k => return Err(EnvError::BadEncoding(format!("slice {t} has {k} nonzero cells"))),
            }
        }
        Ok(gates)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::{build_action_space, ProblemKind};

    #[test]
    fn input_lengths_match_the_three_experiments() {
        let bell = Encoder::new(6, 2, ProblemKind::StatePrep.one_qubit_kinds(), false);
        assert_eq!(bell.len(), 84);
        let ghz = Encoder::new(12, 3, ProblemKind::StatePrep.one_qubit_kinds(), false);
        assert_eq!(ghz.len(), 288);
        let chem = Encoder::new(40, 4, ProblemKind::Chemistry.one_qubit_kinds(), true);
        assert_eq!(chem.len(), 1121);
    }

    #[test]
    fn empty_circuit_encodes_to_zeros() {
        let enc = Encoder::new(6, 2, ProblemKind::StatePrep.one_qubit_kinds(), false);
        let v = enc.encode(&Circuit::new(2)).unwrap();
        assert_eq!(v.len(), 84);
        assert!(v.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn one_nonzero_cell_per_taken_step() {
        let enc = Encoder::new(6, 2, ProblemKind::StatePrep.one_qubit_kinds(), false);
        let mut c = Circuit::new(2);
        c.push(GateOp::h(0)).unwrap();
        c.push(GateOp::cx(1, 0)).unwrap();
        let v = enc.encode(&c).unwrap();
        let slice_len = 2 * 7;
        for t in 0..6 {
            let nz = v[t * slice_len..(t + 1) * slice_len].iter().filter(|&&x| x != 0.0).count();
            assert_eq!(nz, usize::from(t < 2), "slice {t}");
        }
        // H is the 4th kind (X,Y,Z,H,T) -> row 2+3, column 0
        assert_eq!(v[(2 + 3) * 2], 1.0);
        // CX(1,0) -> row 1, column 0 of slice 1
        assert_eq!(v[slice_len + 2], 1.0);
    }

    #[test]
    fn chemistry_time_scalar_tracks_progress() {
        let enc = Encoder::new(40, 4, ProblemKind::Chemistry.one_qubit_kinds(), true);
        let mut c = Circuit::new(4);
        assert_eq!(*enc.encode(&c).unwrap().last().unwrap(), 0.0);
        c.push(GateOp::rx(0, 0.0)).unwrap();
        c.push(GateOp::cx(0, 1)).unwrap();
        assert!((enc.encode(&c).unwrap().last().unwrap() - 2.0 / 40.0).abs() < 1e-15);
    }

    #[test]
    fn decode_inverts_encode_over_the_action_space() {
        let space = build_action_space(3, ProblemKind::StatePrep).unwrap();
        let enc = Encoder::new(12, 3, ProblemKind::StatePrep.one_qubit_kinds(), false);
        // deterministic walk over many action sequences
        let mut seed = 1234567u64;
        for _ in 0..50 {
            let mut circuit = Circuit::new(3);
            let len = (seed % 13) as usize; // 0..=12
            for _ in 0..len {
                seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let a = (seed >> 33) as usize % space.size();
                circuit.push(space.gate(a).unwrap()).unwrap();
            }
            let encoded = enc.encode(&circuit).unwrap();
            let decoded = enc.decode(&encoded, &space).unwrap();
            assert_eq!(decoded, circuit.gates());
        }
    }

    #[test]
    fn too_long_circuit_is_rejected() {
        let enc = Encoder::new(2, 2, ProblemKind::StatePrep.one_qubit_kinds(), false);
        let mut c = Circuit::new(2);
        for _ in 0..3 {
            c.push(GateOp::h(0)).unwrap();
        }
        assert!(matches!(enc.encode(&c), Err(EnvError::CircuitTooLong { len: 3, max: 2 })));
    }
}
