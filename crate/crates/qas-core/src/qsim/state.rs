//! Statevector and density-matrix representations with exact gate action.
//!
//! Amplitude ordering is big-endian: qubit 0 is the leftmost tensor factor,
//! i.e. the most significant bit of the amplitude index. `|10⟩` on two qubits
//! is index `0b10 = 2`.

use num_complex::Complex64;

use super::gate::{GateKind, GateOp};
use super::SimError;

/// Pure statevector or mixed density matrix over `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub enum QuantumState {
    Pure { n: usize, amps: Vec<Complex64> },
    Mixed { n: usize, rho: Vec<Complex64> },
}

impl QuantumState {
    /// `|0…0⟩` as a statevector.
    pub fn zero_pure(n: usize) -> Self {
        let dim = 1 << n;
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[0] = Complex64::new(1.0, 0.0);
        QuantumState::Pure { n, amps }
    }

    /// `|0…0⟩⟨0…0|` as a density matrix.
    pub fn zero_mixed(n: usize) -> Self {
        let dim = 1 << n;
        let mut rho = vec![Complex64::new(0.0, 0.0); dim * dim];
        rho[0] = Complex64::new(1.0, 0.0);
        QuantumState::Mixed { n, rho }
    }

    /// Density matrix `|ψ⟩⟨ψ|` from a statevector.
    pub fn outer_product(n: usize, amps: &[Complex64]) -> Self {
        let dim = amps.len();
        let mut rho = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                rho[i * dim + j] = amps[i] * amps[j].conj();
            }
        }
        QuantumState::Mixed { n, rho }
    }

    pub fn num_qubits(&self) -> usize {
        match self {
            QuantumState::Pure { n, .. } | QuantumState::Mixed { n, .. } => *n,
        }
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits()
    }

    pub fn is_mixed(&self) -> bool {
        matches!(self, QuantumState::Mixed { .. })
    }

    /// Bit mask selecting qubit `q` in an amplitude index.
    fn mask(n: usize, q: usize) -> usize {
        1 << (n - 1 - q)
    }

    /// In-place `U|ψ⟩` (pure) or `UρU†` (mixed).
    pub fn apply_gate(&mut self, gate: &GateOp) -> Result<(), SimError> {
        gate.validate(self.num_qubits())?;
        match gate.kind {
            GateKind::Cx => self.apply_cx(gate.qubits[0], gate.qubits[1]),
            _ => self.apply_single(gate.qubits[0], &gate.single_qubit_matrix()),
        }
        Ok(())
    }

    fn apply_single(&mut self, q: usize, u: &[[Complex64; 2]; 2]) {
        match self {
            QuantumState::Pure { n, amps } => apply_single_vec(amps, Self::mask(*n, q), u),
            QuantumState::Mixed { n, rho } => {
                let dim = 1 << *n;
                let m = Self::mask(*n, q);
                // U rho: act on every column
                for col in 0..dim {
                    for base in strided_pairs(dim, m) {
                        let i0 = base * dim + col;
                        let i1 = (base | m) * dim + col;
                        let (a, b) = (rho[i0], rho[i1]);
                        rho[i0] = u[0][0] * a + u[0][1] * b;
                        rho[i1] = u[1][0] * a + u[1][1] * b;
                    }
                }
                // (U rho) U†: each row transforms by conj(U)
                let uc = [[u[0][0].conj(), u[0][1].conj()], [u[1][0].conj(), u[1][1].conj()]];
                for row in 0..dim {
                    let off = row * dim;
                    for base in strided_pairs(dim, m) {
                        let (a, b) = (rho[off + base], rho[off + (base | m)]);
                        rho[off + base] = uc[0][0] * a + uc[0][1] * b;
                        rho[off + (base | m)] = uc[1][0] * a + uc[1][1] * b;
                    }
                }
            }
        }
    }

    fn apply_cx(&mut self, control: usize, target: usize) {
        match self {
            QuantumState::Pure { n, amps } => {
                let (cm, tm) = (Self::mask(*n, control), Self::mask(*n, target));
                for i in 0..amps.len() {
                    if i & cm != 0 && i & tm == 0 {
                        amps.swap(i, i | tm);
                    }
                }
            }
            QuantumState::Mixed { n, rho } => {
                let dim = 1 << *n;
                let (cm, tm) = (Self::mask(*n, control), Self::mask(*n, target));
                let perm = |i: usize| if i & cm != 0 { i ^ tm } else { i };
                let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
                for i in 0..dim {
                    for j in 0..dim {
                        out[perm(i) * dim + perm(j)] = rho[i * dim + j];
                    }
                }
                *rho = out;
            }
        }
    }

    /// `|⟨target|ψ⟩|²` (pure) or `⟨target|ρ|target⟩` (mixed) against a pure target.
    pub fn fidelity(&self, target: &[Complex64]) -> Result<f64, SimError> {
        if target.len() != self.dim() {
            return Err(SimError::DimensionMismatch { expected: self.dim(), got: target.len() });
        }
        match self {
            QuantumState::Pure { amps, .. } => {
                let ip: Complex64 = target
                    .iter()
                    .zip(amps.iter())
                    .map(|(t, a)| t.conj() * a)
                    .sum();
                Ok(ip.norm_sqr())
            }
            QuantumState::Mixed { rho, .. } => {
                let dim = target.len();
                let mut acc = Complex64::new(0.0, 0.0);
                for i in 0..dim {
                    for j in 0..dim {
                        acc += target[i].conj() * rho[i * dim + j] * target[j];
                    }
                }
                Ok(acc.re)
            }
        }
    }

    pub fn trace(&self) -> Complex64 {
        match self {
            QuantumState::Pure { amps, .. } => amps.iter().map(|a| a.norm_sqr()).sum::<f64>().into(),
            QuantumState::Mixed { n, rho } => {
                let dim = 1 << *n;
                (0..dim).map(|i| rho[i * dim + i]).sum()
            }
        }
    }

    /// Structural well-formedness: unit norm (pure) or Hermitian, unit-trace,
    /// PSD within tolerance (mixed). Used by tests and the replay path.
    pub fn validate(&self) -> Result<(), SimError> {
        match self {
            QuantumState::Pure { amps, .. } => {
                let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
                if (norm - 1.0).abs() > 1e-10 {
                    return Err(SimError::InvalidState(format!("statevector norm² = {norm}")));
                }
            }
            QuantumState::Mixed { n, rho } => {
                let dim = 1 << *n;
                for i in 0..dim {
                    for j in 0..dim {
                        let d = (rho[i * dim + j] - rho[j * dim + i].conj()).norm();
                        if d > 1e-10 {
                            return Err(SimError::InvalidState(format!(
                                "hermiticity violated at ({i},{j}) by {d}"
                            )));
                        }
                    }
                }
                let tr = self.trace();
                if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
                    return Err(SimError::InvalidState(format!("trace = {tr}")));
                }
                let min = min_eigenvalue_hermitian(rho, dim);
                if min < -1e-9 {
                    return Err(SimError::InvalidState(format!("min eigenvalue = {min}")));
                }
            }
        }
        Ok(())
    }
}

/// Smallest eigenvalue of a Hermitian matrix, via the shared Jacobi routine.
fn min_eigenvalue_hermitian(rho: &[Complex64], dim: usize) -> f64 {
    let eigs = crate::pauli::hermitian_eigenvalues(rho, dim);
    eigs.into_iter().fold(f64::INFINITY, f64::min)
}

fn apply_single_vec(amps: &mut [Complex64], m: usize, u: &[[Complex64; 2]; 2]) {
    for base in strided_pairs(amps.len(), m) {
        let (a, b) = (amps[base], amps[base | m]);
        amps[base] = u[0][0] * a + u[0][1] * b;
        amps[base | m] = u[1][0] * a + u[1][1] * b;
    }
}

/// Indices with the `m` bit clear, i.e. the lower halves of all amplitude pairs.
fn strided_pairs(dim: usize, m: usize) -> impl Iterator<Item = usize> {
    (0..dim).filter(move |i| i & m == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn amp(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn hadamard_on_zero() {
        let mut s = QuantumState::zero_pure(1);
        s.apply_gate(&GateOp::h(0)).unwrap();
        match &s {
            QuantumState::Pure { amps, .. } => {
                assert!((amps[0] - amp(FRAC_1_SQRT_2)).norm() < 1e-12);
                assert!((amps[1] - amp(FRAC_1_SQRT_2)).norm() < 1e-12);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn cx_flips_target_when_control_set() {
        // |10⟩ -> |11⟩
        let mut s = QuantumState::zero_pure(2);
        s.apply_gate(&GateOp::x(0)).unwrap();
        s.apply_gate(&GateOp::cx(0, 1)).unwrap();
        let target: Vec<Complex64> = (0..4).map(|i| amp(if i == 3 { 1.0 } else { 0.0 })).collect();
        assert!((s.fidelity(&target).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bell_circuit_prepares_phi_plus() {
        let mut s = QuantumState::zero_pure(2);
        s.apply_gate(&GateOp::h(0)).unwrap();
        s.apply_gate(&GateOp::cx(0, 1)).unwrap();
        let bell = vec![amp(FRAC_1_SQRT_2), amp(0.0), amp(0.0), amp(FRAC_1_SQRT_2)];
        assert!((s.fidelity(&bell).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fidelity_reference_points() {
        let bell = vec![amp(FRAC_1_SQRT_2), amp(0.0), amp(0.0), amp(FRAC_1_SQRT_2)];
        let s = QuantumState::zero_pure(2);
        assert!((s.fidelity(&bell).unwrap() - 0.5).abs() < 1e-12);

        // maximally mixed 2-qubit state
        let dim = 4;
        let mut rho = vec![Complex64::new(0.0, 0.0); 16];
        for i in 0..dim {
            rho[i * dim + i] = amp(0.25);
        }
        let mm = QuantumState::Mixed { n: 2, rho };
        assert!((mm.fidelity(&bell).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn gate_unitarity() {
        let gates = [
            GateOp::h(0),
            GateOp::x(0),
            GateOp::y(0),
            GateOp::z(0),
            GateOp::t(0),
            GateOp::rx(0, 0.37),
            GateOp::ry(0, -1.2),
            GateOp::rz(0, 2.9),
        ];
        for g in &gates {
            let u = g.single_qubit_matrix();
            // U†U = I
            for r in 0..2 {
                for c in 0..2 {
                    let mut e = Complex64::new(0.0, 0.0);
                    for k in 0..2 {
                        e += u[k][r].conj() * u[k][c];
                    }
                    let expect = if r == c { 1.0 } else { 0.0 };
                    assert!(
                        (e - amp(expect)).norm() < 1e-12,
                        "{g}: U†U[{r}][{c}] = {e}"
                    );
                }
            }
        }
    }

    #[test]
    fn mixed_evolution_matches_outer_product_of_pure() {
        let gates = vec![
            GateOp::h(0),
            GateOp::t(1),
            GateOp::cx(0, 2),
            GateOp::ry(2, 0.81),
            GateOp::cx(2, 1),
            GateOp::z(0),
        ];
        let mut pure = QuantumState::zero_pure(3);
        let mut mixed = QuantumState::zero_mixed(3);
        for g in &gates {
            pure.apply_gate(g).unwrap();
            mixed.apply_gate(g).unwrap();
        }
        let QuantumState::Pure { amps, .. } = &pure else { unreachable!() };
        let QuantumState::Mixed { rho: want, .. } = QuantumState::outer_product(3, amps) else {
            unreachable!()
        };
        let QuantumState::Mixed { rho: got, .. } = &mixed else { unreachable!() };
        for (a, b) in want.iter().zip(got.iter()) {
            assert!((a - b).norm() < 1e-10);
        }
    }
}
