//! Pauli-sum Hamiltonians: file ingestion, expectation values and exact
//! diagonalization for ground-truth energies.
//!
//! File format (UTF-8 text): `#`-prefixed header lines may carry
//! `molecule=`, `basis=`, `mapping=`, `geometry=` keys; every body line is
//! `<float> <pauli-word>` with the word over `{I,X,Y,Z}` read left to right
//! as qubits `0..N`. The word length fixes `N`.

mod eigen;

pub use eigen::{hermitian_eigenvalues, symmetric_eigenvalues};

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qsim::QuantumState;

#[derive(Debug, Error)]
pub enum PauliError {
    #[error("io error reading {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: unknown pauli letter `{ch}`")]
    UnknownLetter { line: usize, ch: char },
    #[error("line {line}: term has {got} letters, expected {expected}")]
    InconsistentLength { line: usize, expected: usize, got: usize },
    #[error("line {line}: `{token}` is not a coefficient")]
    BadCoefficient { line: usize, token: String },
    #[error("line {line}: expected `<coefficient> <pauli-word>`")]
    MalformedLine { line: usize },
    #[error("no pauli terms found")]
    Empty,
    #[error("dimension mismatch: state has {state} qubits, hamiltonian has {hamiltonian}")]
    DimensionMismatch { state: usize, hamiltonian: usize },
    #[error("expectation has imaginary residue {0:e}")]
    ImaginaryResidue(f64),
    #[error("{qubits} qubits is too large for dense diagonalization (max 8)")]
    TooLarge { qubits: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PauliLetter {
    I,
    X,
    Y,
    Z,
}

impl PauliLetter {
    fn from_char(ch: char) -> Option<Self> {
        match ch {
            'I' => Some(PauliLetter::I),
            'X' => Some(PauliLetter::X),
            'Y' => Some(PauliLetter::Y),
            'Z' => Some(PauliLetter::Z),
            _ => None,
        }
    }

    fn to_char(self) -> char {
        match self {
            PauliLetter::I => 'I',
            PauliLetter::X => 'X',
            PauliLetter::Y => 'Y',
            PauliLetter::Z => 'Z',
        }
    }
}

/// One weighted Pauli word.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliString {
    pub coefficient: f64,
    pub letters: Vec<PauliLetter>,
}

impl PauliString {
    pub fn word(&self) -> String {
        self.letters.iter().map(|l| l.to_char()).collect()
    }
}

/// Table-I style provenance carried in the file header.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HamiltonianMetadata {
    pub molecule: String,
    pub basis: String,
    pub mapping: String,
    pub geometry: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hamiltonian {
    num_qubits: usize,
    terms: Vec<PauliString>,
    pub metadata: HamiltonianMetadata,
}

impl Hamiltonian {
    pub fn new(terms: Vec<PauliString>, metadata: HamiltonianMetadata) -> Result<Self, PauliError> {
        let Some(first) = terms.first() else {
            return Err(PauliError::Empty);
        };
        let n = first.letters.len();
        for (i, t) in terms.iter().enumerate() {
            if t.letters.len() != n {
                return Err(PauliError::InconsistentLength {
                    line: i + 1,
                    expected: n,
                    got: t.letters.len(),
                });
            }
        }
        Ok(Self { num_qubits: n, terms, metadata })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn terms(&self) -> &[PauliString] {
        &self.terms
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, PauliError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| PauliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        text.parse()
    }

    /// Serializes back to the file format; `parse ∘ serialize` preserves the
    /// term multiset and metadata.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        let meta = &self.metadata;
        for (key, value) in [
            ("molecule", &meta.molecule),
            ("basis", &meta.basis),
            ("mapping", &meta.mapping),
            ("geometry", &meta.geometry),
        ] {
            if !value.is_empty() {
                writeln!(out, "# {key}={value}").unwrap();
            }
        }
        for t in &self.terms {
            writeln!(out, "{} {}", t.coefficient, t.word()).unwrap();
        }
        out
    }

    /// `Σ_k c_k ⟨P_k⟩` on a pure or mixed state. The imaginary residue must
    /// stay below 1e-9 and is discarded.
    pub fn expectation(&self, state: &QuantumState) -> Result<f64, PauliError> {
        if state.num_qubits() != self.num_qubits {
            return Err(PauliError::DimensionMismatch {
                state: state.num_qubits(),
                hamiltonian: self.num_qubits,
            });
        }
        let n = self.num_qubits;
        let mut total = Complex64::new(0.0, 0.0);
        for term in &self.terms {
            let action = PauliAction::new(&term.letters, n);
            let value = match state {
                QuantumState::Pure { amps, .. } => {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (j, &aj) in amps.iter().enumerate() {
                        let (sigma, phase) = action.apply(j);
                        acc += amps[sigma].conj() * phase * aj;
                    }
                    acc
                }
                QuantumState::Mixed { rho, .. } => {
                    let dim = 1 << n;
                    let mut acc = Complex64::new(0.0, 0.0);
                    for i in 0..dim {
                        let (sigma, phase) = action.apply(i);
                        acc += phase * rho[i * dim + sigma];
                    }
                    acc
                }
            };
            total += value.scale(term.coefficient);
        }
        if total.im.abs() > 1e-9 {
            return Err(PauliError::ImaginaryResidue(total.im));
        }
        Ok(total.re)
    }

    /// Dense `2^N × 2^N` matrix of the full operator.
    pub fn dense_matrix(&self) -> Vec<Complex64> {
        let dim = 1usize << self.num_qubits;
        let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
        for term in &self.terms {
            let action = PauliAction::new(&term.letters, self.num_qubits);
            for j in 0..dim {
                let (sigma, phase) = action.apply(j);
                m[sigma * dim + j] += phase.scale(term.coefficient);
            }
        }
        m
    }

    /// Minimum eigenvalue of the dense matrix; the chemistry environments
    /// recompute this at run start and report all errors relative to it.
    pub fn exact_ground_energy(&self) -> Result<f64, PauliError> {
        if self.num_qubits > 8 {
            return Err(PauliError::TooLarge { qubits: self.num_qubits });
        }
        let dim = 1usize << self.num_qubits;
        let eigs = hermitian_eigenvalues(&self.dense_matrix(), dim);
        Ok(eigs[0])
    }
}

impl std::str::FromStr for Hamiltonian {
    type Err = PauliError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut metadata = HamiltonianMetadata::default();
        let mut terms: Vec<PauliString> = Vec::new();
        let mut expected_len: Option<usize> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                if let Some((key, value)) = rest.split_once('=') {
                    match key.trim() {
                        "molecule" => metadata.molecule = value.trim().to_string(),
                        "basis" => metadata.basis = value.trim().to_string(),
                        "mapping" => metadata.mapping = value.trim().to_string(),
                        "geometry" => metadata.geometry = value.trim().to_string(),
                        _ => {} // arbitrary comment
                    }
                }
                continue;
            }
            // tolerate U+2212 minus from copied tables
            let line = line.replace('\u{2212}', "-");
            let mut parts = line.split_whitespace();
            let (Some(coeff_tok), Some(word_tok), None) = (parts.next(), parts.next(), parts.next())
            else {
                return Err(PauliError::MalformedLine { line: line_no });
            };
            let coefficient: f64 = coeff_tok.parse().map_err(|_| PauliError::BadCoefficient {
                line: line_no,
                token: coeff_tok.to_string(),
            })?;
            if !coefficient.is_finite() {
                return Err(PauliError::BadCoefficient { line: line_no, token: coeff_tok.to_string() });
            }
            let mut letters = Vec::with_capacity(word_tok.len());
            for ch in word_tok.chars() {
                letters.push(
                    PauliLetter::from_char(ch).ok_or(PauliError::UnknownLetter { line: line_no, ch })?,
                );
            }
            if let Some(expected) = expected_len {
                if letters.len() != expected {
                    return Err(PauliError::InconsistentLength {
                        line: line_no,
                        expected,
                        got: letters.len(),
                    });
                }
            } else {
                expected_len = Some(letters.len());
            }
            terms.push(PauliString { coefficient, letters });
        }
        let Some(n) = expected_len else {
            return Err(PauliError::Empty);
        };
        Ok(Hamiltonian { num_qubits: n, terms, metadata })
    }
}

/// Precomputed signed-permutation action of one Pauli word on basis states:
/// `P|j⟩ = phase(j) |j ^ flip_mask⟩`.
struct PauliAction {
    flip_mask: usize,
    z_mask: usize,
    y_mask: usize,
    y_count: u32,
}

impl PauliAction {
    fn new(letters: &[PauliLetter], n: usize) -> Self {
        let mut flip_mask = 0usize;
        let mut z_mask = 0usize;
        let mut y_mask = 0usize;
        let mut y_count = 0u32;
        for (q, &l) in letters.iter().enumerate() {
            let bit = 1usize << (n - 1 - q);
            match l {
                PauliLetter::I => {}
                PauliLetter::X => flip_mask |= bit,
                PauliLetter::Y => {
                    flip_mask |= bit;
                    y_mask |= bit;
                    y_count += 1;
                }
                PauliLetter::Z => z_mask |= bit,
            }
        }
        Self { flip_mask, z_mask, y_mask, y_count }
    }

    #[inline]
    fn apply(&self, j: usize) -> (usize, Complex64) {
        // Z contributes (−1)^bit; Y contributes i·(−1)^bit on top of the flip.
        let minus_ones = ((j & self.z_mask).count_ones() + (j & self.y_mask).count_ones()) & 1;
        let phase = match (self.y_count % 4, minus_ones) {
            (0, 0) => Complex64::new(1.0, 0.0),
            (0, 1) => Complex64::new(-1.0, 0.0),
            (1, 0) => Complex64::new(0.0, 1.0),
            (1, 1) => Complex64::new(0.0, -1.0),
            (2, 0) => Complex64::new(-1.0, 0.0),
            (2, 1) => Complex64::new(1.0, 0.0),
            (3, 0) => Complex64::new(0.0, -1.0),
            (3, 1) => Complex64::new(0.0, 1.0),
            _ => unreachable!(),
        };
        (j ^ self.flip_mask, phase)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::{Circuit, GateOp};

    #[test]
    fn parse_single_term() {
        let h: Hamiltonian = "1.0 ZZZZ".parse().unwrap();
        assert_eq!(h.num_qubits(), 4);
        assert_eq!(h.terms().len(), 1);
    }

    #[test]
    fn parse_two_terms_with_unicode_minus() {
        let h: Hamiltonian = "\u{2212}0.5 IIII\n0.25 XXYY\n".parse().unwrap();
        assert_eq!(h.terms().len(), 2);
        assert_eq!(h.terms()[0].coefficient, -0.5);
    }

    #[test]
    fn parse_rejects_bad_lines() {
        assert!(matches!(
            "1.0 ZZQZ".parse::<Hamiltonian>(),
            Err(PauliError::UnknownLetter { line: 1, ch: 'Q' })
        ));
        assert!(matches!(
            "1.0 ZZ\n0.5 ZZZ".parse::<Hamiltonian>(),
            Err(PauliError::InconsistentLength { line: 2, .. })
        ));
        assert!(matches!(
            "abc ZZ".parse::<Hamiltonian>(),
            Err(PauliError::BadCoefficient { line: 1, .. })
        ));
        assert!(matches!("# only header".parse::<Hamiltonian>(), Err(PauliError::Empty)));
    }

    #[test]
    fn expectation_z_eigenstate() {
        let h: Hamiltonian = "1.0 Z".parse().unwrap();
        let s = QuantumState::zero_pure(1);
        assert!((h.expectation(&s).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn expectation_off_diagonal() {
        let h: Hamiltonian = "1.0 X".parse().unwrap();
        let s = QuantumState::zero_pure(1);
        assert!(h.expectation(&s).unwrap().abs() < 1e-12);
    }

    #[test]
    fn expectation_matches_dense_quadratic_form() {
        let h: Hamiltonian = "0.7 XYZ\n-0.3 ZZI\n0.11 YIY\n1.9 IXI\n-0.05 XXX".parse().unwrap();
        let circuit = Circuit::from_gates(
            3,
            vec![GateOp::h(0), GateOp::ry(1, 0.7), GateOp::cx(0, 2), GateOp::t(2), GateOp::rz(0, -0.4)],
        )
        .unwrap();
        let state = crate::qsim::run_circuit(&circuit, None).unwrap();
        let QuantumState::Pure { amps, .. } = &state else { unreachable!() };
        let dense = h.dense_matrix();
        let dim = 8;
        let mut want = Complex64::new(0.0, 0.0);
        for i in 0..dim {
            for j in 0..dim {
                want += amps[i].conj() * dense[i * dim + j] * amps[j];
            }
        }
        let got = h.expectation(&state).unwrap();
        assert!((got - want.re).abs() < 1e-10);
        assert!(want.im.abs() < 1e-10);
    }

    #[test]
    fn pure_and_outer_product_expectations_agree() {
        let h: Hamiltonian = "0.4 XY\n0.6 ZZ\n-0.2 YX".parse().unwrap();
        let circuit =
            Circuit::from_gates(2, vec![GateOp::h(0), GateOp::t(0), GateOp::cx(0, 1)]).unwrap();
        let state = crate::qsim::run_circuit(&circuit, None).unwrap();
        let QuantumState::Pure { amps, .. } = &state else { unreachable!() };
        let mixed = QuantumState::outer_product(2, amps);
        let a = h.expectation(&state).unwrap();
        let b = h.expectation(&mixed).unwrap();
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn ground_energy_identity_and_z() {
        let h: Hamiltonian = "2.5 III".parse().unwrap();
        assert!((h.exact_ground_energy().unwrap() - 2.5).abs() < 1e-10);
        let z: Hamiltonian = "1.0 Z".parse().unwrap();
        assert!((z.exact_ground_energy().unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn roundtrip_preserves_terms_and_metadata() {
        let text = "# molecule=H2\n# basis=sto-3g\n# mapping=jordan-wigner\n# geometry=H (0,0,-0.35); H (0,0,0.35)\n0.5 XX\n-0.25 ZI\n";
        let h: Hamiltonian = text.parse().unwrap();
        let h2: Hamiltonian = h.to_file_string().parse().unwrap();
        assert_eq!(h, h2);
        assert_eq!(h2.metadata.molecule, "H2");
        assert_eq!(h2.metadata.geometry, "H (0,0,-0.35); H (0,0,0.35)");
    }

    /// Independent check of the minimum eigenvalue: power iteration on
    /// `σI − H` converges to the smallest eigenvalue of `H`.
    fn power_iteration_min(h: &Hamiltonian) -> f64 {
        let dim = 1usize << h.num_qubits();
        let m = h.dense_matrix();
        let sigma: f64 = h.terms().iter().map(|t| t.coefficient.abs()).sum::<f64>() + 1.0;
        let mut v: Vec<Complex64> =
            (0..dim).map(|i| Complex64::new(1.0 + (i % 5) as f64, (i % 3) as f64)).collect();
        for _ in 0..60_000 {
            let mut w = vec![Complex64::new(0.0, 0.0); dim];
            for i in 0..dim {
                let mut acc = v[i].scale(sigma);
                for j in 0..dim {
                    acc -= m[i * dim + j] * v[j];
                }
                w[i] = acc;
            }
            let norm = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            for x in &mut w {
                *x = x.unscale(norm);
            }
            v = w;
        }
        let mut rayleigh = Complex64::new(0.0, 0.0);
        for i in 0..dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..dim {
                acc += m[i * dim + j] * v[j];
            }
            rayleigh += v[i].conj() * acc;
        }
        rayleigh.re
    }

    #[test]
    fn bundled_h2_file_ground_energy_matches_power_iteration_oracle() {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/h2_sto3g_jw_4q.txt");
        let h = Hamiltonian::from_file(path).unwrap();
        assert_eq!(h.num_qubits(), 4);
        assert_eq!(h.metadata.molecule, "H2");
        assert_eq!(h.metadata.mapping, "jordan-wigner");
        let jacobi = h.exact_ground_energy().unwrap();
        let oracle = power_iteration_min(&h);
        assert!(
            (jacobi - oracle).abs() < 1e-8,
            "jacobi {jacobi} vs power-iteration {oracle}"
        );
        // physically sensible window for this system
        assert!(jacobi < -1.0 && jacobi > -1.5, "ground energy {jacobi}");
    }
}
