//! Gate vocabulary, circuit container and depth/count metrics.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SimError;

/// The gate alphabet used by both search problems. `Cx` is the only
/// two-qubit kind; `Rx`/`Ry`/`Rz` are the only parameterized kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    T,
    Cx,
    Rx,
    Ry,
    Rz,
}

impl GateKind {
    pub fn is_rotation(self) -> bool {
        matches!(self, GateKind::Rx | GateKind::Ry | GateKind::Rz)
    }

    pub fn arity(self) -> usize {
        match self {
            GateKind::Cx => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::T => "T",
            GateKind::Cx => "CX",
            GateKind::Rx => "RX",
            GateKind::Ry => "RY",
            GateKind::Rz => "RZ",
        }
    }
}

/// One gate instance: kind, qubit operands (`[control, target]` for `Cx`)
/// and a rotation angle exactly when the kind is parameterized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateOp {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    pub angle: Option<f64>,
}

impl GateOp {
    pub fn h(q: usize) -> Self {
        Self { kind: GateKind::H, qubits: vec![q], angle: None }
    }

    pub fn x(q: usize) -> Self {
        Self { kind: GateKind::X, qubits: vec![q], angle: None }
    }

    pub fn y(q: usize) -> Self {
        Self { kind: GateKind::Y, qubits: vec![q], angle: None }
    }

    pub fn z(q: usize) -> Self {
        Self { kind: GateKind::Z, qubits: vec![q], angle: None }
    }

    pub fn t(q: usize) -> Self {
        Self { kind: GateKind::T, qubits: vec![q], angle: None }
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Self { kind: GateKind::Cx, qubits: vec![control, target], angle: None }
    }

    pub fn rotation(kind: GateKind, q: usize, angle: f64) -> Self {
        debug_assert!(kind.is_rotation());
        Self { kind, qubits: vec![q], angle: Some(angle) }
    }

    pub fn rx(q: usize, angle: f64) -> Self {
        Self::rotation(GateKind::Rx, q, angle)
    }

    pub fn ry(q: usize, angle: f64) -> Self {
        Self::rotation(GateKind::Ry, q, angle)
    }

    pub fn rz(q: usize, angle: f64) -> Self {
        Self::rotation(GateKind::Rz, q, angle)
    }

    /// Checks operand count, index bounds, operand distinctness and the
    /// angle-presence rule against a register of `num_qubits`.
    pub fn validate(&self, num_qubits: usize) -> Result<(), SimError> {
        if self.qubits.len() != self.kind.arity() {
            return Err(SimError::BadOperands {
                gate: self.kind.name(),
                detail: format!("expected {} qubit(s), got {}", self.kind.arity(), self.qubits.len()),
            });
        }
        for &q in &self.qubits {
            if q >= num_qubits {
                return Err(SimError::QubitOutOfRange { qubit: q, num_qubits });
            }
        }
        if self.qubits.len() == 2 && self.qubits[0] == self.qubits[1] {
            return Err(SimError::BadOperands {
                gate: self.kind.name(),
                detail: "control and target must be distinct".into(),
            });
        }
        match (self.kind.is_rotation(), self.angle) {
            (true, None) => Err(SimError::MissingAngle { gate: self.kind.name() }),
            (false, Some(_)) => Err(SimError::BadOperands {
                gate: self.kind.name(),
                detail: "angle supplied to a non-rotation gate".into(),
            }),
            _ => Ok(()),
        }
    }

    /// 2x2 unitary for a single-qubit kind. Convention: `T = diag(1, e^{iπ/4})`,
    /// `RP(θ) = exp(−iθP/2)`.
    pub fn single_qubit_matrix(&self) -> [[Complex64; 2]; 2] {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::i();
        match self.kind {
            GateKind::H => {
                let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
                [[s, s], [s, -s]]
            }
            GateKind::X => [[zero, one], [one, zero]],
            GateKind::Y => [[zero, -i], [i, zero]],
            GateKind::Z => [[one, zero], [zero, -one]],
            GateKind::T => [[one, zero], [zero, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)]],
            GateKind::Rx => {
                let half = self.angle.expect("rotation angle") / 2.0;
                let (c, s) = (half.cos(), half.sin());
                [[Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
                 [Complex64::new(0.0, -s), Complex64::new(c, 0.0)]]
            }
            GateKind::Ry => {
                let half = self.angle.expect("rotation angle") / 2.0;
                let (c, s) = (half.cos(), half.sin());
                [[Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
                 [Complex64::new(s, 0.0), Complex64::new(c, 0.0)]]
            }
            GateKind::Rz => {
                let half = self.angle.expect("rotation angle") / 2.0;
                [[Complex64::from_polar(1.0, -half), zero],
                 [zero, Complex64::from_polar(1.0, half)]]
            }
            GateKind::Cx => panic!("single_qubit_matrix called on CX"),
        }
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.kind, self.angle) {
            (GateKind::Cx, _) => write!(f, "CX({},{})", self.qubits[0], self.qubits[1]),
            (kind, Some(a)) => write!(f, "{}({},{})", kind.name(), self.qubits[0], a),
            (kind, None) => write!(f, "{}({})", kind.name(), self.qubits[0]),
        }
    }
}

impl FromStr for GateOp {
    type Err = SimError;

    /// Parses the `Display` form, e.g. `H(0)`, `CX(0,1)`, `RX(2,1.5708)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = |detail: &str| SimError::BadOperands { gate: "parse", detail: detail.to_string() };
        let open = s.find('(').ok_or_else(|| bad("missing '('"))?;
        if !s.ends_with(')') {
            return Err(bad("missing ')'"));
        }
        let name = s[..open].trim().to_ascii_uppercase();
        let args: Vec<&str> = s[open + 1..s.len() - 1].split(',').map(str::trim).collect();
        let kind = match name.as_str() {
            "H" => GateKind::H,
            "X" => GateKind::X,
            "Y" => GateKind::Y,
            "Z" => GateKind::Z,
            "T" => GateKind::T,
            "CX" | "CNOT" => GateKind::Cx,
            "RX" => GateKind::Rx,
            "RY" => GateKind::Ry,
            "RZ" => GateKind::Rz,
            other => return Err(SimError::BadOperands { gate: "parse", detail: format!("unknown gate `{other}`") }),
        };
        let parse_idx = |t: &str| t.parse::<usize>().map_err(|_| bad("bad qubit index"));
        match kind {
            GateKind::Cx => {
                if args.len() != 2 {
                    return Err(bad("CX takes two qubit indices"));
                }
                Ok(GateOp::cx(parse_idx(args[0])?, parse_idx(args[1])?))
            }
            k if k.is_rotation() => {
                if args.len() != 2 {
                    return Err(bad("rotations take qubit,angle"));
                }
                let angle = args[1].parse::<f64>().map_err(|_| bad("bad angle"))?;
                Ok(GateOp::rotation(k, parse_idx(args[0])?, angle))
            }
            k => {
                if args.len() != 1 {
                    return Err(bad("single-qubit gate takes one index"));
                }
                Ok(GateOp { kind: k, qubits: vec![parse_idx(args[0])?], angle: None })
            }
        }
    }
}

/// Ordered gate list over a fixed register; the artifact each RL episode builds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<GateOp>,
}

/// Depth and gate counts, with depth measured in moments under greedy
/// left-alignment: a gate joins the earliest moment where all its qubits are free.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitMetrics {
    pub depth: usize,
    pub num_gates: usize,
    pub num_2q: usize,
    pub num_1q: usize,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Self { num_qubits, gates: Vec::new() }
    }

    pub fn from_gates(num_qubits: usize, gates: Vec<GateOp>) -> Result<Self, SimError> {
        let mut c = Self::new(num_qubits);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[GateOp] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: GateOp) -> Result<(), SimError> {
        gate.validate(self.num_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn metrics(&self) -> CircuitMetrics {
        let mut qubit_frontier = vec![0usize; self.num_qubits];
        let mut depth = 0;
        let mut num_2q = 0;
        for g in &self.gates {
            let moment = g.qubits.iter().map(|&q| qubit_frontier[q]).max().unwrap_or(0);
            for &q in &g.qubits {
                qubit_frontier[q] = moment + 1;
            }
            depth = depth.max(moment + 1);
            if g.kind.arity() == 2 {
                num_2q += 1;
            }
        }
        CircuitMetrics {
            depth,
            num_gates: self.gates.len(),
            num_2q,
            num_1q: self.gates.len() - num_2q,
        }
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.gates.iter().map(|g| g.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}
