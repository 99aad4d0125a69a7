//! Browser demo bindings: interactive circuit simulation under gate noise,
//! B-spline basis / KAN edge-function curves, and parameter counting.
//!
//! Build with `wasm-pack build --target web` and open `www/index.html`.
//! The `demo` module holds the plain-Rust logic (testable on any host); the
//! exported wrappers only translate errors into `JsValue`.

use wasm_bindgen::prelude::*;

pub mod demo {
    use qas_core::harness::parse_gate_list;
    use qas_core::nets::{kan_param_count, mlp_param_count, silu, KanLayer, SplineGrid};
    use qas_core::qsim::{bell_state, ghz_state, run_circuit, Circuit, NoiseSpec, QuantumState};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Simulates a `;`-separated gate list from `|0…0⟩` and reports fidelity
    /// against `bell` or `ghz`, circuit metrics and basis-state
    /// probabilities, as a JSON string. Noise levels of zero run the pure
    /// statevector path.
    pub fn simulate_circuit(
        gate_list: &str,
        num_qubits: usize,
        p_x: f64,
        p_dep: f64,
        target: &str,
    ) -> Result<String, String> {
        if !(2..=6).contains(&num_qubits) {
            return Err("demo supports 2 to 6 qubits".to_string());
        }
        let gates = parse_gate_list(gate_list).map_err(|e| e.to_string())?;
        let circuit = Circuit::from_gates(num_qubits, gates).map_err(|e| e.to_string())?;
        let metrics = circuit.metrics();
        let noise = if p_x > 0.0 || p_dep > 0.0 {
            Some(NoiseSpec::new(p_x, p_dep).map_err(|e| e.to_string())?)
        } else {
            None
        };
        let state = run_circuit(&circuit, noise.as_ref()).map_err(|e| e.to_string())?;
        let target_vec = match target {
            "bell" if num_qubits == 2 => Some(bell_state()),
            "ghz" => Some(ghz_state(num_qubits)),
            "none" => None,
            other => return Err(format!("unknown target `{other}` for {num_qubits} qubits")),
        };
        let fidelity = match &target_vec {
            Some(t) => Some(state.fidelity(t).map_err(|e| e.to_string())?),
            None => None,
        };
        let probabilities: Vec<f64> = match &state {
            QuantumState::Pure { amps, .. } => amps.iter().map(|a| a.norm_sqr()).collect(),
            QuantumState::Mixed { rho, .. } => {
                let dim = 1usize << num_qubits;
                (0..dim).map(|i| rho[i * dim + i].re).collect()
            }
        };
        let labels: Vec<String> = (0..probabilities.len())
            .map(|i| format!("{i:0width$b}", width = num_qubits))
            .collect();

        let fid_json = fidelity.map_or("null".to_string(), |f| format!("{f}"));
        Ok(format!(
            "{{\"fidelity\":{fid_json},\"mixed\":{},\"depth\":{},\"num_gates\":{},\"num_2q\":{},\"probabilities\":[{}],\"labels\":[{}]}}",
            state.is_mixed(),
            metrics.depth,
            metrics.num_gates,
            metrics.num_2q,
            probabilities.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(","),
            labels.iter().map(|l| format!("\"{l}\"")).collect::<Vec<_>>().join(","),
        ))
    }

    /// All `G+k` B-spline basis functions sampled over `[-1, 1]`, flattened
    /// row-major as `basis_count × samples`.
    pub fn spline_basis_curves(
        grid_size: usize,
        spline_order: usize,
        samples: usize,
    ) -> Result<Vec<f64>, String> {
        let grid = SplineGrid::new(-1.0, 1.0, grid_size, spline_order).map_err(|e| e.to_string())?;
        let count = grid.basis_count();
        let mut basis = vec![0.0; count];
        let mut out = vec![0.0; count * samples];
        for s in 0..samples {
            let x = -1.0 + 2.0 * s as f64 / (samples - 1).max(1) as f64;
            grid.eval_basis(x, &mut basis);
            for b in 0..count {
                out[b * samples + s] = basis[b];
            }
        }
        Ok(out)
    }

    /// One randomly initialized KAN edge function `φ(x)`, its spline part
    /// and its silu base part over `[-1, 1]`, flattened as `3 × samples`.
    pub fn kan_edge_curve(
        seed: u64,
        grid_size: usize,
        spline_order: usize,
        samples: usize,
    ) -> Result<Vec<f64>, String> {
        let grid = SplineGrid::new(-1.0, 1.0, grid_size, spline_order).map_err(|e| e.to_string())?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layer = KanLayer::new(1, 1, grid, &mut rng);
        let base_weight = layer.base_weights()[0];
        let mut out = vec![0.0; 3 * samples];
        for s in 0..samples {
            let x = -1.0 + 2.0 * s as f64 / (samples - 1).max(1) as f64;
            let full = layer.edge_eval(0, 0, x);
            let base = base_weight * silu(x);
            out[s] = full;
            out[samples + s] = full - base;
            out[2 * samples + s] = base;
        }
        Ok(out)
    }

    /// Trainable-parameter count for `kan` or `mlp` with a comma-separated
    /// shape string.
    pub fn param_count(
        kind: &str,
        shape: &str,
        grid_size: usize,
        spline_order: usize,
    ) -> Result<u64, String> {
        let shape: Vec<usize> = shape
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| "shape entries must be integers".to_string()))
            .collect::<Result<_, _>>()?;
        if shape.len() < 2 || shape.contains(&0) {
            return Err("shape needs at least two positive sizes".to_string());
        }
        match kind {
            "kan" => {
                if grid_size == 0 || spline_order == 0 {
                    return Err("grid and spline order must be positive".to_string());
                }
                Ok(kan_param_count(&shape, grid_size, spline_order))
            }
            "mlp" => Ok(mlp_param_count(&shape)),
            other => Err(format!("unknown kind `{other}`")),
        }
    }
}

fn to_js(e: String) -> JsValue {
    JsValue::from_str(&e)
}

#[wasm_bindgen]
pub fn simulate_circuit(
    gate_list: &str,
    num_qubits: usize,
    p_x: f64,
    p_dep: f64,
    target: &str,
) -> Result<String, JsValue> {
    demo::simulate_circuit(gate_list, num_qubits, p_x, p_dep, target).map_err(to_js)
}

#[wasm_bindgen]
pub fn spline_basis_curves(
    grid_size: usize,
    spline_order: usize,
    samples: usize,
) -> Result<Vec<f64>, JsValue> {
    demo::spline_basis_curves(grid_size, spline_order, samples).map_err(to_js)
}

#[wasm_bindgen]
pub fn kan_edge_curve(
    seed: u64,
    grid_size: usize,
    spline_order: usize,
    samples: usize,
) -> Result<Vec<f64>, JsValue> {
    demo::kan_edge_curve(seed, grid_size, spline_order, samples).map_err(to_js)
}

#[wasm_bindgen]
pub fn param_count(
    kind: &str,
    shape: &str,
    grid_size: usize,
    spline_order: usize,
) -> Result<f64, JsValue> {
    demo::param_count(kind, shape, grid_size, spline_order)
        .map(|c| c as f64)
        .map_err(to_js)
}
