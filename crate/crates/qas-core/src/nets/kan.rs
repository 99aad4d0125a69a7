//! A layer of learnable univariate edge functions with summation nodes.
//!
//! Every edge carries `φ(x) = w_b · silu(x) + Σ_i c_i B_i(x)` over a shared
//! spline grid; node `j` outputs `z_j = Σ_i φ_{ij}(x_i)`.

use rand::RngExt;
use serde::{Deserialize, Serialize};

use super::init::{normal, xavier_uniform};
use super::spline::{silu, silu_deriv, SplineGrid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KanLayer {
    n_in: usize,
    n_out: usize,
    grid: SplineGrid,
    /// `[n_in][n_out][basis_count]`, flat.
    spline_coeffs: Vec<f64>,
    /// `[n_in][n_out]`, flat.
    base_weights: Vec<f64>,
}

/// Forward-pass activations needed by the backward pass.
#[derive(Debug, Clone)]
pub struct KanLayerCache {
    inputs: Vec<f64>,
    basis: Vec<f64>,  // [n_in][basis_count]
    dbasis: Vec<f64>, // [n_in][basis_count]
}

/// Gradient buffers mirroring the layer's parameter arrays.
#[derive(Debug, Clone)]
pub struct KanLayerGrads {
    pub spline_coeffs: Vec<f64>,
    pub base_weights: Vec<f64>,
}

impl KanLayer {
    pub fn new<R: RngExt + ?Sized>(n_in: usize, n_out: usize, grid: SplineGrid, rng: &mut R) -> Self {
        let basis = grid.basis_count();
        let spline_coeffs = (0..n_in * n_out * basis).map(|_| normal(rng, 0.0, 0.1)).collect();
        let base_weights = (0..n_in * n_out).map(|_| xavier_uniform(rng, n_in, n_out)).collect();
        Self { n_in, n_out, grid, spline_coeffs, base_weights }
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn grid(&self) -> &SplineGrid {
        &self.grid
    }

    pub fn spline_coeffs(&self) -> &[f64] {
        &self.spline_coeffs
    }

    pub fn base_weights(&self) -> &[f64] {
        &self.base_weights
    }

    pub(crate) fn from_parts(
        n_in: usize,
        n_out: usize,
        grid: SplineGrid,
        spline_coeffs: Vec<f64>,
        base_weights: Vec<f64>,
    ) -> Result<Self, super::NetError> {
        if spline_coeffs.len() != n_in * n_out * grid.basis_count()
            || base_weights.len() != n_in * n_out
        {
            return Err(super::NetError::ShapeMismatch(format!(
                "kan layer {n_in}x{n_out}: parameter arrays have wrong length"
            )));
        }
        Ok(Self { n_in, n_out, grid, spline_coeffs, base_weights })
    }

    pub fn param_count(&self) -> usize {
        self.spline_coeffs.len() + self.base_weights.len()
    }

    #[inline]
    fn coeff_base(&self, i: usize, j: usize) -> usize {
        (i * self.n_out + j) * self.grid.basis_count()
    }

    /// Single edge value `φ_{ij}(x)`; used by tests and the demo surface.
    pub fn edge_eval(&self, i: usize, j: usize, x: f64) -> f64 {
        let basis_count = self.grid.basis_count();
        let mut basis = vec![0.0; basis_count];
        self.grid.eval_basis(x, &mut basis);
        let cb = self.coeff_base(i, j);
        let spline: f64 = (0..basis_count).map(|m| self.spline_coeffs[cb + m] * basis[m]).sum();
        self.base_weights[i * self.n_out + j] * silu(x) + spline
    }

    pub fn forward(&self, input: &[f64]) -> (Vec<f64>, KanLayerCache) {
        debug_assert_eq!(input.len(), self.n_in);
        let basis_count = self.grid.basis_count();
        let mut cache = KanLayerCache {
            inputs: input.to_vec(),
            basis: vec![0.0; self.n_in * basis_count],
            dbasis: vec![0.0; self.n_in * basis_count],
        };
        let mut out = vec![0.0; self.n_out];
        for i in 0..self.n_in {
            let row = &mut cache.basis[i * basis_count..(i + 1) * basis_count];
            let drow = &mut cache.dbasis[i * basis_count..(i + 1) * basis_count];
            self.grid.eval_basis_and_deriv(input[i], row, drow);
            let s = silu(input[i]);
            for j in 0..self.n_out {
                let cb = self.coeff_base(i, j);
                let mut acc = self.base_weights[i * self.n_out + j] * s;
                for m in 0..basis_count {
                    acc += self.spline_coeffs[cb + m] * row[m];
                }
                out[j] += acc;
            }
        }
        (out, cache)
    }

    /// Forward pass without building a cache; safe from shared references.
    pub fn infer(&self, input: &[f64], scratch: &mut Vec<f64>) -> Vec<f64> {
        debug_assert_eq!(input.len(), self.n_in);
        let basis_count = self.grid.basis_count();
        scratch.resize(basis_count, 0.0);
        let mut out = vec![0.0; self.n_out];
        for i in 0..self.n_in {
            self.grid.eval_basis(input[i], scratch);
            let s = silu(input[i]);
            for j in 0..self.n_out {
                let cb = self.coeff_base(i, j);
                let mut acc = self.base_weights[i * self.n_out + j] * s;
                for m in 0..basis_count {
                    acc += self.spline_coeffs[cb + m] * scratch[m];
                }
                out[j] += acc;
            }
        }
        out
    }

    /// Accumulates parameter gradients for `∂L/∂out = grad_out` and returns
    /// `∂L/∂input`.
    pub fn backward(
        &self,
        cache: &KanLayerCache,
        grad_out: &[f64],
        grads: &mut KanLayerGrads,
    ) -> Vec<f64> {
        debug_assert_eq!(grad_out.len(), self.n_out);
        let basis_count = self.grid.basis_count();
        let mut grad_in = vec![0.0; self.n_in];
        for i in 0..self.n_in {
            let row = &cache.basis[i * basis_count..(i + 1) * basis_count];
            let drow = &cache.dbasis[i * basis_count..(i + 1) * basis_count];
            let x = cache.inputs[i];
            let s = silu(x);
            let ds = silu_deriv(x);
            let mut gi = 0.0;
            for j in 0..self.n_out {
                let g = grad_out[j];
                if g == 0.0 {
                    continue;
                }
                let cb = self.coeff_base(i, j);
                grads.base_weights[i * self.n_out + j] += g * s;
                let mut dphi_dx = self.base_weights[i * self.n_out + j] * ds;
                for m in 0..basis_count {
                    grads.spline_coeffs[cb + m] += g * row[m];
                    dphi_dx += self.spline_coeffs[cb + m] * drow[m];
                }
                gi += g * dphi_dx;
            }
            grad_in[i] = gi;
        }
        grad_in
    }

    pub fn zero_grads(&self) -> KanLayerGrads {
        KanLayerGrads {
            spline_coeffs: vec![0.0; self.spline_coeffs.len()],
            base_weights: vec![0.0; self.base_weights.len()],
        }
    }

    pub fn param_slices(&self) -> [&[f64]; 2] {
        [&self.spline_coeffs, &self.base_weights]
    }

    pub fn param_slices_mut(&mut self) -> [&mut [f64]; 2] {
        [&mut self.spline_coeffs, &mut self.base_weights]
    }
}

impl KanLayerGrads {
    pub fn slices(&self) -> [&[f64]; 2] {
        [&self.spline_coeffs, &self.base_weights]
    }
}
