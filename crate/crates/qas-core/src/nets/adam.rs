//! Bias-corrected Adam over flat parameter buffers.

use serde::{Deserialize, Serialize};

use super::network::{Network, NetworkGrads};
use super::NetError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamParams {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl AdamParams {
    pub fn with_lr(lr: f64) -> Self {
        Self { lr, beta1: 0.9, beta2: 0.999, epsilon: 1e-8 }
    }
}

/// First/second moment accumulators plus the step counter. The accumulator
/// length mirrors the parameter count it was built for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub params: AdamParams,
    step: u64,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl AdamState {
    pub fn new(num_params: usize, lr: f64) -> Self {
        Self { params: AdamParams::with_lr(lr), step: 0, m: vec![0.0; num_params], v: vec![0.0; num_params] }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m.is_empty()
    }

    pub(crate) fn from_parts(params: AdamParams, step: u64, m: Vec<f64>, v: Vec<f64>) -> Self {
        Self { params, step, m, v }
    }

    pub(crate) fn parts(&self) -> (AdamParams, u64, &[f64], &[f64]) {
        (self.params, self.step, &self.m, &self.v)
    }

    /// One update over a flat parameter buffer.
    pub fn step_flat(&mut self, params: &mut [f64], grads: &[f64]) -> Result<(), NetError> {
        if params.len() != grads.len() || params.len() != self.m.len() {
            return Err(NetError::ShapeMismatch(format!(
                "adam buffers: params {}, grads {}, moments {}",
                params.len(),
                grads.len(),
                self.m.len()
            )));
        }
        self.step += 1;
        self.update_range(0, params, grads);
        Ok(())
    }

    fn update_range(&mut self, offset: usize, params: &mut [f64], grads: &[f64]) {
        let AdamParams { lr, beta1, beta2, epsilon } = self.params;
        let t = self.step as i32;
        let bc1 = 1.0 - beta1.powi(t);
        let bc2 = 1.0 - beta2.powi(t);
        for (i, (p, &g)) in params.iter_mut().zip(grads.iter()).enumerate() {
            let idx = offset + i;
            self.m[idx] = beta1 * self.m[idx] + (1.0 - beta1) * g;
            self.v[idx] = beta2 * self.v[idx] + (1.0 - beta2) * g * g;
            let m_hat = self.m[idx] / bc1;
            let v_hat = self.v[idx] / bc2;
            *p -= lr * m_hat / (v_hat.sqrt() + epsilon);
        }
    }
}

/// One Adam update of every network parameter from a matching gradient set.
pub fn adam_step(net: &mut Network, grads: &NetworkGrads, state: &mut AdamState) -> Result<(), NetError> {
    if net.param_count() != state.len() || net.layers().len() != grads.layers.len() {
        return Err(NetError::ShapeMismatch(format!(
            "adam state sized {} but network has {} parameters",
            state.len(),
            net.param_count()
        )));
    }
    state.step += 1;
    let mut offset = 0;
    // parameters and gradients visit arrays in the same declared order
    let mut layer_grads = grads.layers.iter();
    for layer in net.layers_mut() {
        let gslices = layer_grads.next().unwrap().slices();
        for (pslice, gslice) in layer.param_slices_mut().into_iter().zip(gslices.into_iter()) {
            if pslice.len() != gslice.len() {
                return Err(NetError::ShapeMismatch("gradient array length".into()));
            }
            state.update_range(offset, pslice, gslice);
            offset += gslice.len();
        }
    }
    Ok(())
}
