//! Dense perceptron layer, the baseline architecture.

use rand::RngExt;
use serde::{Deserialize, Serialize};

use super::init::xavier_uniform;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
    LeakyRelu,
    Elu,
    Identity,
}

impl Activation {
    const LEAKY_SLOPE: f64 = 0.01;
    const ELU_ALPHA: f64 = 1.0;

    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Relu => x.max(0.0),
            Activation::LeakyRelu => {
                if x >= 0.0 {
                    x
                } else {
                    Self::LEAKY_SLOPE * x
                }
            }
            Activation::Elu => {
                if x >= 0.0 {
                    x
                } else {
                    Self::ELU_ALPHA * (x.exp() - 1.0)
                }
            }
            Activation::Identity => x,
        }
    }

    pub fn derivative(self, x: f64) -> f64 {
        match self {
            Activation::Relu => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::LeakyRelu => {
                if x > 0.0 {
                    1.0
                } else {
                    Self::LEAKY_SLOPE
                }
            }
            Activation::Elu => {
                if x > 0.0 {
                    1.0
                } else {
                    Self::ELU_ALPHA * x.exp()
                }
            }
            Activation::Identity => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpLayer {
    n_in: usize,
    n_out: usize,
    /// `[n_out][n_in]`, flat.
    weights: Vec<f64>,
    bias: Vec<f64>,
    activation: Activation,
}

#[derive(Debug, Clone)]
pub struct MlpLayerCache {
    inputs: Vec<f64>,
    pre: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct MlpLayerGrads {
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl MlpLayer {
    pub fn new<R: RngExt + ?Sized>(
        n_in: usize,
        n_out: usize,
        activation: Activation,
        rng: &mut R,
    ) -> Self {
        let weights = (0..n_in * n_out).map(|_| xavier_uniform(rng, n_in, n_out)).collect();
        Self { n_in, n_out, weights, bias: vec![0.0; n_out], activation }
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub(crate) fn from_parts(
        n_in: usize,
        n_out: usize,
        weights: Vec<f64>,
        bias: Vec<f64>,
        activation: Activation,
    ) -> Result<Self, super::NetError> {
        if weights.len() != n_in * n_out || bias.len() != n_out {
            return Err(super::NetError::ShapeMismatch(format!(
                "mlp layer {n_in}x{n_out}: parameter arrays have wrong length"
            )));
        }
        Ok(Self { n_in, n_out, weights, bias, activation })
    }

    pub fn param_count(&self) -> usize {
        self.weights.len() + self.bias.len()
    }

    pub fn forward(&self, input: &[f64]) -> (Vec<f64>, MlpLayerCache) {
        let pre = self.preactivations(input);
        let out = pre.iter().map(|&p| self.activation.apply(p)).collect();
        (out, MlpLayerCache { inputs: input.to_vec(), pre })
    }

    pub fn infer(&self, input: &[f64]) -> Vec<f64> {
        self.preactivations(input)
            .into_iter()
            .map(|p| self.activation.apply(p))
            .collect()
    }

    fn preactivations(&self, input: &[f64]) -> Vec<f64> {
        debug_assert_eq!(input.len(), self.n_in);
        let mut pre = self.bias.clone();
        for j in 0..self.n_out {
            let row = &self.weights[j * self.n_in..(j + 1) * self.n_in];
            let mut acc = 0.0;
            for (w, x) in row.iter().zip(input.iter()) {
                acc += w * x;
            }
            pre[j] += acc;
        }
        pre
    }

    pub fn backward(
        &self,
        cache: &MlpLayerCache,
        grad_out: &[f64],
        grads: &mut MlpLayerGrads,
    ) -> Vec<f64> {
        debug_assert_eq!(grad_out.len(), self.n_out);
        let mut grad_in = vec![0.0; self.n_in];
        for j in 0..self.n_out {
            let dpre = grad_out[j] * self.activation.derivative(cache.pre[j]);
            if dpre == 0.0 {
                continue;
            }
            grads.bias[j] += dpre;
            let row = &self.weights[j * self.n_in..(j + 1) * self.n_in];
            let grow = &mut grads.weights[j * self.n_in..(j + 1) * self.n_in];
            for i in 0..self.n_in {
                grow[i] += dpre * cache.inputs[i];
                grad_in[i] += dpre * row[i];
            }
        }
        grad_in
    }

    pub fn zero_grads(&self) -> MlpLayerGrads {
        MlpLayerGrads { weights: vec![0.0; self.weights.len()], bias: vec![0.0; self.bias.len()] }
    }

    pub fn param_slices(&self) -> [&[f64]; 2] {
        [&self.weights, &self.bias]
    }

    pub fn param_slices_mut(&mut self) -> [&mut [f64]; 2] {
        [&mut self.weights, &mut self.bias]
    }

    #[cfg(test)]
    pub(crate) fn set_identity(&mut self) {
        assert_eq!(self.n_in, self.n_out);
        self.weights.fill(0.0);
        self.bias.fill(0.0);
        for i in 0..self.n_in {
            self.weights[i * self.n_in + i] = 1.0;
        }
    }
}

impl MlpLayerGrads {
    pub fn slices(&self) -> [&[f64]; 2] {
        [&self.weights, &self.bias]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_parameters_zero_output() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut layer = MlpLayer::new(3, 2, Activation::Relu, &mut rng);
        layer.weights.fill(0.0);
        let (out, _) = layer.forward(&[1.0, -2.0, 0.5]);
        assert_eq!(out, vec![0.0, 0.0]);
    }

    #[test]
    fn identity_layer_passes_input_through() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut layer = MlpLayer::new(3, 3, Activation::Identity, &mut rng);
        layer.set_identity();
        let input = [0.4, -1.3, 2.2];
        let (out, _) = layer.forward(&input);
        assert_eq!(out, input.to_vec());
    }

    #[test]
    fn activations_match_definitions() {
        assert_eq!(Activation::Relu.apply(-2.0), 0.0);
        assert_eq!(Activation::Relu.apply(2.0), 2.0);
        assert!((Activation::LeakyRelu.apply(-2.0) + 0.02).abs() < 1e-15);
        assert!((Activation::Elu.apply(-1.0) - ((-1.0f64).exp() - 1.0)).abs() < 1e-15);
        assert_eq!(Activation::Identity.apply(-7.5), -7.5);
    }

    #[test]
    fn backward_matches_finite_difference_away_from_kinks() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let layer = MlpLayer::new(4, 3, Activation::LeakyRelu, &mut rng);
        let input = [0.3, -0.7, 1.1, 0.05];
        let (out, cache) = layer.forward(&input);
        // loss = sum of outputs
        let grad_out = vec![1.0; out.len()];
        let mut grads = layer.zero_grads();
        let grad_in = layer.backward(&cache, &grad_out, &mut grads);
        let h = 1e-6;
        for i in 0..4 {
            let mut plus = input;
            plus[i] += h;
            let mut minus = input;
            minus[i] -= h;
            let f = |v: &[f64; 4]| layer.infer(v).iter().sum::<f64>();
            let fd = (f(&plus) - f(&minus)) / (2.0 * h);
            assert!((grad_in[i] - fd).abs() < 1e-6, "i={i}: {} vs {fd}", grad_in[i]);
        }
    }
}
