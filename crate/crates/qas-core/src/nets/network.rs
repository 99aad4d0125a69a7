//! Homogeneous layer stacks with a shared forward/backward/parameter surface.

use rand::RngExt;
use serde::{Deserialize, Serialize};

use super::kan::{KanLayer, KanLayerCache, KanLayerGrads};
use super::mlp::{Activation, MlpLayer, MlpLayerCache, MlpLayerGrads};
use super::spline::SplineGrid;
use super::NetError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NetworkKind {
    Kan,
    Mlp,
}

/// Grid hyperparameters shared by every KAN layer of a network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KanSettings {
    pub grid_size: usize,
    pub spline_order: usize,
}

impl Default for KanSettings {
    fn default() -> Self {
        Self { grid_size: 5, spline_order: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Layer {
    Kan(KanLayer),
    Mlp(MlpLayer),
}

#[derive(Debug, Clone)]
pub enum LayerCache {
    Kan(KanLayerCache),
    Mlp(MlpLayerCache),
}

#[derive(Debug, Clone)]
pub enum LayerGrads {
    Kan(KanLayerGrads),
    Mlp(MlpLayerGrads),
}

impl Layer {
    pub fn n_in(&self) -> usize {
        match self {
            Layer::Kan(l) => l.n_in(),
            Layer::Mlp(l) => l.n_in(),
        }
    }

    pub fn n_out(&self) -> usize {
        match self {
            Layer::Kan(l) => l.n_out(),
            Layer::Mlp(l) => l.n_out(),
        }
    }

    pub fn param_count(&self) -> usize {
        match self {
            Layer::Kan(l) => l.param_count(),
            Layer::Mlp(l) => l.param_count(),
        }
    }

    pub fn param_slices(&self) -> [&[f64]; 2] {
        match self {
            Layer::Kan(l) => l.param_slices(),
            Layer::Mlp(l) => l.param_slices(),
        }
    }

    pub fn param_slices_mut(&mut self) -> [&mut [f64]; 2] {
        match self {
            Layer::Kan(l) => l.param_slices_mut(),
            Layer::Mlp(l) => l.param_slices_mut(),
        }
    }
}

impl LayerGrads {
    pub fn slices(&self) -> [&[f64]; 2] {
        match self {
            LayerGrads::Kan(g) => g.slices(),
            LayerGrads::Mlp(g) => g.slices(),
        }
    }
}

/// Composition of KAN or MLP layers; the Q-function approximator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    kind: NetworkKind,
    shape: Vec<usize>,
    layers: Vec<Layer>,
}

/// Per-layer activation caches from one forward pass; consumed by `backward`.
#[derive(Debug, Clone)]
pub struct NetworkCache {
    layers: Vec<LayerCache>,
}

/// Per-layer gradient buffers, shaped exactly like the network parameters.
#[derive(Debug, Clone)]
pub struct NetworkGrads {
    pub layers: Vec<LayerGrads>,
}

impl Network {
    /// Stack of KAN layers `shape[0] → shape[1] → … → shape[last]`.
    pub fn new_kan<R: RngExt + ?Sized>(
        shape: &[usize],
        settings: KanSettings,
        rng: &mut R,
    ) -> Result<Self, NetError> {
        Self::check_shape(shape)?;
        let mut layers = Vec::with_capacity(shape.len() - 1);
        for w in shape.windows(2) {
            let grid = SplineGrid::new(-1.0, 1.0, settings.grid_size, settings.spline_order)?;
            layers.push(Layer::Kan(KanLayer::new(w[0], w[1], grid, rng)));
        }
        Ok(Self { kind: NetworkKind::Kan, shape: shape.to_vec(), layers })
    }

    /// Stack of MLP layers with `activation` on hidden layers and an
    /// Identity output layer (Q-values are unbounded).
    pub fn new_mlp<R: RngExt + ?Sized>(
        shape: &[usize],
        activation: Activation,
        rng: &mut R,
    ) -> Result<Self, NetError> {
        Self::check_shape(shape)?;
        let n_layers = shape.len() - 1;
        let mut layers = Vec::with_capacity(n_layers);
        for (idx, w) in shape.windows(2).enumerate() {
            let act = if idx + 1 == n_layers { Activation::Identity } else { activation };
            layers.push(Layer::Mlp(MlpLayer::new(w[0], w[1], act, rng)));
        }
        Ok(Self { kind: NetworkKind::Mlp, shape: shape.to_vec(), layers })
    }

    fn check_shape(shape: &[usize]) -> Result<(), NetError> {
        if shape.len() < 2 || shape.iter().any(|&n| n == 0) {
            return Err(NetError::BadShape(format!("invalid shape {shape:?}")));
        }
        Ok(())
    }

    pub fn kind(&self) -> NetworkKind {
        self.kind
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub(crate) fn layers_mut(&mut self) -> impl Iterator<Item = &mut Layer> {
        self.layers.iter_mut()
    }

    /// Per-layer views of the two parameter arrays, in declared order.
    pub fn param_arrays(&self) -> Vec<[&[f64]; 2]> {
        self.layers.iter().map(Layer::param_slices).collect()
    }

    /// Mutable per-layer parameter views; gradient-check and tooling surface.
    pub fn param_arrays_mut(&mut self) -> Vec<[&mut [f64]; 2]> {
        self.layers.iter_mut().map(Layer::param_slices_mut).collect()
    }

    /// Rebuilds a network from checkpoint parts; layer dimensions must chain
    /// and match `shape`.
    pub(crate) fn from_parts(
        kind: NetworkKind,
        shape: Vec<usize>,
        layers: Vec<Layer>,
    ) -> Result<Self, NetError> {
        Self::check_shape(&shape)?;
        if layers.len() != shape.len() - 1 {
            return Err(NetError::ShapeMismatch("layer count does not match shape".into()));
        }
        for (idx, layer) in layers.iter().enumerate() {
            if layer.n_in() != shape[idx] || layer.n_out() != shape[idx + 1] {
                return Err(NetError::ShapeMismatch(format!(
                    "layer {idx} is {}x{}, shape says {}x{}",
                    layer.n_in(),
                    layer.n_out(),
                    shape[idx],
                    shape[idx + 1]
                )));
            }
            let expected_kind = matches!(kind, NetworkKind::Kan);
            if matches!(layer, Layer::Kan(_)) != expected_kind {
                return Err(NetError::ShapeMismatch("layer kind does not match network kind".into()));
            }
        }
        Ok(Self { kind, shape, layers })
    }

    pub fn input_len(&self) -> usize {
        self.shape[0]
    }

    pub fn output_len(&self) -> usize {
        *self.shape.last().unwrap()
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(Layer::param_count).sum()
    }

    /// Forward pass that records per-layer activations for `backward`.
    pub fn forward(&self, input: &[f64]) -> Result<(Vec<f64>, NetworkCache), NetError> {
        if input.len() != self.input_len() {
            return Err(NetError::DimensionMismatch { expected: self.input_len(), got: input.len() });
        }
        let mut caches = Vec::with_capacity(self.layers.len());
        let mut x = input.to_vec();
        for layer in &self.layers {
            let (y, cache) = match layer {
                Layer::Kan(l) => {
                    let (y, c) = l.forward(&x);
                    (y, LayerCache::Kan(c))
                }
                Layer::Mlp(l) => {
                    let (y, c) = l.forward(&x);
                    (y, LayerCache::Mlp(c))
                }
            };
            caches.push(cache);
            x = y;
        }
        Ok((x, NetworkCache { layers: caches }))
    }

    /// Cache-free forward pass for action selection and frozen targets.
    pub fn infer(&self, input: &[f64]) -> Result<Vec<f64>, NetError> {
        if input.len() != self.input_len() {
            return Err(NetError::DimensionMismatch { expected: self.input_len(), got: input.len() });
        }
        let mut scratch = Vec::new();
        let mut x = input.to_vec();
        for layer in &self.layers {
            x = match layer {
                Layer::Kan(l) => l.infer(&x, &mut scratch),
                Layer::Mlp(l) => l.infer(&x),
            };
        }
        Ok(x)
    }

    /// Reverse-mode gradients for one sample; accumulates into `grads` and
    /// returns the gradient with respect to the network input.
    pub fn backward(
        &self,
        cache: &NetworkCache,
        grad_output: &[f64],
        grads: &mut NetworkGrads,
    ) -> Vec<f64> {
        debug_assert_eq!(cache.layers.len(), self.layers.len());
        let mut g = grad_output.to_vec();
        for idx in (0..self.layers.len()).rev() {
            g = match (&self.layers[idx], &cache.layers[idx], &mut grads.layers[idx]) {
                (Layer::Kan(l), LayerCache::Kan(c), LayerGrads::Kan(gr)) => l.backward(c, &g, gr),
                (Layer::Mlp(l), LayerCache::Mlp(c), LayerGrads::Mlp(gr)) => l.backward(c, &g, gr),
                _ => unreachable!("cache/grads kind mismatch"),
            };
        }
        g
    }

    pub fn zero_grads(&self) -> NetworkGrads {
        NetworkGrads {
            layers: self
                .layers
                .iter()
                .map(|l| match l {
                    Layer::Kan(k) => LayerGrads::Kan(k.zero_grads()),
                    Layer::Mlp(m) => LayerGrads::Mlp(m.zero_grads()),
                })
                .collect(),
        }
    }

    /// Copies every parameter of `src` into `self`; shapes must match.
    pub fn copy_parameters_from(&mut self, src: &Network) -> Result<(), NetError> {
        if self.shape != src.shape || self.kind != src.kind {
            return Err(NetError::ShapeMismatch("parameter copy between different networks".into()));
        }
        for (dst, src) in self.layers.iter_mut().zip(src.layers.iter()) {
            let d = dst.param_slices_mut();
            let s = src.param_slices();
            for (a, b) in d.into_iter().zip(s.into_iter()) {
                a.copy_from_slice(b);
            }
        }
        Ok(())
    }
}

impl NetworkGrads {
    pub fn scale(&mut self, factor: f64) {
        for layer in &mut self.layers {
            match layer {
                LayerGrads::Kan(g) => {
                    g.spline_coeffs.iter_mut().for_each(|v| *v *= factor);
                    g.base_weights.iter_mut().for_each(|v| *v *= factor);
                }
                LayerGrads::Mlp(g) => {
                    g.weights.iter_mut().for_each(|v| *v *= factor);
                    g.bias.iter_mut().for_each(|v| *v *= factor);
                }
            }
        }
    }
}

/// `Σ_layers n_in·n_out·(G+k+1)`: `G+k` spline coefficients plus one base
/// weight per edge.
pub fn kan_param_count(shape: &[usize], grid_size: usize, spline_order: usize) -> u64 {
    shape
        .windows(2)
        .map(|w| (w[0] as u64) * (w[1] as u64) * (grid_size + spline_order + 1) as u64)
        .sum()
}

/// `Σ_layers (n_in·n_out + n_out)`.
pub fn mlp_param_count(shape: &[usize]) -> u64 {
    shape.windows(2).map(|w| (w[0] as u64) * (w[1] as u64) + w[1] as u64).sum()
}
