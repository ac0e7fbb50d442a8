//! Dense feedforward feature network with a linear outer layer.
//!
//! Layer `l` computes `a_l = σ_l(W_lᵀ a_{l-1} + b_l)` with `W_l` stored
//! row-major as `fan_in × fan_out`. The last activation is the feature vector
//! `s(x)` and the network output is `Ŵᵀ s(x)` for the `L × n` outer matrix.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ActivationKind;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{all_finite, Real};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct DenseLayer<T> {
    pub fan_in: usize,
    pub fan_out: usize,
    pub activation: ActivationKind,
    /// Row-major `fan_in × fan_out`.
    pub weights: Vec<T>,
    pub bias: Vec<T>,
}

impl<T: Real> DenseLayer<T> {
    pub fn zeros(fan_in: usize, fan_out: usize, activation: ActivationKind) -> Self {
        Self {
            fan_in,
            fan_out,
            activation,
            weights: vec![T::zero(); fan_in * fan_out],
            bias: vec![T::zero(); fan_out],
        }
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> T {
        self.weights[i * self.fan_out + j]
    }

    /// Glorot-uniform weights in `±√(6/(fan_in+fan_out))`, zero bias.
    pub fn init_glorot<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let limit = (6.0 / (self.fan_in + self.fan_out) as f64).sqrt();
        for w in &mut self.weights {
            *w = T::lit(rng.random_range(-limit..=limit));
        }
        self.bias.iter_mut().for_each(|b| *b = T::zero());
    }

    fn pre_activation(&self, input: &[T]) -> Vec<T> {
        let mut z = self.bias.clone();
        for (i, &a) in input.iter().enumerate() {
            let row = &self.weights[i * self.fan_out..(i + 1) * self.fan_out];
            for (zj, &w) in z.iter_mut().zip(row) {
                *zj += w * a;
            }
        }
        z
    }

    fn validate(&self, idx: usize) -> Result<()> {
        if self.fan_in == 0 || self.fan_out == 0 {
            return Err(Error::config(format!("layer {idx}: zero dimension")));
        }
        if self.weights.len() != self.fan_in * self.fan_out || self.bias.len() != self.fan_out {
            return Err(Error::config(format!(
                "layer {idx}: expected {}x{} weights and {} biases, got {} and {}",
                self.fan_in,
                self.fan_out,
                self.fan_out,
                self.weights.len(),
                self.bias.len()
            )));
        }
        if !all_finite(&self.weights) || !all_finite(&self.bias) {
            return Err(Error::config(format!("layer {idx}: non-finite parameter")));
        }
        Ok(())
    }
}

/// Intermediate values from [`FeedforwardNet::forward`] needed by
/// [`FeedforwardNet::backward`].
#[derive(Clone, Debug)]
pub struct ForwardCache<T> {
    /// `activations[0]` is the input; `activations[l + 1]` is layer `l`'s output.
    pub activations: Vec<Vec<T>>,
    pub pre_activations: Vec<Vec<T>>,
}

impl<T: Real> ForwardCache<T> {
    pub fn features(&self) -> &[T] {
        self.activations.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

#[derive(Clone, Debug)]
pub struct ForwardPass<T> {
    pub features: Vec<T>,
    pub output: Vec<T>,
    pub cache: ForwardCache<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LayerGradient<T> {
    pub weights: Vec<T>,
    pub bias: Vec<T>,
}

/// Gradients with exactly the parameter shapes of a [`FeedforwardNet`].
#[derive(Clone, Debug, PartialEq)]
pub struct GradientSet<T> {
    pub layers: Vec<LayerGradient<T>>,
    pub outer: Matrix<T>,
}

impl<T: Real> GradientSet<T> {
    pub fn zeros_like(net: &FeedforwardNet<T>) -> Self {
        Self {
            layers: net
                .layers
                .iter()
                .map(|l| LayerGradient {
                    weights: vec![T::zero(); l.weights.len()],
                    bias: vec![T::zero(); l.bias.len()],
                })
                .collect(),
            outer: Matrix::zeros(net.feature_dim(), net.output_dim()),
        }
    }

    pub fn accumulate(&mut self, other: &Self) {
        for (a, b) in self.layers.iter_mut().zip(&other.layers) {
            a.weights.iter_mut().zip(&b.weights).for_each(|(x, &y)| *x += y);
            a.bias.iter_mut().zip(&b.bias).for_each(|(x, &y)| *x += y);
        }
        self.outer = self.outer.add(&other.outer);
    }

    /// Inner-layer gradients flattened in [`FeedforwardNet::inner_parameters`] order.
    pub fn inner_flat(&self) -> Vec<T> {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(&l.bias).copied())
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.outer.is_finite()
            && self
                .layers
                .iter()
                .all(|l| all_finite(&l.weights) && all_finite(&l.bias))
    }
}

/// Inner feature layers `Φ̂` plus the outer weight matrix `Ŵ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real", try_from = "NetDocument<T>", into = "NetDocument<T>")]
pub struct FeedforwardNet<T: Real> {
    input_dim: usize,
    pub(crate) layers: Vec<DenseLayer<T>>,
    /// `L × n`
    pub(crate) outer_weights: Matrix<T>,
}

impl<T: Real> FeedforwardNet<T> {
    /// All-zero network with the given layer widths and activations.
    pub fn zeros(
        input_dim: usize,
        hidden: &[(usize, ActivationKind)],
        output_dim: usize,
    ) -> Result<Self> {
        if hidden.is_empty() {
            return Err(Error::config("network needs at least one inner layer"));
        }
        let mut fan_in = input_dim;
        let layers = hidden
            .iter()
            .map(|&(fan_out, act)| {
                let l = DenseLayer::zeros(fan_in, fan_out, act);
                fan_in = fan_out;
                l
            })
            .collect();
        let net = Self {
            input_dim,
            layers,
            outer_weights: Matrix::zeros(fan_in, output_dim),
        };
        net.validate()?;
        Ok(net)
    }

    /// The 2→3→4→8 feature network with tanh / log-sigmoid / tanh
    /// activations and a 2-dimensional output.
    pub fn attitude_architecture() -> Self {
        Self::zeros(
            2,
            &[
                (3, ActivationKind::HyperbolicTangent),
                (4, ActivationKind::LogSigmoid),
                (8, ActivationKind::HyperbolicTangent),
            ],
            2,
        )
        .expect("fixed architecture is valid")
    }

    pub fn from_parts(
        input_dim: usize,
        layers: Vec<DenseLayer<T>>,
        outer_weights: Matrix<T>,
    ) -> Result<Self> {
        let net = Self {
            input_dim,
            layers,
            outer_weights,
        };
        net.validate()?;
        Ok(net)
    }

    /// Glorot-initialises every inner layer; the outer weights are left alone.
    pub fn init_inner<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        self.layers.iter_mut().for_each(|l| l.init_glorot(rng));
    }

    #[inline]
    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    #[inline]
    pub fn feature_dim(&self) -> usize {
        self.outer_weights.rows()
    }

    #[inline]
    pub fn output_dim(&self) -> usize {
        self.outer_weights.cols()
    }

    pub fn layers(&self) -> &[DenseLayer<T>] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [DenseLayer<T>] {
        &mut self.layers
    }

    pub fn outer_weights(&self) -> &Matrix<T> {
        &self.outer_weights
    }

    pub fn outer_weights_mut(&mut self) -> &mut Matrix<T> {
        &mut self.outer_weights
    }

    pub fn validate(&self) -> Result<()> {
        let mut expected = self.input_dim;
        for (i, l) in self.layers.iter().enumerate() {
            l.validate(i)?;
            if l.fan_in != expected {
                return Err(Error::config(format!(
                    "layer {i}: fan_in {} does not chain with previous width {expected}",
                    l.fan_in
                )));
            }
            expected = l.fan_out;
        }
        if self.layers.is_empty() {
            return Err(Error::config("network needs at least one inner layer"));
        }
        if self.outer_weights.rows() != expected {
            return Err(Error::config(format!(
                "outer weights have {} rows, feature width is {expected}",
                self.outer_weights.rows()
            )));
        }
        if self.outer_weights.cols() == 0 {
            return Err(Error::config("outer weights have no columns"));
        }
        if !self.outer_weights.is_finite() {
            return Err(Error::config("non-finite outer weight"));
        }
        Ok(())
    }

    fn check_input(&self, x: &[T]) -> Result<()> {
        if x.len() != self.input_dim {
            return Err(Error::config(format!(
                "input has length {}, network expects {}",
                x.len(),
                self.input_dim
            )));
        }
        if !all_finite(x) {
            return Err(Error::input("non-finite network input"));
        }
        Ok(())
    }

    pub fn forward(&self, x: &[T]) -> Result<ForwardPass<T>> {
        self.check_input(x)?;
        let mut activations = Vec::with_capacity(self.layers.len() + 1);
        let mut pre_activations = Vec::with_capacity(self.layers.len());
        activations.push(x.to_vec());
        for layer in &self.layers {
            let z = layer.pre_activation(activations.last().expect("input pushed"));
            activations.push(z.iter().map(|&v| layer.activation.eval(v)).collect());
            pre_activations.push(z);
        }
        let cache = ForwardCache {
            activations,
            pre_activations,
        };
        let features = cache.features().to_vec();
        let output = self.outer_weights.tr_mul_vec(&features);
        Ok(ForwardPass {
            features,
            output,
            cache,
        })
    }

    /// Feature vector `s(x)` only.
    pub fn features(&self, x: &[T]) -> Result<Vec<T>> {
        Ok(self.forward(x)?.features)
    }

    /// Reverse-mode gradient of `output_grad · output` with respect to every
    /// parameter.
    pub fn backward(&self, cache: &ForwardCache<T>, output_grad: &[T]) -> Result<GradientSet<T>> {
        if output_grad.len() != self.output_dim() {
            return Err(Error::config(format!(
                "output gradient has length {}, network output is {}",
                output_grad.len(),
                self.output_dim()
            )));
        }
        if cache.pre_activations.len() != self.layers.len()
            || cache.activations.len() != self.layers.len() + 1
            || cache
                .pre_activations
                .iter()
                .zip(&self.layers)
                .any(|(z, l)| z.len() != l.fan_out)
        {
            return Err(Error::config("forward cache does not match network shape"));
        }

        let features = cache.features();
        let mut outer = Matrix::zeros(self.feature_dim(), self.output_dim());
        outer.add_outer(T::one(), features, output_grad);

        // dJ/d(features) = Ŵ g
        let mut upstream = self.outer_weights.mul_vec(output_grad);
        let mut layers = Vec::with_capacity(self.layers.len());
        for (l, layer) in self.layers.iter().enumerate().rev() {
            let z = &cache.pre_activations[l];
            let input = &cache.activations[l];
            let delta: Vec<T> = z
                .iter()
                .zip(&upstream)
                .map(|(&zj, &gj)| layer.activation.derivative(zj) * gj)
                .collect();
            let mut weights = vec![T::zero(); layer.weights.len()];
            for (i, &a) in input.iter().enumerate() {
                for (j, &d) in delta.iter().enumerate() {
                    weights[i * layer.fan_out + j] = a * d;
                }
            }
            upstream = (0..layer.fan_in)
                .map(|i| {
                    delta
                        .iter()
                        .enumerate()
                        .map(|(j, &d)| layer.weight(i, j) * d)
                        .sum()
                })
                .collect();
            layers.push(LayerGradient {
                weights,
                bias: delta,
            });
        }
        layers.reverse();
        Ok(GradientSet { layers, outer })
    }

    pub fn inner_param_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum()
    }

    /// Inner parameters flattened layer by layer, weights before biases.
    pub fn inner_parameters(&self) -> Vec<T> {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(&l.bias).copied())
            .collect()
    }

    pub fn set_inner_parameters(&mut self, params: &[T]) -> Result<()> {
        if params.len() != self.inner_param_count() {
            return Err(Error::config(format!(
                "expected {} inner parameters, got {}",
                self.inner_param_count(),
                params.len()
            )));
        }
        let mut it = params.iter().copied();
        for l in &mut self.layers {
            l.weights.iter_mut().chain(l.bias.iter_mut()).for_each(|p| {
                *p = it.next().expect("length checked");
            });
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.outer_weights.is_finite()
            && self
                .layers
                .iter()
                .all(|l| all_finite(&l.weights) && all_finite(&l.bias))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// On-disk layout of a [`FeedforwardNet`].
#[derive(Clone, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
struct NetDocument<T> {
    input_dim: usize,
    feature_dim: usize,
    output_dim: usize,
    layers: Vec<DenseLayer<T>>,
    /// Row-major `feature_dim × output_dim`.
    outer_weights: Vec<T>,
}

impl<T: Real> From<FeedforwardNet<T>> for NetDocument<T> {
    fn from(net: FeedforwardNet<T>) -> Self {
        Self {
            input_dim: net.input_dim,
            feature_dim: net.feature_dim(),
            output_dim: net.output_dim(),
            outer_weights: net.outer_weights.as_slice().to_vec(),
            layers: net.layers,
        }
    }
}

impl<T: Real> TryFrom<NetDocument<T>> for FeedforwardNet<T> {
    type Error = Error;

    fn try_from(doc: NetDocument<T>) -> Result<Self> {
        let outer = Matrix::from_row_major(doc.feature_dim, doc.output_dim, doc.outer_weights)?;
        FeedforwardNet::from_parts(doc.input_dim, doc.layers, outer)
    }
}
