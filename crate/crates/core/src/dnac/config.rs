use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::{ActivationKind, AdamConfig};

/// Width and nonlinearity of one inner layer.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub width: usize,
    pub activation: ActivationKind,
}

pub fn default_layers() -> Vec<LayerSpec> {
    vec![
        LayerSpec {
            width: 3,
            activation: ActivationKind::HyperbolicTangent,
        },
        LayerSpec {
            width: 4,
            activation: ActivationKind::LogSigmoid,
        },
        LayerSpec {
            width: 8,
            activation: ActivationKind::HyperbolicTangent,
        },
    ]
}

/// Replay-buffer training schedule shared by DNAC and DMRAC.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainingConfig {
    /// Buffer memory size `M`.
    pub memory_size: usize,
    /// Minibatch size `S_b`; must divide `M`.
    pub batch_size: usize,
    /// Epochs `N_e` per training pass.
    pub epochs: usize,
    /// Smooth L1 transition point.
    pub beta: f64,
    pub adam: AdamConfig,
    pub layers: Vec<LayerSpec>,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            memory_size: 100,
            batch_size: 20,
            epochs: 5,
            beta: 1.0,
            adam: AdamConfig::default(),
            layers: default_layers(),
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.memory_size == 0 || self.batch_size == 0 || self.epochs == 0 {
            return Err(Error::config("memory_size, batch_size and epochs must be positive"));
        }
        if self.memory_size % self.batch_size != 0 {
            return Err(Error::config(format!(
                "batch_size {} does not divide memory_size {}",
                self.batch_size, self.memory_size
            )));
        }
        if !(self.beta > 0.0) {
            return Err(Error::config("beta must be positive"));
        }
        if self.layers.is_empty() || self.layers.iter().any(|l| l.width == 0) {
            return Err(Error::config("inner layers must be non-empty with positive widths"));
        }
        self.adam.validate()
    }

    pub fn batches_per_epoch(&self) -> usize {
        self.memory_size / self.batch_size
    }
}

/// Gains of the DNAC control law and outer-weight adaptation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DnacConfig {
    /// Diagonal of the feedback gain `K`.
    pub k: Vec<f64>,
    /// Sliding-mode gain `K_s`.
    pub ks: f64,
    /// Diagonal of the control-effectiveness estimate `ĝ`.
    pub g_hat: Vec<f64>,
    /// Outer-layer learning gain `Γ_W`.
    pub gamma_w: f64,
    /// Width of the saturation used in place of `sgn`; 0 gives the hard sign.
    pub sgn_boundary: f64,
    /// `‖Ŵ‖_F` above this is treated as divergence.
    pub w_norm_bound: f64,
    #[serde(flatten)]
    pub training: TrainingConfig,
}

impl Default for DnacConfig {
    fn default() -> Self {
        Self {
            k: vec![10.0, 10.0],
            ks: 0.001,
            g_hat: vec![100.0, 100.0],
            gamma_w: 10.0,
            sgn_boundary: 0.01,
            w_norm_bound: 1e3,
            training: TrainingConfig::default(),
        }
    }
}

impl DnacConfig {
    pub fn state_dim(&self) -> usize {
        self.k.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.k.len();
        if n == 0 || self.g_hat.len() != n {
            return Err(Error::config("dnac: k and g_hat must have the same non-zero length"));
        }
        if self.k.iter().any(|&k| !(k > 0.0)) {
            return Err(Error::config("dnac: K diagonal entries must be positive"));
        }
        if self.g_hat.iter().any(|&g| !(g > 0.0)) {
            return Err(Error::config("dnac: g_hat diagonal entries must be positive"));
        }
        if !(self.ks >= 0.0) || !(self.sgn_boundary >= 0.0) {
            return Err(Error::config("dnac: ks and sgn_boundary must be non-negative"));
        }
        if !(self.gamma_w > 0.0) || !(self.w_norm_bound > 0.0) {
            return Err(Error::config("dnac: gamma_w and w_norm_bound must be positive"));
        }
        self.training.validate()
    }
}
