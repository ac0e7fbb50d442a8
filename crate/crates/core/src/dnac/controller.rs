//! DNAC control law and real-time outer-weight adaptation.
//!
//! Tracking error is `e = x − x_d` throughout. With that sign the control
//! law `u = ĝ⁻¹(−K e − K_s sgn(e) + ẋ_d − f̂(x))` gives `ė = −K e` when the
//! estimate is exact, and the adaptation `Ŵ̇ = Γ_W s(x) eᵀ` is the matching
//! Lyapunov update.

use serde::{Deserialize, Serialize};

use super::buffer::{ReplayBuffer, ReplaySample};
use super::config::DnacConfig;
use super::estimator::{DeepEstimator, TrainingStats};
use crate::error::{Error, Result};
use crate::nn::FeedforwardNet;
use crate::scalar::{all_finite, Real};

/// Sign function, optionally replaced by a linear ramp of half-width
/// `boundary` around zero.
#[inline]
pub fn smoothed_sign<T: Real>(v: T, boundary: T) -> T {
    if boundary > T::zero() {
        (v / boundary).clamp_to(-T::one(), T::one())
    } else if v > T::zero() {
        T::one()
    } else if v < T::zero() {
        -T::one()
    } else {
        T::zero()
    }
}

#[derive(Clone, Debug)]
pub struct DnacState<T: Real> {
    pub config: DnacConfig,
    k: Vec<T>,
    g_hat: Vec<T>,
    estimator: DeepEstimator<T>,
    seed: u64,
}

/// Serializable snapshot of a controller: network, pending buffer and
/// training counters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct DnacCheckpoint<T: Real> {
    pub config: DnacConfig,
    pub seed: u64,
    pub net: FeedforwardNet<T>,
    pub buffer: ReplayBuffer<T>,
    pub stats: TrainingStats,
}

impl<T: Real> DnacState<T> {
    pub fn new(config: DnacConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let estimator = DeepEstimator::new(config.state_dim(), config.training.clone(), seed)?;
        Self::assemble(config, estimator, seed)
    }

    /// Uses a caller-supplied network instead of a seeded initialisation.
    pub fn with_net(config: DnacConfig, net: FeedforwardNet<T>, seed: u64) -> Result<Self> {
        config.validate()?;
        if net.input_dim() != config.state_dim() {
            return Err(Error::config("network dimension does not match DNAC gains"));
        }
        let estimator = DeepEstimator::from_net(net, config.training.clone(), seed)?;
        Self::assemble(config, estimator, seed)
    }

    fn assemble(config: DnacConfig, estimator: DeepEstimator<T>, seed: u64) -> Result<Self> {
        Ok(Self {
            k: config.k.iter().map(|&v| T::lit(v)).collect(),
            g_hat: config.g_hat.iter().map(|&v| T::lit(v)).collect(),
            config,
            estimator,
            seed,
        })
    }

    pub fn dim(&self) -> usize {
        self.k.len()
    }

    pub fn estimator(&self) -> &DeepEstimator<T> {
        &self.estimator
    }

    pub fn net(&self) -> &FeedforwardNet<T> {
        self.estimator.net()
    }

    pub fn net_mut(&mut self) -> &mut FeedforwardNet<T> {
        self.estimator.net_mut()
    }

    pub fn buffer(&self) -> &ReplayBuffer<T> {
        self.estimator.buffer()
    }

    pub fn stats(&self) -> &TrainingStats {
        self.estimator.stats()
    }

    pub fn g_hat(&self) -> &[T] {
        &self.g_hat
    }

    pub fn outer_norm(&self) -> T {
        self.net().outer_weights().frobenius_norm()
    }

    fn check_vec(&self, v: &[T], what: &str) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::config(format!("{what} must have {} components", self.dim())));
        }
        if !all_finite(v) {
            return Err(Error::input(format!("non-finite {what}")));
        }
        Ok(())
    }

    /// `f̂(x) = Ŵᵀ s(x)`
    pub fn estimate_uncertainty(&self, x: &[T]) -> Result<Vec<T>> {
        self.estimator.estimate(x)
    }

    /// Control law in torque-equivalent units.
    pub fn compute_control(&self, e: &[T], x_dot_d: &[T], x: &[T]) -> Result<Vec<T>> {
        self.check_vec(e, "tracking error")?;
        self.check_vec(x_dot_d, "reference rate")?;
        let f_hat = self.estimate_uncertainty(x)?;
        if !all_finite(&f_hat) {
            return Err(Error::ControllerFault("non-finite uncertainty estimate".into()));
        }
        let ks = T::lit(self.config.ks);
        let boundary = T::lit(self.config.sgn_boundary);
        let u: Vec<T> = (0..self.dim())
            .map(|i| {
                (-self.k[i] * e[i] - ks * smoothed_sign(e[i], boundary) + x_dot_d[i] - f_hat[i])
                    / self.g_hat[i]
            })
            .collect();
        if !all_finite(&u) {
            return Err(Error::ControllerFault("non-finite control output".into()));
        }
        Ok(u)
    }

    /// Explicit-Euler step of `Ŵ̇ = Γ_W s(x) eᵀ`.
    ///
    /// The update is rejected, leaving `Ŵ` untouched, if it would produce a
    /// non-finite matrix or push `‖Ŵ‖_F` past the configured bound.
    pub fn update_outer_weights(&mut self, e: &[T], x: &[T], dt: T) -> Result<()> {
        self.check_vec(e, "tracking error")?;
        if !(dt > T::zero()) {
            return Err(Error::config("outer-weight step needs dt > 0"));
        }
        let features = self.estimator.features(x)?;
        let gamma = T::lit(self.config.gamma_w);
        let mut next = self.net().outer_weights().clone();
        next.add_outer(gamma * dt, &features, e);
        if !next.is_finite() {
            return Err(Error::ControllerFault("non-finite outer weights".into()));
        }
        let norm = next.frobenius_norm();
        if norm > T::lit(self.config.w_norm_bound) {
            return Err(Error::ControllerFault(format!(
                "outer-weight norm {norm} exceeds bound {}",
                self.config.w_norm_bound
            )));
        }
        *self.net_mut().outer_weights_mut() = next;
        Ok(())
    }

    /// Appends a replay sample; `true` means a training pass is due.
    pub fn record_sample(&mut self, sample: ReplaySample<T>) -> Result<bool> {
        self.estimator.record(sample)
    }

    /// Batch-trains the inner layers on the full buffer and clears it.
    pub fn train_inner(&mut self) -> Result<Vec<T>> {
        self.estimator.train()
    }

    /// `f̂(x) + ĝu`
    pub fn predict_xdot(&self, x: &[T], gu: &[T]) -> Result<Vec<T>> {
        self.estimator.predict_xdot(x, gu)
    }

    /// `ĝ u` for a torque vector `u`.
    pub fn scale_by_g_hat(&self, u: &[T]) -> Vec<T> {
        u.iter().zip(&self.g_hat).map(|(&a, &g)| a * g).collect()
    }

    pub fn checkpoint(&self) -> DnacCheckpoint<T> {
        DnacCheckpoint {
            config: self.config.clone(),
            seed: self.seed,
            net: self.net().clone(),
            buffer: self.buffer().clone(),
            stats: self.stats().clone(),
        }
    }

    /// Rebuilds a controller from a checkpoint. The shuffle generator and
    /// Adam moments are reset, so training after a restore differs from an
    /// uninterrupted run.
    pub fn restore(cp: DnacCheckpoint<T>) -> Result<Self> {
        let mut state = Self::with_net(cp.config, cp.net, cp.seed)?;
        for s in cp.buffer.samples() {
            state.record_sample(s.clone())?;
        }
        state.estimator.set_stats(cp.stats);
        Ok(state)
    }
}
