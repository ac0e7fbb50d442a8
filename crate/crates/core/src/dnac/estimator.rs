//! Two-timescale DNN uncertainty estimator.
//!
//! The outer weights are moved by whichever adaptive law owns the estimator
//! (DNAC or DMRAC); this type only evaluates `Ŵᵀ s(x)`, stores replay
//! samples, and trains the inner layers on a full buffer with Ŵ frozen.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::buffer::{ReplayBuffer, ReplaySample};
use super::config::TrainingConfig;
use crate::error::{Error, Result};
use crate::nn::{smooth_l1, AdamState, FeedforwardNet, GradientSet};
use crate::scalar::Real;

/// Instrumentation counters for the batch-training cadence.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingStats {
    /// Completed training passes.
    pub passes: u64,
    /// Passes aborted on a non-finite loss or gradient.
    pub failed_passes: u64,
    pub adam_steps: u64,
    /// Total minibatch sample evaluations used for gradients.
    pub sample_visits: u64,
    /// Passes in which every buffered sample was used exactly `epochs` times.
    pub uniform_visit_passes: u64,
}

#[derive(Clone, Debug)]
pub struct DeepEstimator<T: Real> {
    net: FeedforwardNet<T>,
    adam: AdamState<T>,
    buffer: ReplayBuffer<T>,
    training: TrainingConfig,
    rng: ChaCha8Rng,
    stats: TrainingStats,
}

impl<T: Real> DeepEstimator<T> {
    /// Builds the network for an `n`-dimensional state, Glorot-initialises
    /// the inner layers from `seed`, and zeroes the outer weights.
    pub fn new(n: usize, training: TrainingConfig, seed: u64) -> Result<Self> {
        training.validate()?;
        let hidden: Vec<_> = training.layers.iter().map(|l| (l.width, l.activation)).collect();
        let mut net = FeedforwardNet::zeros(n, &hidden, n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        net.init_inner(&mut rng);
        Self::with_net(net, training, rng)
    }

    pub fn from_net(net: FeedforwardNet<T>, training: TrainingConfig, seed: u64) -> Result<Self> {
        training.validate()?;
        Self::with_net(net, training, ChaCha8Rng::seed_from_u64(seed))
    }

    fn with_net(net: FeedforwardNet<T>, training: TrainingConfig, rng: ChaCha8Rng) -> Result<Self> {
        if net.input_dim() != net.output_dim() {
            return Err(Error::config("estimator network must map R^n to R^n"));
        }
        let adam = AdamState::new(net.inner_param_count(), training.adam)?;
        Ok(Self {
            buffer: ReplayBuffer::new(training.memory_size),
            net,
            adam,
            training,
            rng,
            stats: TrainingStats::default(),
        })
    }

    pub fn dim(&self) -> usize {
        self.net.input_dim()
    }

    pub fn net(&self) -> &FeedforwardNet<T> {
        &self.net
    }

    pub fn net_mut(&mut self) -> &mut FeedforwardNet<T> {
        &mut self.net
    }

    pub fn buffer(&self) -> &ReplayBuffer<T> {
        &self.buffer
    }

    pub fn stats(&self) -> &TrainingStats {
        &self.stats
    }

    pub fn adam(&self) -> &AdamState<T> {
        &self.adam
    }

    pub(crate) fn set_stats(&mut self, stats: TrainingStats) {
        self.stats = stats;
    }

    pub fn training(&self) -> &TrainingConfig {
        &self.training
    }

    /// `Ŵᵀ s(x)`
    pub fn estimate(&self, x: &[T]) -> Result<Vec<T>> {
        Ok(self.net.forward(x)?.output)
    }

    pub fn features(&self, x: &[T]) -> Result<Vec<T>> {
        self.net.features(x)
    }

    /// `f̂(x) + ĝu`
    pub fn predict_xdot(&self, x: &[T], gu: &[T]) -> Result<Vec<T>> {
        if gu.len() != self.dim() {
            return Err(Error::config("gu length does not match state dimension"));
        }
        let f_hat = self.estimate(x)?;
        Ok(f_hat.iter().zip(gu).map(|(&f, &g)| f + g).collect())
    }

    /// Stores a sample; returns `true` when the buffer just reached `M`.
    pub fn record(&mut self, sample: ReplaySample<T>) -> Result<bool> {
        sample.check(self.dim())?;
        self.buffer.push(sample)
    }

    /// Mean Smooth L1 of the prediction over every buffered sample.
    pub fn buffer_loss(&self) -> Result<T> {
        let (pred, target) = self.stack(self.buffer.samples().iter())?;
        Ok(smooth_l1(&pred, &target, T::lit(self.training.beta))?.0)
    }

    fn stack<'a>(
        &self,
        samples: impl Iterator<Item = &'a ReplaySample<T>>,
    ) -> Result<(Vec<T>, Vec<T>)> {
        let mut pred = Vec::new();
        let mut target = Vec::new();
        for s in samples {
            pred.extend(self.predict_xdot(&s.x, &s.gu)?);
            target.extend_from_slice(&s.x_dot);
        }
        Ok((pred, target))
    }

    /// One inner-layer training pass over the full buffer.
    ///
    /// The buffer is cut into `M / S_b` contiguous segments whose order is
    /// reshuffled every epoch; each segment is one minibatch and one Adam
    /// step. The outer weights are not touched. Returns the full-buffer loss
    /// after each epoch. The buffer is emptied whether or not training
    /// succeeds; on failure the inner weights and optimizer state are
    /// restored.
    pub fn train(&mut self) -> Result<Vec<T>> {
        if self.buffer.len() != self.training.memory_size {
            return Err(Error::config(format!(
                "training needs a full buffer of {} samples, have {}",
                self.training.memory_size,
                self.buffer.len()
            )));
        }
        let pass = self.stats.passes + self.stats.failed_passes;
        let saved_params = self.net.inner_parameters();
        let saved_adam = self.adam.clone();
        let saved_stats = self.stats.clone();

        let result = self.run_epochs(pass);
        self.buffer.clear();
        match result {
            Ok((losses, visits)) => {
                self.stats.passes += 1;
                if visits.iter().all(|&v| v == self.training.epochs) {
                    self.stats.uniform_visit_passes += 1;
                }
                Ok(losses)
            }
            Err(e) => {
                self.net.set_inner_parameters(&saved_params)?;
                self.adam = saved_adam;
                self.stats = saved_stats;
                self.stats.failed_passes += 1;
                Err(e)
            }
        }
    }

    fn run_epochs(&mut self, pass: u64) -> Result<(Vec<T>, Vec<usize>)> {
        let batch = self.training.batch_size;
        let beta = T::lit(self.training.beta);
        let mut segments: Vec<usize> = (0..self.training.batches_per_epoch()).collect();
        let mut visits = vec![0usize; self.buffer.len()];
        let mut losses = Vec::with_capacity(self.training.epochs);

        for _ in 0..self.training.epochs {
            segments.shuffle(&mut self.rng);
            for &seg in &segments {
                let range = seg * batch..(seg + 1) * batch;
                let samples = &self.buffer.samples()[range.clone()];
                let mut passes = Vec::with_capacity(batch);
                let mut pred = Vec::with_capacity(batch * self.dim());
                let mut target = Vec::with_capacity(batch * self.dim());
                for s in samples {
                    let fp = self.net.forward(&s.x)?;
                    pred.extend(fp.output.iter().zip(&s.gu).map(|(&f, &g)| f + g));
                    target.extend_from_slice(&s.x_dot);
                    passes.push(fp);
                }
                let (loss, grad) = smooth_l1(&pred, &target, beta)?;
                if !loss.is_finite() {
                    return Err(Error::Training {
                        pass,
                        batch: seg,
                        reason: "non-finite minibatch loss".into(),
                    });
                }
                let mut total = GradientSet::zeros_like(&self.net);
                for (fp, g) in passes.iter().zip(grad.chunks(self.dim())) {
                    total.accumulate(&self.net.backward(&fp.cache, g)?);
                }
                let mut params = self.net.inner_parameters();
                self.adam.step(&mut params, &total.inner_flat(), pass, seg)?;
                self.net.set_inner_parameters(&params)?;

                self.stats.adam_steps += 1;
                self.stats.sample_visits += batch as u64;
                visits[range].iter_mut().for_each(|v| *v += 1);
            }
            let loss = self.buffer_loss()?;
            if !loss.is_finite() {
                return Err(Error::Training {
                    pass,
                    batch: segments.len(),
                    reason: "non-finite epoch loss".into(),
                });
            }
            losses.push(loss);
        }
        Ok((losses, visits))
    }
}
