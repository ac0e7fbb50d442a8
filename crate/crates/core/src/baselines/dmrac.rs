//! Deep MRAC: the model-reference law of [`super::mrac`] with the fixed basis
//! replaced by learned DNN features. The outer layer adapts against the
//! model-following error; the inner layers train on the replay buffer on the
//! same schedule as DNAC.

use serde::{Deserialize, Serialize};

use super::mrac::{AdaptiveOutput, MracConfig, ModelReferenceLaw};
use crate::dnac::{DeepEstimator, ReplaySample, TrainingConfig, TrainingStats};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DmracConfig {
    #[serde(flatten)]
    pub mrac: MracConfig,
    #[serde(flatten)]
    pub training: TrainingConfig,
}

impl DmracConfig {
    pub fn validate(&self) -> Result<()> {
        self.mrac.validate()?;
        self.training.validate()
    }
}

#[derive(Clone, Debug)]
pub struct DmracState<T: Real> {
    law: ModelReferenceLaw<T>,
    estimator: DeepEstimator<T>,
}

impl<T: Real> DmracState<T> {
    pub fn new(config: &DmracConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let law = ModelReferenceLaw::new(&config.mrac)?;
        let estimator = DeepEstimator::new(law.dim(), config.training.clone(), seed)?;
        Ok(Self { law, estimator })
    }

    pub fn law(&self) -> &ModelReferenceLaw<T> {
        &self.law
    }

    pub fn estimator(&self) -> &DeepEstimator<T> {
        &self.estimator
    }

    pub fn estimator_mut(&mut self) -> &mut DeepEstimator<T> {
        &mut self.estimator
    }

    pub fn stats(&self) -> &TrainingStats {
        self.estimator.stats()
    }

    pub fn reset_reference(&mut self, x0: &[T]) -> Result<()> {
        self.law.reference_mut().reset(x0)
    }

    pub fn weight_norm(&self) -> T {
        self.estimator.net().outer_weights().frobenius_norm()
    }

    /// Command and outer-layer adaptation. Replay recording and training are
    /// separate calls so the caller can record the total applied torque.
    pub fn step(&mut self, x: &[T], r: &[T], dt: T) -> Result<AdaptiveOutput<T>> {
        if x.len() != self.law.dim() {
            return Err(Error::config("dmrac: wrong state dimension"));
        }
        let phi = self.estimator.features(x)?;
        let mut w = self.estimator.net().outer_weights().clone();
        let out = self.law.step(&mut w, &phi, x, r, dt)?;
        *self.estimator.net_mut().outer_weights_mut() = w;
        Ok(out)
    }

    /// Appends a replay sample; `true` means a training pass is due.
    pub fn record_sample(&mut self, sample: ReplaySample<T>) -> Result<bool> {
        self.estimator.record(sample)
    }

    pub fn train_inner(&mut self) -> Result<Vec<T>> {
        self.estimator.train()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    #[test]
    fn zero_model_error_does_not_adapt() {
        let mut d = DmracState::<f64>::new(&DmracConfig::default(), 0).unwrap();
        d.reset_reference(&[0.05, 0.02]).unwrap();
        d.step(&[0.05, 0.02], &[0.1, 0.1], 0.004).unwrap();
        assert_eq!(d.estimator().net().outer_weights(), &Matrix::zeros(8, 2));
    }

    #[test]
    fn adapts_along_features() {
        let mut d = DmracState::<f64>::new(&DmracConfig::default(), 1).unwrap();
        let x = [0.1, -0.1];
        let phi = d.estimator().features(&x).unwrap();
        d.step(&x, &[0.0, 0.0], 0.004).unwrap();
        // Ŵ = Γ dt φ (P e)ᵀ with P = 0.125 I, e = x
        let w = d.estimator().net().outer_weights();
        for i in 0..8 {
            for k in 0..2 {
                let expected = 10.0 * 0.004 * phi[i] * 0.125 * x[k];
                assert!((w.get(i, k) - expected).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn training_cadence_matches_dnac() {
        let mut d = DmracState::<f64>::new(&DmracConfig::default(), 2).unwrap();
        let mut fired = 0;
        for k in 0..250 {
            let v = k as f64 * 1e-3;
            let s = ReplaySample::new(vec![v, -v], vec![v, 0.0], vec![0.0, v]);
            if d.record_sample(s).unwrap() {
                d.train_inner().unwrap();
                fired += 1;
            }
        }
        assert_eq!(fired, 2);
        assert_eq!(d.stats().adam_steps, 50);
        assert_eq!(d.estimator().buffer().len(), 50);
    }

    #[test]
    fn config_is_flat_json() {
        let c: DmracConfig = serde_json::from_str(r#"{"gamma": 3.0, "memory_size": 50, "batch_size": 10}"#).unwrap();
        assert_eq!(c.mrac.gamma, 3.0);
        assert_eq!(c.training.memory_size, 50);
        c.validate().unwrap();
    }
}
