use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Adam hyperparameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

impl AdamConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.learning_rate > 0.0
            && (0.0..1.0).contains(&self.beta1)
            && (0.0..1.0).contains(&self.beta2)
            && self.epsilon > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::config(format!("invalid Adam hyperparameters: {self:?}")))
        }
    }
}

/// Bias-corrected Adam over a flat parameter vector.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState<T> {
    pub config: AdamConfig,
    first_moment: Vec<T>,
    second_moment: Vec<T>,
    step_count: u64,
}

impl<T: Real> AdamState<T> {
    pub fn new(param_count: usize, config: AdamConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            first_moment: vec![T::zero(); param_count],
            second_moment: vec![T::zero(); param_count],
            step_count: 0,
        })
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    pub fn first_moment(&self) -> &[T] {
        &self.first_moment
    }

    pub fn second_moment(&self) -> &[T] {
        &self.second_moment
    }

    /// One update of `params` in place. On a non-finite gradient nothing is
    /// modified and a training error is returned; `pass` and `batch` only
    /// label that error.
    pub fn step(&mut self, params: &mut [T], grads: &[T], pass: u64, batch: usize) -> Result<()> {
        if params.len() != self.first_moment.len() || grads.len() != params.len() {
            return Err(Error::config(format!(
                "Adam state sized for {} parameters, got {} params and {} grads",
                self.first_moment.len(),
                params.len(),
                grads.len()
            )));
        }
        if let Some(i) = grads.iter().position(|g| !g.is_finite()) {
            return Err(Error::Training {
                pass,
                batch,
                reason: format!("non-finite gradient at parameter {i}"),
            });
        }

        self.step_count += 1;
        let c = &self.config;
        let (b1, b2) = (T::lit(c.beta1), T::lit(c.beta2));
        let lr = T::lit(c.learning_rate);
        let eps = T::lit(c.epsilon);
        let t = self.step_count as i32;
        let bias1 = T::one() - b1.powi(t);
        let bias2 = T::one() - b2.powi(t);

        for (((p, &g), m), v) in params
            .iter_mut()
            .zip(grads)
            .zip(&mut self.first_moment)
            .zip(&mut self.second_moment)
        {
            *m = b1 * *m + (T::one() - b1) * g;
            *v = b2 * *v + (T::one() - b2) * g * g;
            let m_hat = *m / bias1;
            let v_hat = *v / bias2;
            *p -= lr * m_hat / (v_hat.sqrt() + eps);
        }
        Ok(())
    }
}
