use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{all_finite, Real};

/// Per-axis PID gains and limits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PidConfig {
    pub kp: Vec<f64>,
    pub ki: Vec<f64>,
    pub kd: Vec<f64>,
    /// Bound on `|∫e dt|` per axis (rad·s).
    pub integrator_limit: f64,
    /// Bound on the output per axis (N·m).
    pub output_limit: f64,
}

impl Default for PidConfig {
    /// Roll/pitch attitude gains.
    fn default() -> Self {
        Self {
            kp: vec![0.6, 0.6],
            ki: vec![0.3, 0.3],
            kd: vec![0.12, 0.12],
            integrator_limit: 1.0,
            output_limit: 1.0,
        }
    }
}

impl PidConfig {
    /// The same gains on every one of `n` axes.
    pub fn uniform(n: usize, kp: f64, ki: f64, kd: f64, integrator_limit: f64, output_limit: f64) -> Self {
        Self {
            kp: vec![kp; n],
            ki: vec![ki; n],
            kd: vec![kd; n],
            integrator_limit,
            output_limit,
        }
    }

    /// Yaw-rate-hold gains for the third axis.
    pub fn yaw() -> Self {
        Self::uniform(1, 0.3, 0.05, 0.08, 1.0, 0.5)
    }

    pub fn dim(&self) -> usize {
        self.kp.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.kp.len();
        if n == 0 || self.ki.len() != n || self.kd.len() != n {
            return Err(Error::config("pid: kp, ki and kd must have the same non-zero length"));
        }
        let gains = self.kp.iter().chain(&self.ki).chain(&self.kd);
        if gains.clone().any(|&g| !(g >= 0.0) || !g.is_finite()) {
            return Err(Error::config("pid: gains must be finite and non-negative"));
        }
        if !(self.integrator_limit >= 0.0) || !(self.output_limit > 0.0) {
            return Err(Error::config("pid: limits must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PidState<T: Real> {
    kp: Vec<T>,
    ki: Vec<T>,
    kd: Vec<T>,
    integrator_limit: T,
    output_limit: T,
    integrator: Vec<T>,
    prev_error: Option<Vec<T>>,
}

impl<T: Real> PidState<T> {
    pub fn new(config: &PidConfig) -> Result<Self> {
        config.validate()?;
        let lift = |v: &[f64]| v.iter().map(|&g| T::lit(g)).collect::<Vec<T>>();
        Ok(Self {
            kp: lift(&config.kp),
            ki: lift(&config.ki),
            kd: lift(&config.kd),
            integrator_limit: T::lit(config.integrator_limit),
            output_limit: T::lit(config.output_limit),
            integrator: vec![T::zero(); config.dim()],
            prev_error: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.kp.len()
    }

    pub fn integrator(&self) -> &[T] {
        &self.integrator
    }

    pub fn reset(&mut self) {
        self.integrator.iter_mut().for_each(|v| *v = T::zero());
        self.prev_error = None;
    }

    /// `kp·e + ki·∫e + kd·ė` with a clamped integrator and saturated output.
    pub fn step(&mut self, error: &[T], error_rate: &[T], dt: T) -> Result<Vec<T>> {
        let n = self.dim();
        if error.len() != n || error_rate.len() != n {
            return Err(Error::config(format!("pid expects {n} axes")));
        }
        if !(dt > T::zero()) {
            return Err(Error::config("pid step needs dt > 0"));
        }
        if !all_finite(error) || !all_finite(error_rate) {
            return Err(Error::input("non-finite pid input"));
        }
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            self.integrator[i] = (self.integrator[i] + error[i] * dt)
                .clamp_to(-self.integrator_limit, self.integrator_limit);
            let u = self.kp[i] * error[i] + self.ki[i] * self.integrator[i] + self.kd[i] * error_rate[i];
            out.push(u.clamp_to(-self.output_limit, self.output_limit));
        }
        self.prev_error = Some(error.to_vec());
        Ok(out)
    }

    /// As [`step`](Self::step) with `ė` from a backward difference of the
    /// previous error (zero on the first call).
    pub fn step_differencing(&mut self, error: &[T], dt: T) -> Result<Vec<T>> {
        let rate = match &self.prev_error {
            Some(prev) if prev.len() == error.len() => {
                error.iter().zip(prev).map(|(&e, &p)| (e - p) / dt).collect()
            }
            _ => vec![T::zero(); error.len()],
        };
        self.step(error, &rate, dt)
    }
}
