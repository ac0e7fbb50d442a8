use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{all_finite, Real};

/// One replay entry: measured state derivative, state, and `ĝ·u` where `u`
/// is the total torque actually applied.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ReplaySample<T> {
    pub x_dot: Vec<T>,
    pub x: Vec<T>,
    pub gu: Vec<T>,
}

impl<T: Real> ReplaySample<T> {
    pub fn new(x_dot: Vec<T>, x: Vec<T>, gu: Vec<T>) -> Self {
        Self { x_dot, x, gu }
    }

    pub(crate) fn check(&self, n: usize) -> Result<()> {
        if self.x_dot.len() != n || self.x.len() != n || self.gu.len() != n {
            return Err(Error::config(format!("replay sample must have {n} components per field")));
        }
        if !(all_finite(&self.x_dot) && all_finite(&self.x) && all_finite(&self.gu)) {
            return Err(Error::input("non-finite replay sample"));
        }
        Ok(())
    }
}

/// Fixed-capacity buffer that is consumed whole by one training pass and
/// then emptied.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ReplayBuffer<T> {
    capacity: usize,
    samples: Vec<ReplaySample<T>>,
}

impl<T: Real> ReplayBuffer<T> {
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity,
            samples: Vec::with_capacity(capacity),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.samples.len() >= self.capacity
    }

    pub fn samples(&self) -> &[ReplaySample<T>] {
        &self.samples
    }

    /// Appends a sample; returns `true` when the buffer has just become full.
    /// Pushing into a full buffer is an error: it must be trained and
    /// cleared first.
    pub fn push(&mut self, sample: ReplaySample<T>) -> Result<bool> {
        if self.is_full() {
            return Err(Error::config("replay buffer is full; train before recording"));
        }
        self.samples.push(sample);
        Ok(self.is_full())
    }

    pub fn clear(&mut self) {
        self.samples.clear();
    }
}
