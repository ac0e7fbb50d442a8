use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plant::{RigidBodyState, Wrench};

/// Wall-proximity turbulence parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WallConfig {
    /// Horizontal wall segments as `[[x0, y0], [x1, y1]]`.
    pub segments: Vec<[[f64; 2]; 2]>,
    pub influence_distance: f64,
    /// Stationary roll/pitch torque standard deviation at contact, N·m.
    pub contact_std: f64,
    pub correlation_time: f64,
    /// Per-axis clip on the output torque, N·m.
    pub max_torque: f64,
}

impl Default for WallConfig {
    fn default() -> Self {
        Self {
            segments: Vec::new(),
            influence_distance: 1.0,
            contact_std: 0.06,
            correlation_time: 0.15,
            max_torque: 0.3,
        }
    }
}

impl WallConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.influence_distance > 0.0) || !(self.correlation_time > 0.0) {
            return Err(Error::config("wall: influence_distance and correlation_time must be positive"));
        }
        if !(self.contact_std >= 0.0) || !(self.max_torque > 0.0) {
            return Err(Error::config("wall: contact_std must be non-negative and max_torque positive"));
        }
        if self.segments.iter().flatten().flatten().any(|v| !v.is_finite()) {
            return Err(Error::config("wall: non-finite segment"));
        }
        Ok(())
    }

    /// Horizontal distance from `(x, y)` to the nearest segment.
    pub fn distance(&self, x: f64, y: f64) -> f64 {
        self.segments
            .iter()
            .map(|&[a, b]| point_segment_distance([x, y], a, b))
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn point_segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let s = if len2 > 0.0 {
        ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (ap[0] - s * ab[0]).hypot(ap[1] - s * ab[1])
}

/// Ornstein–Uhlenbeck roll/pitch torque whose amplitude scales with
/// `1 − d/D` inside the influence distance `D`.
#[derive(Clone, Debug)]
pub struct WallEffect {
    config: WallConfig,
    noise: [f64; 2],
    rng: ChaCha8Rng,
}

impl WallEffect {
    pub fn new(config: WallConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            noise: [0.0; 2],
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn config(&self) -> &WallConfig {
        &self.config
    }

    pub fn noise_state(&self) -> [f64; 2] {
        self.noise
    }

    pub fn wrench(&mut self, state: &RigidBodyState<f64>, dt: f64) -> Wrench<f64> {
        let d = self.config.distance(state.position[0], state.position[1]);
        let a = (-dt / self.config.correlation_time).exp();
        if !(d <= self.config.influence_distance) {
            self.noise = self.noise.map(|x| x * a);
            return Wrench::zero();
        }
        let kick = self.config.contact_std * (1.0 - a * a).sqrt();
        for x in self.noise.iter_mut() {
            let xi: f64 = StandardNormal.sample(&mut self.rng);
            *x = *x * a + kick * xi;
        }
        let scale = 1.0 - d / self.config.influence_distance;
        let lim = self.config.max_torque;
        Wrench {
            force: [0.0; 3],
            torque: [
                (scale * self.noise[0]).clamp(-lim, lim),
                (scale * self.noise[1]).clamp(-lim, lim),
                0.0,
            ],
        }
    }
}
