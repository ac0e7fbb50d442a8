use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const GRAVITY: f64 = 9.81;

/// Vehicle physical parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadParams {
    pub mass: f64,
    /// Diagonal inertia (Ixx, Iyy, Izz), kg·m².
    pub inertia: [f64; 3],
    pub arm_length: f64,
    /// Linear drag, N·s/m.
    pub drag: f64,
    /// Rotational drag, N·m·s/rad.
    pub rot_drag: f64,
    pub max_thrust: f64,
    /// Per-axis torque limit, N·m.
    pub max_torque: f64,
    pub gravity: f64,
}

impl Default for QuadParams {
    fn default() -> Self {
        Self {
            mass: 1.2,
            inertia: [0.01, 0.01, 0.02],
            arm_length: 0.25,
            drag: 0.25,
            rot_drag: 1e-3,
            max_thrust: 30.0,
            max_torque: 1.0,
            gravity: GRAVITY,
        }
    }
}

impl QuadParams {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.mass,
            self.inertia[0],
            self.inertia[1],
            self.inertia[2],
            self.arm_length,
            self.max_thrust,
            self.max_torque,
            self.gravity,
        ];
        if all.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::config("plant: mass, inertia, arm, limits and gravity must be positive"));
        }
        if !(self.drag >= 0.0) || !(self.rot_drag >= 0.0) {
            return Err(Error::config("plant: drag coefficients must be non-negative"));
        }
        if self.mass * self.gravity >= self.max_thrust {
            return Err(Error::config("plant: max thrust cannot hold hover"));
        }
        Ok(())
    }

    pub fn hover_thrust(&self) -> f64 {
        self.mass * self.gravity
    }
}
