use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plant::{cross, norm3, world_to_body, RigidBodyState, Vec3, Wrench};

/// Fan core speed, 18 mph in m/s.
pub const FAN_WIND_SPEED: f64 = 8.05;

/// Conical fan jet with exponential axial decay.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WindField {
    pub source: Vec3<f64>,
    /// Blow direction; normalised on use.
    pub direction: Vec3<f64>,
    pub core_speed: f64,
    pub cone_half_angle: f64,
    pub decay_length: f64,
    /// Linear ramp-up time from t = 0; 0 switches on instantly.
    pub ramp_time: f64,
    /// Linear drag coefficient applied to the local wind velocity, N·s/m.
    pub drag: f64,
    /// Height of the centre of pressure above the centre of mass, m.
    pub lever: f64,
}

impl Default for WindField {
    fn default() -> Self {
        Self {
            source: [-2.0, 0.0, 1.0],
            direction: [1.0, 0.0, 0.0],
            core_speed: FAN_WIND_SPEED,
            cone_half_angle: 0.6,
            decay_length: 4.0,
            ramp_time: 2.0,
            drag: 0.3,
            lever: 0.02,
        }
    }
}

impl WindField {
    pub fn validate(&self) -> Result<()> {
        if !(self.core_speed >= 0.0) || !(self.drag >= 0.0) || !self.lever.is_finite() {
            return Err(Error::config("wind: core_speed and drag must be non-negative"));
        }
        if !(self.cone_half_angle > 0.0 && self.cone_half_angle < std::f64::consts::FRAC_PI_2) {
            return Err(Error::config("wind: cone_half_angle must lie in (0, pi/2)"));
        }
        if !(self.decay_length > 0.0) || !(self.ramp_time >= 0.0) {
            return Err(Error::config("wind: decay_length must be positive"));
        }
        if !(norm3(&self.direction) > 0.0) {
            return Err(Error::config("wind: direction must be non-zero"));
        }
        Ok(())
    }

    fn unit_direction(&self) -> Vec3<f64> {
        let n = norm3(&self.direction);
        self.direction.map(|v| v / n)
    }

    /// Local wind velocity at `p` and time `t`.
    pub fn velocity_at(&self, p: &Vec3<f64>, t: f64) -> Vec3<f64> {
        let dir = self.unit_direction();
        let d = [0, 1, 2].map(|i| p[i] - self.source[i]);
        let axial = d[0] * dir[0] + d[1] * dir[1] + d[2] * dir[2];
        if axial <= 0.0 {
            return [0.0; 3];
        }
        let radial = norm3(&[0, 1, 2].map(|i| d[i] - axial * dir[i]));
        let angle = radial.atan2(axial);
        if angle >= self.cone_half_angle {
            return [0.0; 3];
        }
        let falloff = (std::f64::consts::FRAC_PI_2 * angle / self.cone_half_angle).cos().powi(2);
        let ramp = if self.ramp_time > 0.0 {
            (t / self.ramp_time).clamp(0.0, 1.0)
        } else {
            1.0
        };
        let speed = self.core_speed * (-axial / self.decay_length).exp() * falloff * ramp;
        dir.map(|v| speed * v)
    }

    /// Wind contribution to the aerodynamic wrench. The plant applies the
    /// still-air drag `−c_d v`, so with equal coefficients the total
    /// aerodynamic force is `c (w − v)`.
    pub fn wrench(&self, state: &RigidBodyState<f64>, t: f64) -> Wrench<f64> {
        let w = self.velocity_at(&state.position, t);
        let force = w.map(|v| self.drag * v);
        let f_body = world_to_body(&state.attitude, &force);
        Wrench {
            force,
            torque: cross(&[0.0, 0.0, self.lever], &f_body),
        }
    }
}
