//! Position → velocity → attitude-reference cascade, the outer loops of the
//! baseline flight stack.

use serde::{Deserialize, Serialize};

use super::dynamics::{RigidBodyState, Vec3};
use super::params::QuadParams;
use crate::baselines::{PidConfig, PidState};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CascadeConfig {
    /// Position error → velocity correction (x, y, z), output limit in m/s.
    pub position: PidConfig,
    /// Velocity error → desired acceleration (x, y, z), output limit in m/s².
    pub velocity: PidConfig,
    /// Yaw hold, yaw error → yaw torque.
    pub yaw: PidConfig,
    /// Bound on the roll/pitch reference magnitude, rad.
    pub max_tilt: f64,
    /// Time constant of the attitude-reference low-pass, s.
    pub ref_time_constant: f64,
}

impl Default for CascadeConfig {
    fn default() -> Self {
        Self {
            position: PidConfig {
                kp: vec![1.2, 1.2, 1.5],
                ki: vec![0.0, 0.0, 0.0],
                kd: vec![0.0, 0.0, 0.0],
                integrator_limit: 0.0,
                output_limit: 3.0,
            },
            velocity: PidConfig {
                kp: vec![2.5, 2.5, 3.0],
                ki: vec![0.4, 0.4, 1.0],
                kd: vec![0.0, 0.0, 0.0],
                integrator_limit: 1.5,
                output_limit: 6.0,
            },
            yaw: PidConfig::yaw(),
            max_tilt: 0.35,
            ref_time_constant: 0.05,
        }
    }
}

impl CascadeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.position.dim() != 3 || self.velocity.dim() != 3 || self.yaw.dim() != 1 {
            return Err(Error::config("cascade: position/velocity need 3 axes and yaw 1"));
        }
        self.position.validate()?;
        self.velocity.validate()?;
        self.yaw.validate()?;
        if !(self.max_tilt > 0.0 && self.max_tilt < std::f64::consts::FRAC_PI_2) {
            return Err(Error::config("cascade: max_tilt must lie in (0, pi/2)"));
        }
        if !(self.ref_time_constant > 0.0) {
            return Err(Error::config("cascade: ref_time_constant must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CascadeOutput<T> {
    /// Filtered (roll, pitch) reference, rad.
    pub attitude_ref: [T; 2],
    /// Analytic derivative of the filtered reference, rad/s.
    pub attitude_ref_rate: [T; 2],
    /// Unfiltered tilt command after the clamp.
    pub raw_ref: [T; 2],
    pub thrust: T,
}

#[derive(Clone, Debug)]
pub struct CascadeState<T: Real> {
    position: PidState<T>,
    velocity: PidState<T>,
    yaw: PidState<T>,
    max_tilt: T,
    tau: T,
    filtered: [T; 2],
    params: QuadParams,
}

impl<T: Real> CascadeState<T> {
    pub fn new(config: &CascadeConfig, params: &QuadParams) -> Result<Self> {
        config.validate()?;
        params.validate()?;
        Ok(Self {
            position: PidState::new(&config.position)?,
            velocity: PidState::new(&config.velocity)?,
            yaw: PidState::new(&config.yaw)?,
            max_tilt: T::lit(config.max_tilt),
            tau: T::lit(config.ref_time_constant),
            filtered: [T::zero(); 2],
            params: params.clone(),
        })
    }

    pub fn filtered_ref(&self) -> [T; 2] {
        self.filtered
    }

    /// One outer-loop update toward `position_ref` with velocity feed-forward.
    pub fn step(
        &mut self,
        state: &RigidBodyState<T>,
        position_ref: &Vec3<T>,
        velocity_ff: &Vec3<T>,
        dt: T,
    ) -> Result<CascadeOutput<T>> {
        let g = T::lit(self.params.gravity);
        let m = T::lit(self.params.mass);
        let p = &state.position;
        let v = &state.velocity;

        let e_p: Vec<T> = (0..3).map(|i| position_ref[i] - p[i]).collect();
        let e_p_rate: Vec<T> = (0..3).map(|i| velocity_ff[i] - v[i]).collect();
        let correction = self.position.step(&e_p, &e_p_rate, dt)?;
        let v_ref: Vec<T> = (0..3).map(|i| velocity_ff[i] + correction[i]).collect();

        let e_v: Vec<T> = (0..3).map(|i| v_ref[i] - v[i]).collect();
        let a = self.velocity.step_differencing(&e_v, dt)?;

        // Rotate the horizontal demand into the yaw frame.
        let (sp, cp) = state.attitude[2].sin_cos();
        let a_fwd = cp * a[0] + sp * a[1];
        let a_left = -sp * a[0] + cp * a[1];
        let mut raw = [-a_left / g, a_fwd / g];
        let mag = (raw[0] * raw[0] + raw[1] * raw[1]).sqrt();
        if mag > self.max_tilt {
            let s = self.max_tilt / mag;
            raw = [raw[0] * s, raw[1] * s];
        }

        let tilt = state.attitude[0].cos() * state.attitude[1].cos();
        let thrust = (m * (g + a[2]) / tilt).clamp_to(T::zero(), T::lit(self.params.max_thrust));

        let decay = (-dt / self.tau).exp();
        let mut rate = [T::zero(); 2];
        for i in 0..2 {
            self.filtered[i] = raw[i] + (self.filtered[i] - raw[i]) * decay;
            rate[i] = (raw[i] - self.filtered[i]) / self.tau;
        }

        Ok(CascadeOutput {
            attitude_ref: self.filtered,
            attitude_ref_rate: rate,
            raw_ref: raw,
            thrust,
        })
    }

    /// Yaw-hold torque toward `yaw_ref`.
    pub fn yaw_torque(&mut self, state: &RigidBodyState<T>, yaw_ref: T, dt: T) -> Result<T> {
        let pi = T::PI();
        let mut e = yaw_ref - state.attitude[2];
        while e > pi {
            e -= pi + pi;
        }
        while e < -pi {
            e += pi + pi;
        }
        let rate = -state.euler_rates()[2];
        Ok(self.yaw.step(&[e], &[rate], dt)?[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cascade() -> CascadeState<f64> {
        CascadeState::new(&CascadeConfig::default(), &QuadParams::default()).unwrap()
    }

    #[test]
    fn hover_at_reference() {
        let mut c = cascade();
        let s = RigidBodyState::at_rest([0.0, 0.0, 1.0]);
        let out = c.step(&s, &[0.0, 0.0, 1.0], &[0.0; 3], 0.004).unwrap();
        assert_eq!(out.attitude_ref, [0.0, 0.0]);
        assert_eq!(out.attitude_ref_rate, [0.0, 0.0]);
        assert!((out.thrust - 1.2 * 9.81).abs() < 1e-12);
    }

    #[test]
    fn forward_demand_pitches_positive() {
        let mut c = cascade();
        let s = RigidBodyState::at_rest([0.0, 0.0, 1.0]);
        let out = c.step(&s, &[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0], 0.004).unwrap();
        assert!(out.raw_ref[1] > 0.0);
        assert!(out.attitude_ref[1] > 0.0);
        assert_eq!(out.raw_ref[0], 0.0);
    }

    #[test]
    fn leftward_demand_rolls_negative() {
        let mut c = cascade();
        let s = RigidBodyState::at_rest([0.0, 0.0, 1.0]);
        let out = c.step(&s, &[0.0, 0.0, 1.0], &[0.0, 1.0, 0.0], 0.004).unwrap();
        assert!(out.raw_ref[0] < 0.0);
    }

    #[test]
    fn demand_is_rotated_by_yaw() {
        let mut c = cascade();
        let mut s = RigidBodyState::at_rest([0.0, 0.0, 1.0]);
        s.attitude[2] = std::f64::consts::FRAC_PI_2;
        // Facing +y, a +y demand is forward.
        let out = c.step(&s, &[0.0, 0.0, 1.0], &[0.0, 1.0, 0.0], 0.004).unwrap();
        assert!(out.raw_ref[1] > 0.0);
        assert!(out.raw_ref[0].abs() < 1e-12);
    }

    #[test]
    fn step_reference_respects_tilt_limit() {
        let mut c = cascade();
        let s = RigidBodyState::at_rest([0.0, 0.0, 1.0]);
        for _ in 0..1000 {
            let out = c.step(&s, &[50.0, -30.0, 1.0], &[0.0; 3], 0.004).unwrap();
            for r in [out.raw_ref, out.attitude_ref] {
                assert!((r[0] * r[0] + r[1] * r[1]).sqrt() <= 0.35 + 1e-12);
            }
        }
    }

    #[test]
    fn filter_rate_matches_finite_difference() {
        let mut c = cascade();
        let s = RigidBodyState::at_rest([0.0, 0.0, 1.0]);
        let dt = 1e-4;
        let a = c.step(&s, &[0.3, 0.0, 1.0], &[0.0; 3], dt).unwrap();
        let b = c.step(&s, &[0.3, 0.0, 1.0], &[0.0; 3], dt).unwrap();
        let fd = (b.attitude_ref[1] - a.attitude_ref[1]) / dt;
        assert!((fd - b.attitude_ref_rate[1]).abs() < 1e-2 * b.attitude_ref_rate[1].abs());
    }

    #[test]
    fn yaw_error_wraps() {
        let mut c = cascade();
        let mut s = RigidBodyState::at_rest([0.0; 3]);
        s.attitude[2] = 3.0;
        let tau = c.yaw_torque(&s, -3.0, 0.004).unwrap();
        // Shortest way from 3 to −3 is positive.
        assert!(tau > 0.0);
    }
}
