//! Rigid-body quadrotor model.
//!
//! World frame is east-north-up, body frame forward-left-up, attitude is
//! Z-Y-X Euler angles. Thrust acts along body +z.

use serde::{Deserialize, Serialize};

use super::params::QuadParams;
use crate::error::{Error, Result};
use crate::ode::{self, OdeState};
use crate::scalar::Real;

/// Tilt beyond which the simulation is aborted (85°).
pub const CRASH_ANGLE: f64 = 85.0 * std::f64::consts::PI / 180.0;

pub type Vec3<T> = [T; 3];

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct RigidBodyState<T> {
    pub position: Vec3<T>,
    pub velocity: Vec3<T>,
    /// (roll φ, pitch θ, yaw ψ)
    pub attitude: Vec3<T>,
    /// (p, q, r)
    pub body_rates: Vec3<T>,
}

impl<T: Real> RigidBodyState<T> {
    pub fn at_rest(position: Vec3<T>) -> Self {
        Self {
            position,
            velocity: [T::zero(); 3],
            attitude: [T::zero(); 3],
            body_rates: [T::zero(); 3],
        }
    }

    pub fn roll_pitch(&self) -> [T; 2] {
        [self.attitude[0], self.attitude[1]]
    }

    pub fn is_finite(&self) -> bool {
        self.position
            .iter()
            .chain(&self.velocity)
            .chain(&self.attitude)
            .chain(&self.body_rates)
            .all(|v| v.is_finite())
    }

    /// `(φ̇, θ̇, ψ̇)` from the body rates.
    pub fn euler_rates(&self) -> Vec3<T> {
        euler_rates(&self.attitude, &self.body_rates)
    }
}

fn add3<T: Real>(a: &Vec3<T>, b: &Vec3<T>, h: T) -> Vec3<T> {
    [a[0] + h * b[0], a[1] + h * b[1], a[2] + h * b[2]]
}

impl<T: Real> OdeState<T> for RigidBodyState<T> {
    fn add_scaled(&self, d: &Self, h: T) -> Self {
        Self {
            position: add3(&self.position, &d.position, h),
            velocity: add3(&self.velocity, &d.velocity, h),
            attitude: add3(&self.attitude, &d.attitude, h),
            body_rates: add3(&self.body_rates, &d.body_rates, h),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ActuatorCommand<T> {
    /// Total thrust along body z, N.
    pub thrust: T,
    /// Body torque, N·m.
    pub torque: Vec3<T>,
}

/// External force (world frame, N) and torque (body frame, N·m).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Wrench<T> {
    pub force: Vec3<T>,
    pub torque: Vec3<T>,
}

impl<T: Real> Wrench<T> {
    pub fn zero() -> Self {
        Self {
            force: [T::zero(); 3],
            torque: [T::zero(); 3],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.force.iter().chain(&self.torque).all(|v| v.is_finite())
    }
}

pub fn cross<T: Real>(a: &Vec3<T>, b: &Vec3<T>) -> Vec3<T> {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm3<T: Real>(a: &Vec3<T>) -> T {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

/// Body-to-world rotation `R = R_z(ψ) R_y(θ) R_x(φ)`, row-major.
pub fn rotation<T: Real>(attitude: &Vec3<T>) -> [[T; 3]; 3] {
    let (sf, cf) = attitude[0].sin_cos();
    let (st, ct) = attitude[1].sin_cos();
    let (sp, cp) = attitude[2].sin_cos();
    [
        [cp * ct, cp * st * sf - sp * cf, cp * st * cf + sp * sf],
        [sp * ct, sp * st * sf + cp * cf, sp * st * cf - cp * sf],
        [-st, ct * sf, ct * cf],
    ]
}

pub fn body_to_world<T: Real>(attitude: &Vec3<T>, v: &Vec3<T>) -> Vec3<T> {
    let r = rotation(attitude);
    [0, 1, 2].map(|i| r[i][0] * v[0] + r[i][1] * v[1] + r[i][2] * v[2])
}

pub fn world_to_body<T: Real>(attitude: &Vec3<T>, v: &Vec3<T>) -> Vec3<T> {
    let r = rotation(attitude);
    [0, 1, 2].map(|i| r[0][i] * v[0] + r[1][i] * v[1] + r[2][i] * v[2])
}

pub fn euler_rates<T: Real>(attitude: &Vec3<T>, rates: &Vec3<T>) -> Vec3<T> {
    let (sf, cf) = attitude[0].sin_cos();
    let (p, q, r) = (rates[0], rates[1], rates[2]);
    let ct = attitude[1].cos();
    let tt = attitude[1].tan();
    [p + sf * tt * q + cf * tt * r, cf * q - sf * r, (sf * q + cf * r) / ct]
}

fn check_envelope<T: Real>(state: &RigidBodyState<T>) -> Result<()> {
    if !state.is_finite() {
        return Err(Error::crash("non-finite vehicle state"));
    }
    let limit = T::lit(CRASH_ANGLE);
    if state.attitude[0].abs() > limit || state.attitude[1].abs() > limit {
        return Err(Error::crash(format!(
            "tilt beyond 85 degrees (roll {:.3}, pitch {:.3} rad)",
            state.attitude[0], state.attitude[1]
        )));
    }
    Ok(())
}

/// Time derivative of the full rigid-body state.
pub fn dynamics_derivative<T: Real>(
    state: &RigidBodyState<T>,
    cmd: &ActuatorCommand<T>,
    wrench: &Wrench<T>,
    params: &QuadParams,
) -> Result<RigidBodyState<T>> {
    check_envelope(state)?;
    let m = T::lit(params.mass);
    let g = T::lit(params.gravity);
    let drag = T::lit(params.drag);
    let rot_drag = T::lit(params.rot_drag);
    let inertia = params.inertia.map(T::lit);

    let thrust = body_to_world(&state.attitude, &[T::zero(), T::zero(), cmd.thrust]);
    let v = &state.velocity;
    let accel = [0, 1, 2].map(|i| {
        let gravity = if i == 2 { m * g } else { T::zero() };
        (thrust[i] - gravity - drag * v[i] + wrench.force[i]) / m
    });

    let w = &state.body_rates;
    let iw = [inertia[0] * w[0], inertia[1] * w[1], inertia[2] * w[2]];
    let gyro = cross(w, &iw);
    let w_dot = [0, 1, 2]
        .map(|i| (cmd.torque[i] - gyro[i] - rot_drag * w[i] + wrench.torque[i]) / inertia[i]);

    Ok(RigidBodyState {
        position: *v,
        velocity: accel,
        attitude: state.euler_rates(),
        body_rates: w_dot,
    })
}

/// RK4 step with command and wrench held over the step.
pub fn rk4_step<T: Real>(
    state: &RigidBodyState<T>,
    cmd: &ActuatorCommand<T>,
    wrench: &Wrench<T>,
    params: &QuadParams,
    dt: T,
) -> Result<RigidBodyState<T>> {
    if !(dt > T::zero()) {
        return Err(Error::config("rk4 step needs dt > 0"));
    }
    let next = ode::rk4_step(state, dt, |s| dynamics_derivative(s, cmd, wrench, params))?;
    check_envelope(&next)?;
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hover_cmd(p: &QuadParams) -> ActuatorCommand<f64> {
        ActuatorCommand {
            thrust: p.hover_thrust(),
            torque: [0.0; 3],
        }
    }

    #[test]
    fn hover_is_equilibrium() {
        let p = QuadParams::default();
        let s = RigidBodyState::at_rest([0.0, 0.0, 1.0]);
        let d = dynamics_derivative(&s, &hover_cmd(&p), &Wrench::zero(), &p).unwrap();
        assert_eq!(d, RigidBodyState::default());
    }

    #[test]
    fn free_fall() {
        let p = QuadParams::default();
        let s = RigidBodyState::at_rest([0.0, 0.0, 1.0]);
        let d = dynamics_derivative(&s, &ActuatorCommand::default(), &Wrench::zero(), &p).unwrap();
        assert_eq!(d.velocity, [0.0, 0.0, -9.81]);
    }

    #[test]
    fn roll_torque_newton_euler() {
        let p = QuadParams::default();
        let s = RigidBodyState::<f64>::at_rest([0.0; 3]);
        let cmd = ActuatorCommand {
            thrust: 0.0,
            torque: [0.01, 0.0, 0.0],
        };
        let d = dynamics_derivative(&s, &cmd, &Wrench::zero(), &p).unwrap();
        assert!((d.body_rates[0] - 1.0).abs() < 1e-15);
        assert_eq!(d.body_rates[1], 0.0);
        assert_eq!(d.body_rates[2], 0.0);
    }

    #[test]
    fn rotation_is_orthonormal_and_consistent() {
        let att = [0.3, -0.2, 1.1];
        let r = rotation(&att);
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|k| r[i][k] * r[j][k]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-14);
            }
        }
        let v = [0.4, -1.0, 2.0];
        let back = world_to_body(&att, &body_to_world(&att, &v));
        for i in 0..3 {
            assert!((back[i] - v[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn positive_pitch_tilts_thrust_forward_and_positive_roll_to_minus_y() {
        let z = [0.0, 0.0, 1.0];
        let pitched = body_to_world(&[0.0, 0.1, 0.0], &z);
        assert!(pitched[0] > 0.0);
        let rolled = body_to_world(&[0.1, 0.0, 0.0], &z);
        assert!(rolled[1] < 0.0);
    }

    #[test]
    fn zero_field_step_unchanged() {
        // Hover with no drag is a fixed point of the integrator.
        let p = QuadParams::default();
        let s = RigidBodyState::at_rest([1.0, 2.0, 3.0]);
        let next = rk4_step(&s, &hover_cmd(&p), &Wrench::zero(), &p, 0.001).unwrap();
        assert_eq!(next, s);
    }

    #[test]
    fn roll_oscillator_conserves_energy() {
        let mut p = QuadParams::default();
        p.rot_drag = 0.0;
        let k = 0.5;
        let ixx = p.inertia[0];
        let mut s = RigidBodyState::at_rest([0.0, 0.0, 1.0]);
        s.attitude[0] = 0.05;
        let energy = |s: &RigidBodyState<f64>| 0.5 * ixx * s.body_rates[0].powi(2) + 0.5 * k * s.attitude[0].powi(2);
        let e0 = energy(&s);
        let cmd = hover_cmd(&p);
        for _ in 0..10_000 {
            s = ode::rk4_step(&s, 0.001, |x: &RigidBodyState<f64>| {
                let spring = Wrench {
                    force: [0.0; 3],
                    torque: [-k * x.attitude[0], 0.0, 0.0],
                };
                dynamics_derivative(x, &cmd, &spring, &p)
            })
            .unwrap();
        }
        assert!(((energy(&s) - e0) / e0).abs() < 1e-3);
    }

    #[test]
    fn excessive_tilt_is_a_crash() {
        let p = QuadParams::default();
        let mut s = RigidBodyState::at_rest([0.0; 3]);
        s.attitude[1] = 1.5;
        let err = rk4_step(&s, &hover_cmd(&p), &Wrench::zero(), &p, 0.001).unwrap_err();
        assert!(matches!(err, Error::Crash { .. }));
        let err = err.at_time(2.5);
        assert!(matches!(err, Error::Crash { time, .. } if time == 2.5));
    }

    #[test]
    fn euler_rates_level_equal_body_rates() {
        assert_eq!(euler_rates(&[0.0; 3], &[0.1, -0.2, 0.3]), [0.1, -0.2, 0.3]);
    }
}
