//! Hanging, partially filled bottle: a damped pendulum from an off-centre
//! attachment point with a sloshing oscillator that pushes the bob
//! sideways.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::rk4_step;
use crate::plant::{cross, world_to_body, RigidBodyState, Vec3, Wrench, GRAVITY};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SlungConfig {
    /// Attachment point in the body frame, m.
    pub offset: Vec3<f64>,
    pub length: f64,
    /// Bottle plus water, kg.
    pub mass: f64,
    pub pendulum_damping: f64,
    /// Slosh natural frequency, rad/s.
    pub slosh_frequency: f64,
    pub slosh_damping: f64,
    /// Lateral bob acceleration per unit slosh displacement, in units of
    /// `ω_s²`.
    pub slosh_coupling: f64,
    /// Standard deviation of the random slosh forcing, m/s².
    pub slosh_noise: f64,
    /// Time over which the bottle's weight is taken up from the ground, s.
    pub pickup_time: f64,
    /// Limit on string tension, N.
    pub max_tension: f64,
    pub gravity: f64,
}

impl Default for SlungConfig {
    fn default() -> Self {
        Self {
            offset: [0.177, 0.177, -0.02],
            length: 0.3,
            mass: 0.165,
            pendulum_damping: 0.1,
            slosh_frequency: 9.0,
            slosh_damping: 0.1,
            slosh_coupling: 0.5,
            slosh_noise: 4.0,
            pickup_time: 2.0,
            max_tension: 1.95,
            gravity: GRAVITY,
        }
    }
}

impl SlungConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.mass >= 0.0) || !(self.length > 0.0) || !(self.gravity > 0.0) {
            return Err(Error::config("slung mass: mass must be non-negative and length positive"));
        }
        let ratios = [self.pendulum_damping, self.slosh_damping];
        if ratios.iter().any(|&z| !(z > 0.0 && z < 1.0)) {
            return Err(Error::config("slung mass: damping ratios must lie in (0, 1)"));
        }
        if !(self.max_tension > 0.0) {
            return Err(Error::config("slung mass: max_tension must be positive"));
        }
        if !(self.pickup_time >= 0.0) {
            return Err(Error::config("slung mass: pickup_time must be non-negative"));
        }
        if !(self.slosh_frequency > 0.0) || !(self.slosh_coupling >= 0.0) || !(self.slosh_noise >= 0.0) {
            return Err(Error::config("slung mass: slosh parameters out of range"));
        }
        if self.offset.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("slung mass: non-finite offset"));
        }
        Ok(())
    }
}

/// Internal state `[a_x, a_y, ȧ_x, ȧ_y, s_x, s_y, ṡ_x, ṡ_y]`: pendulum
/// swing angles in the world x–z and y–z planes and slosh displacements.
#[derive(Clone, Debug)]
pub struct SlungMass {
    config: SlungConfig,
    state: Vec<f64>,
    prev_velocity: Option<Vec3<f64>>,
    elapsed: f64,
    rng: ChaCha8Rng,
}

impl SlungMass {
    pub fn new(config: SlungConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            state: vec![0.0; 8],
            prev_velocity: None,
            elapsed: 0.0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn config(&self) -> &SlungConfig {
        &self.config
    }

    pub fn swing(&self) -> [f64; 4] {
        [self.state[0], self.state[1], self.state[2], self.state[3]]
    }

    pub fn set_swing(&mut self, angles: [f64; 2], rates: [f64; 2]) {
        self.state[0] = angles[0];
        self.state[1] = angles[1];
        self.state[2] = rates[0];
        self.state[3] = rates[1];
    }

    /// Pendulum energy per unit mass, decoupled planar form.
    pub fn pendulum_energy(&self) -> f64 {
        let l = self.config.length;
        let g = self.config.gravity;
        let s = &self.state;
        0.5 * l * l * (s[2] * s[2] + s[3] * s[3]) + g * l * ((1.0 - s[0].cos()) + (1.0 - s[1].cos()))
    }

    /// Unit vector from the attachment point toward the bob.
    fn string_direction(&self) -> Vec3<f64> {
        let (sx, cx) = self.state[0].sin_cos();
        let (sy, cy) = self.state[1].sin_cos();
        let v = [sx * cy, sy * cx, -cx * cy];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        v.map(|c| c / n)
    }

    fn derivative(&self, x: &[f64], accel: &Vec3<f64>, forcing: [f64; 2]) -> Vec<f64> {
        let c = &self.config;
        let l = c.length;
        let g_eff = c.gravity + accel[2];
        let wp = (c.gravity / l).sqrt();
        let ws = c.slosh_frequency;
        let mut d = vec![0.0; 8];
        for i in 0..2 {
            let (a, a_dot, s, s_dot) = (x[i], x[2 + i], x[4 + i], x[6 + i]);
            let push = c.slosh_coupling * ws * ws * s;
            let a_ddot = (-g_eff * a.sin() - accel[i] * a.cos() + push * a.cos()) / l
                - 2.0 * c.pendulum_damping * wp * a_dot;
            let bob_accel = accel[i] + l * a_ddot * a.cos();
            let s_ddot = -2.0 * c.slosh_damping * ws * s_dot - ws * ws * s - bob_accel + forcing[i];
            d[i] = a_dot;
            d[2 + i] = a_ddot;
            d[4 + i] = s_dot;
            d[6 + i] = s_ddot;
        }
        d
    }

    /// Advances the internal state by `dt` and returns the string force on
    /// the vehicle (world) and its moment about the centre of mass (body).
    pub fn wrench(&mut self, body: &RigidBodyState<f64>, dt: f64) -> Wrench<f64> {
        let c = self.config.clone();
        if c.mass == 0.0 {
            return Wrench::zero();
        }
        let accel = match self.prev_velocity {
            Some(v0) if dt > 0.0 => [0, 1, 2].map(|i| (body.velocity[i] - v0[i]) / dt),
            _ => [0.0; 3],
        };
        self.prev_velocity = Some(body.velocity);

        let forcing = if c.slosh_noise > 0.0 {
            // Held over the step; scaled so the forcing has a fixed spectral
            // density regardless of dt.
            let scale = c.slosh_noise * (0.001 / dt).sqrt();
            [0, 1].map(|_| {
                let xi: f64 = StandardNormal.sample(&mut self.rng);
                scale * xi
            })
        } else {
            [0.0; 2]
        };
        let x0 = self.state.clone();
        if let Ok(next) = rk4_step(&x0, dt, |x: &Vec<f64>| Ok(self.derivative(x, &accel, forcing))) {
            self.state = next;
        }

        let n = self.string_direction();
        let g_vec = [-accel[0], -accel[1], -(c.gravity + accel[2])];
        let along = g_vec[0] * n[0] + g_vec[1] * n[1] + g_vec[2] * n[2];
        let spin = c.length * (self.state[2] * self.state[2] + self.state[3] * self.state[3]);
        self.elapsed += dt;
        let lifted = if c.pickup_time > 0.0 {
            (self.elapsed / c.pickup_time).min(1.0)
        } else {
            1.0
        };
        let tension = (lifted * c.mass * (along + spin)).clamp(0.0, c.max_tension);
        let force = n.map(|v| tension * v);
        let f_body = world_to_body(&body.attitude, &force);
        Wrench {
            force,
            torque: cross(&c.offset, &f_body),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quiet() -> SlungConfig {
        SlungConfig {
            slosh_noise: 0.0,
            pickup_time: 0.0,
            ..SlungConfig::default()
        }
    }

    #[test]
    fn weight_taken_up_over_pickup() {
        let mut m = SlungMass::new(SlungConfig { pickup_time: 1.0, ..quiet() }, 0).unwrap();
        let s = RigidBodyState::at_rest([0.0, 0.0, 1.0]);
        let weight = 0.165 * 9.81;
        let mut fz = Vec::new();
        for _ in 0..1500 {
            fz.push(-m.wrench(&s, 0.001).force[2]);
        }
        assert!((fz[499] - 0.5 * weight).abs() < 1e-9);
        assert!(fz.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        assert!((fz[1499] - weight).abs() < 1e-12);
    }

    #[test]
    fn tension_is_limited() {
        let mut m = SlungMass::new(quiet(), 0).unwrap();
        let mut s = RigidBodyState::at_rest([0.0, 0.0, 1.0]);
        m.wrench(&s, 0.001);
        s.velocity = [0.0, 0.0, 0.02];
        let w = m.wrench(&s, 0.001);
        let f = (w.force[0].powi(2) + w.force[1].powi(2) + w.force[2].powi(2)).sqrt();
        assert!((f - 1.95).abs() < 1e-12);
        let t = (w.torque[0].powi(2) + w.torque[1].powi(2) + w.torque[2].powi(2)).sqrt();
        assert!(t < 0.5);
    }

    #[test]
    fn zero_mass_no_wrench() {
        let mut m = SlungMass::new(SlungConfig { mass: 0.0, ..SlungConfig::default() }, 0).unwrap();
        let mut s = RigidBodyState::at_rest([0.0, 0.0, 1.0]);
        for k in 0..100 {
            s.velocity = [0.01 * k as f64, -0.5, 0.2];
            s.attitude = [0.1, -0.2, 0.3];
            assert_eq!(m.wrench(&s, 0.001), Wrench::zero());
        }
    }

    #[test]
    fn static_hover_wrench() {
        let mut m = SlungMass::new(quiet(), 0).unwrap();
        let s = RigidBodyState::at_rest([0.0, 0.0, 1.0]);
        let w = m.wrench(&s, 0.001);
        let weight = 0.165 * 9.81;
        assert_eq!(w.force[0], 0.0);
        assert_eq!(w.force[1], 0.0);
        assert!((w.force[2] + weight).abs() < 1e-12);
        assert!((w.force[2] + 1.62).abs() < 0.01);
        // (0.177, 0.177, −0.02) × (0, 0, −W) = (−0.177 W, 0.177 W, 0)
        assert!((w.torque[0] + 0.177 * weight).abs() < 1e-12);
        assert!((w.torque[1] - 0.177 * weight).abs() < 1e-12);
        assert_eq!(w.torque[2], 0.0);
    }

    #[test]
    fn damped_swing_loses_energy() {
        let mut cfg = quiet();
        cfg.pendulum_damping = 0.3;
        cfg.slosh_coupling = 0.0;
        let mut m = SlungMass::new(cfg, 0).unwrap();
        m.set_swing([0.4, -0.2], [0.0, 1.0]);
        let s = RigidBodyState::at_rest([0.0, 0.0, 1.0]);
        let mut e = m.pendulum_energy();
        for _ in 0..5000 {
            m.wrench(&s, 0.001);
            let next = m.pendulum_energy();
            assert!(next <= e * (1.0 + 1e-12));
            e = next;
        }
        assert!(e < 1e-3 * 0.5);
    }

    #[test]
    fn forward_acceleration_swings_bob_back() {
        let mut m = SlungMass::new(quiet(), 0).unwrap();
        let mut s = RigidBodyState::at_rest([0.0, 0.0, 1.0]);
        for k in 0..200 {
            s.velocity = [0.002 * k as f64, 0.0, 0.0];
            m.wrench(&s, 0.001);
        }
        assert!(m.swing()[0] < 0.0);
        let w = m.wrench(&s, 0.001);
        assert!(w.force[0] < 0.0);
    }

    #[test]
    fn seeded_noise_is_deterministic() {
        let mut a = SlungMass::new(SlungConfig::default(), 5).unwrap();
        let mut b = SlungMass::new(SlungConfig::default(), 5).unwrap();
        let s = RigidBodyState::at_rest([0.0, 0.0, 1.0]);
        for _ in 0..1000 {
            assert_eq!(a.wrench(&s, 0.001), b.wrench(&s, 0.001));
        }
        assert!(a.swing()[0] != 0.0);
    }
}
