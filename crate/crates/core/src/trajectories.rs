//! Position references: circle, four-petal rose, hover and step.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plant::Vec3;
use crate::scalar::Real;

/// Default flight altitude, m.
pub const DEFAULT_ALTITUDE: f64 = 1.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrajectorySpec {
    /// `center + r (cos ωt, sin ωt, 0)`
    Circle {
        radius: f64,
        period: f64,
        #[serde(default = "default_center")]
        center: Vec3<f64>,
    },
    /// Polar rose `r = a sin 2θ`, `θ = ωt`; one period traces all four petals.
    Rose {
        amplitude: f64,
        period: f64,
        #[serde(default = "default_center")]
        center: Vec3<f64>,
    },
    Hover {
        #[serde(default = "default_center")]
        point: Vec3<f64>,
    },
    /// Holds `from` until `at` seconds, then `to`.
    Step { from: Vec3<f64>, to: Vec3<f64>, at: f64 },
}

fn default_center() -> Vec3<f64> {
    [0.0, 0.0, DEFAULT_ALTITUDE]
}

impl TrajectorySpec {
    pub fn circle() -> Self {
        TrajectorySpec::Circle {
            radius: 1.0,
            period: 12.0,
            center: default_center(),
        }
    }

    pub fn rose() -> Self {
        TrajectorySpec::Rose {
            amplitude: 2.8,
            period: 40.0,
            center: default_center(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            TrajectorySpec::Circle { radius, period, center } => *radius > 0.0 && *period > 0.0 && finite(center),
            TrajectorySpec::Rose { amplitude, period, center } => {
                *amplitude > 0.0 && *period > 0.0 && finite(center)
            }
            TrajectorySpec::Hover { point } => finite(point),
            TrajectorySpec::Step { from, to, at } => finite(from) && finite(to) && *at >= 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::config("trajectory: sizes and periods must be positive and points finite"))
        }
    }

    /// Lap length for periodic references.
    pub fn period(&self) -> Option<f64> {
        match self {
            TrajectorySpec::Circle { period, .. } | TrajectorySpec::Rose { period, .. } => Some(*period),
            _ => None,
        }
    }

    /// Reference position and its exact time derivative.
    pub fn position_ref<T: Real>(&self, t: T) -> (Vec3<T>, Vec3<T>) {
        let lift = |v: &Vec3<f64>| v.map(T::lit);
        let zero = T::zero();
        match self {
            TrajectorySpec::Circle { radius, period, center } => {
                let r = T::lit(*radius);
                let w = T::TAU() / T::lit(*period);
                let c = lift(center);
                let (s, co) = (w * t).sin_cos();
                ([c[0] + r * co, c[1] + r * s, c[2]], [-r * w * s, r * w * co, zero])
            }
            TrajectorySpec::Rose { amplitude, period, center } => {
                let a = T::lit(*amplitude);
                let w = T::TAU() / T::lit(*period);
                let c = lift(center);
                let th = w * t;
                let two = T::lit(2.0);
                let r = a * (two * th).sin();
                let r_dot = two * a * w * (two * th).cos();
                let (s, co) = th.sin_cos();
                (
                    [c[0] + r * co, c[1] + r * s, c[2]],
                    [r_dot * co - r * w * s, r_dot * s + r * w * co, zero],
                )
            }
            TrajectorySpec::Hover { point } => (lift(point), [zero; 3]),
            TrajectorySpec::Step { from, to, at } => {
                let p = if t < T::lit(*at) { lift(from) } else { lift(to) };
                (p, [zero; 3])
            }
        }
    }

    /// Length of one lap, m.
    pub fn lap_length(&self) -> Result<f64> {
        match self {
            TrajectorySpec::Circle { radius, .. } => Ok(std::f64::consts::TAU * radius),
            TrajectorySpec::Rose { amplitude, .. } => Ok(rose_arc_length(*amplitude, 10_000)),
            _ => Err(Error::config("lap length is only defined for circle and rose")),
        }
    }

    /// Period giving a mean path speed of `target_speed`.
    pub fn arc_speed_normalize(&self, target_speed: f64) -> Result<f64> {
        if !(target_speed > 0.0) {
            return Err(Error::config("target speed must be positive"));
        }
        Ok(self.lap_length()? / target_speed)
    }

    /// Same trajectory with the period replaced.
    pub fn with_period(&self, new_period: f64) -> Self {
        let mut out = self.clone();
        match &mut out {
            TrajectorySpec::Circle { period, .. } | TrajectorySpec::Rose { period, .. } => *period = new_period,
            _ => {}
        }
        out
    }
}

fn finite(v: &Vec3<f64>) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Arc length of `r = a sin 2θ` over `θ ∈ [0, 2π]` by composite Simpson.
pub fn rose_arc_length(a: f64, panels: usize) -> f64 {
    let n = panels + panels % 2;
    let speed = |th: f64| {
        let r = a * (2.0 * th).sin();
        let dr = 2.0 * a * (2.0 * th).cos();
        (r * r + dr * dr).sqrt()
    };
    let h = std::f64::consts::TAU / n as f64;
    let mut acc = speed(0.0) + speed(std::f64::consts::TAU);
    for k in 1..n {
        acc += if k % 2 == 1 { 4.0 } else { 2.0 } * speed(k as f64 * h);
    }
    acc * h / 3.0
}
