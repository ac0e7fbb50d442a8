//! Crosswind, wall turbulence and hanging sloshing mass, composed into one
//! external wrench per physics step.

mod slung;
mod wall;
mod wind;

use serde::{Deserialize, Serialize};

pub use slung::{SlungConfig, SlungMass};
pub use wall::{point_segment_distance, WallConfig, WallEffect};
pub use wind::{WindField, FAN_WIND_SPEED};

use crate::error::Result;
use crate::plant::{RigidBodyState, Wrench};

/// Norm bounds every individual disturbance stays within under default
/// configurations.
pub const FORCE_BOUND: f64 = 10.0;
pub const TORQUE_BOUND: f64 = 0.5;

/// Componentwise sum.
pub fn compose(wrenches: &[Wrench<f64>]) -> Wrench<f64> {
    let mut total = Wrench::zero();
    for w in wrenches {
        for i in 0..3 {
            total.force[i] += w.force[i];
            total.torque[i] += w.torque[i];
        }
    }
    total
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DisturbanceKind {
    Wind(WindField),
    Wall(WallConfig),
    SlungMass(SlungConfig),
}

/// One scenario entry; disabled entries are parsed but not simulated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisturbanceConfig {
    #[serde(default = "enabled_default")]
    pub enabled: bool,
    #[serde(flatten)]
    pub kind: DisturbanceKind,
}

fn enabled_default() -> bool {
    true
}

impl DisturbanceConfig {
    pub fn new(kind: DisturbanceKind) -> Self {
        Self { enabled: true, kind }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            DisturbanceKind::Wind(w) => w.validate(),
            DisturbanceKind::Wall(w) => w.validate(),
            DisturbanceKind::SlungMass(s) => s.validate(),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Disturbance {
    Wind(WindField),
    Wall(WallEffect),
    SlungMass(SlungMass),
}

impl Disturbance {
    pub fn wrench(&mut self, state: &RigidBodyState<f64>, t: f64, dt: f64) -> Wrench<f64> {
        match self {
            Disturbance::Wind(w) => w.wrench(state, t),
            Disturbance::Wall(w) => w.wrench(state, dt),
            Disturbance::SlungMass(s) => s.wrench(state, dt),
        }
    }
}

/// The enabled disturbances of a scenario, each with its own seeded stream.
#[derive(Clone, Debug, Default)]
pub struct DisturbanceSet {
    items: Vec<Disturbance>,
}

impl DisturbanceSet {
    pub fn new(configs: &[DisturbanceConfig], seed: u64) -> Result<Self> {
        let mut items = Vec::new();
        for (i, c) in configs.iter().enumerate() {
            c.validate()?;
            if !c.enabled {
                continue;
            }
            let stream = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64 + 1);
            items.push(match &c.kind {
                DisturbanceKind::Wind(w) => Disturbance::Wind(w.clone()),
                DisturbanceKind::Wall(w) => Disturbance::Wall(WallEffect::new(w.clone(), stream)?),
                DisturbanceKind::SlungMass(s) => Disturbance::SlungMass(SlungMass::new(s.clone(), stream)?),
            });
        }
        Ok(Self { items })
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Advances every stateful disturbance by `dt` and returns the individual
    /// wrenches in configuration order.
    pub fn wrenches(&mut self, state: &RigidBodyState<f64>, t: f64, dt: f64) -> Vec<Wrench<f64>> {
        self.items.iter_mut().map(|d| d.wrench(state, t, dt)).collect()
    }
}
