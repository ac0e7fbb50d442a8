//! Quadrotor rigid-body plant, the outer-loop cascade and the torque
//! augmentation wiring.

mod augment;
mod cascade;
mod dynamics;
mod params;

pub use augment::augment_and_apply;
pub use cascade::{CascadeConfig, CascadeOutput, CascadeState};
pub use dynamics::{
    body_to_world, cross, dynamics_derivative, euler_rates, norm3, rk4_step, rotation, world_to_body,
    ActuatorCommand, RigidBodyState, Vec3, Wrench, CRASH_ANGLE,
};
pub use params::{QuadParams, GRAVITY};
