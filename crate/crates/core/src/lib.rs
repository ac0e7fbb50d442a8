//! Quadrotor attitude-control lab: a deep nonlinear adaptive controller,
//! PID/MRAC/DMRAC baselines, a rigid-body plant with disturbances, and the
//! experiment runner.
//!
//! The numerical core is generic over [`Real`]; the aliases below fix it to
//! `f64`, which is what the experiments use.

pub mod baselines;
pub mod disturbances;
pub mod dnac;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod nn;
pub mod ode;
pub mod plant;
pub mod scalar;
pub mod trajectories;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Net = nn::FeedforwardNet<f64>;
pub type Matrix = linalg::Matrix<f64>;
pub type Dnac = dnac::DnacState<f64>;
pub type Estimator = dnac::DeepEstimator<f64>;
pub type Pid = baselines::PidState<f64>;
pub type Mrac = baselines::MracState<f64>;
pub type Dmrac = baselines::DmracState<f64>;
pub type State = plant::RigidBodyState<f64>;
pub type Cascade = plant::CascadeState<f64>;
