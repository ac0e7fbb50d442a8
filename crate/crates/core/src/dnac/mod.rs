//! Deep nonlinear adaptive controller.
//!
//! The uncertainty estimate `f̂(x) = Ŵᵀ s(x)` is learned on two timescales:
//! `Ŵ` adapts every control step from the tracking error, while the inner
//! feature layers are batch-trained with Adam whenever the replay buffer
//! fills.

mod buffer;
mod config;
mod controller;
mod estimator;

pub use buffer::{ReplayBuffer, ReplaySample};
pub use config::{default_layers, DnacConfig, LayerSpec, TrainingConfig};
pub use controller::{smoothed_sign, DnacCheckpoint, DnacState};
pub use estimator::{DeepEstimator, TrainingStats};
