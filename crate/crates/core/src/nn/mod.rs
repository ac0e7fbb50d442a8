//! Minimal dense network with exact backpropagation, Adam and Smooth L1.

mod activation;
mod adam;
mod loss;
mod net;

pub use activation::ActivationKind;
pub use adam::{AdamConfig, AdamState};
pub use loss::{smooth_l1, smooth_l1_element};
pub use net::{
    DenseLayer, FeedforwardNet, ForwardCache, ForwardPass, GradientSet, LayerGradient,
};
