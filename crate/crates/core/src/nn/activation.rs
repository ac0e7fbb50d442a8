use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// Element-wise nonlinearity applied after a dense layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ActivationKind {
    #[serde(rename = "tanh")]
    HyperbolicTangent,
    /// `ln(1 / (1 + e^{-z}))`, always negative.
    #[serde(rename = "log_sigmoid")]
    LogSigmoid,
    #[serde(rename = "identity")]
    Identity,
}

impl ActivationKind {
    pub fn name(self) -> &'static str {
        match self {
            ActivationKind::HyperbolicTangent => "tanh",
            ActivationKind::LogSigmoid => "log_sigmoid",
            ActivationKind::Identity => "identity",
        }
    }

    #[inline]
    pub fn eval<T: Real>(self, z: T) -> T {
        match self {
            ActivationKind::HyperbolicTangent => z.tanh(),
            ActivationKind::LogSigmoid => log_sigmoid(z),
            ActivationKind::Identity => z,
        }
    }

    /// Derivative with respect to the pre-activation `z`.
    #[inline]
    pub fn derivative<T: Real>(self, z: T) -> T {
        match self {
            ActivationKind::HyperbolicTangent => {
                let t = z.tanh();
                T::one() - t * t
            }
            // d/dz ln σ(z) = σ(-z)
            ActivationKind::LogSigmoid => sigmoid(-z),
            ActivationKind::Identity => T::one(),
        }
    }
}

#[inline]
fn sigmoid<T: Real>(z: T) -> T {
    if z >= T::zero() {
        T::one() / (T::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (T::one() + e)
    }
}

#[inline]
fn log_sigmoid<T: Real>(z: T) -> T {
    // Split on sign so the exponential never overflows.
    if z >= T::zero() {
        -(-z).exp().ln_1p()
    } else {
        z - z.exp().ln_1p()
    }
}
