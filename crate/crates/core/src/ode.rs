//! Fixed-step classical Runge–Kutta integration.

use crate::error::Result;
use crate::scalar::Real;

/// A state that can be advanced along a derivative of the same shape.
pub trait OdeState<T: Real>: Clone {
    /// `self + h·d`
    fn add_scaled(&self, d: &Self, h: T) -> Self;
}

impl<T: Real> OdeState<T> for Vec<T> {
    fn add_scaled(&self, d: &Self, h: T) -> Self {
        self.iter().zip(d).map(|(&x, &dx)| x + h * dx).collect()
    }
}

impl<T: Real> OdeState<T> for T {
    fn add_scaled(&self, d: &Self, h: T) -> Self {
        *self + h * *d
    }
}

/// One RK4 step of `ẋ = f(x)`. Inputs to `f` other than the state are held
/// constant over the step.
pub fn rk4_step<T, S, F>(x: &S, dt: T, mut f: F) -> Result<S>
where
    T: Real,
    S: OdeState<T>,
    F: FnMut(&S) -> Result<S>,
{
    let half = dt * T::lit(0.5);
    let k1 = f(x)?;
    let k2 = f(&x.add_scaled(&k1, half))?;
    let k3 = f(&x.add_scaled(&k2, half))?;
    let k4 = f(&x.add_scaled(&k3, dt))?;
    let sixth = dt / T::lit(6.0);
    Ok(x
        .add_scaled(&k1, sixth)
        .add_scaled(&k2, sixth + sixth)
        .add_scaled(&k3, sixth + sixth)
        .add_scaled(&k4, sixth))
}
