use super::dynamics::ActuatorCommand;
use super::params::QuadParams;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Sums baseline and added roll/pitch torque, saturates, and returns the
/// command together with the saturated total, which is what an adaptive
/// controller must learn from.
pub fn augment_and_apply<T: Real>(
    base: [T; 2],
    added: [T; 2],
    yaw_torque: T,
    thrust: T,
    params: &QuadParams,
) -> Result<(ActuatorCommand<T>, [T; 2])> {
    let inputs = [base[0], base[1], added[0], added[1], yaw_torque, thrust];
    if inputs.iter().any(|v| !v.is_finite()) {
        return Err(Error::input("non-finite torque or thrust command"));
    }
    let lim = T::lit(params.max_torque);
    let total = [
        (base[0] + added[0]).clamp_to(-lim, lim),
        (base[1] + added[1]).clamp_to(-lim, lim),
    ];
    let cmd = ActuatorCommand {
        thrust: thrust.clamp_to(T::zero(), T::lit(params.max_thrust)),
        torque: [total[0], total[1], yaw_torque.clamp_to(-lim, lim)],
    };
    Ok((cmd, total))
}
