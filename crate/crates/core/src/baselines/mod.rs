//! Comparison attitude controllers: PID (the un-augmented baseline), MRAC
//! and DMRAC. MRAC and DMRAC produce added torque in the same slot as DNAC.

mod dmrac;
mod mrac;
mod pid;

pub use dmrac::{DmracConfig, DmracState};
pub use mrac::{
    quadratic_basis, quadratic_basis_len, AdaptiveOutput, MracConfig, MracState, ModelReferenceLaw,
    ReferenceModel,
};
pub use pid::{PidConfig, PidState};
