//! Chain models, measurement operators, and closed-form predictions.

mod dilog;
mod model;
mod protocol;
mod theory;

pub use dilog::dilog;
pub use model::{Boundary, Filling, MeasurementKind, MeasurementSpec, ModelSpec};
pub use protocol::{signed_protocol_probability, site_probability, success_probability, ProtocolSpec, SuccessProbability};
pub use theory::{c_eff_theory, f_of_k, luttinger_k, power_law_exponent, ReferenceExponent, F_POLE_TOL, REFERENCE_DECAY_POWER};
