//! Numerical laboratory for post-selected weak measurements on the critical
//! XXZ chain.
//!
//! * [`lattice`] describes chains and measurement operators and evaluates the
//!   closed-form predictions (Luttinger parameter, effective central charge,
//!   post-selection probabilities).
//! * [`gaussian`] is the free-fermion engine (`delta = 0`, any chain length).
//! * [`ed`] is exact diagonalization for the interacting chain and the
//!   reference oracle for small systems.
//! * [`vqa`] integrates variational imaginary-time evolution on a layered circuit.
//! * [`analysis`] fits entropy series and checks data collapse.

pub mod analysis;
pub mod ed;
pub mod error;
pub mod gaussian;
pub mod lattice;
pub mod linalg;
mod region;
pub mod vqa;

pub use error::{Error, Result};
pub use region::Region;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
