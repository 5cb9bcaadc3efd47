//! Fermionic Gaussian-state engine for the free chain.
//!
//! Ground states are Slater determinants of the hopping matrix. A measurement
//! `M = exp(h)` with quadratic `h` maps a Gaussian state to a Gaussian state: the
//! orbital (or Nambu) matrix is multiplied by `exp(h)` and re-orthonormalized.
//! Entropies follow from the spectrum of the correlation matrix restricted to
//! the region.

mod entropy;
mod ground;
mod measure;
mod state;

pub use crate::region::Region;
pub use entropy::{entanglement_entropy, mutual_information};
pub use ground::{ground_state_quadratic, hopping_matrix, FERMI_GAP_TOL};
pub use measure::{apply_measurement, QuadraticGenerator, QR_TOL};
pub use state::{BogoliubovState, GaussianState, SlaterState};
