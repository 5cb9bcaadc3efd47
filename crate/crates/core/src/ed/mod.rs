//! Exact diagonalization of the interacting chain.
//!
//! Operators are written in the fermionic occupation basis (bit `j` = site
//! `j`), which coincides with the XXZ spin basis under Jordan-Wigner. Ground
//! states are computed in the particle-number sector and embedded into the
//! full `2^L` space, where measurements that break number conservation act.

mod basis;
mod hamiltonian;
mod lanczos;
mod state;

pub use basis::{annihilate, apply_product, create, Ladder, SectorBasis, MAX_FULL_SITES, MAX_SECTOR_SITES};
pub use hamiltonian::{build_hamiltonian, Hamiltonian, Space};
pub use lanczos::{lowest_eigenpair, LanczosResult};
pub use state::{
    apply_measurement_ed, ee_ed, ee_spin, ground_state_ed, imaginary_time_reference, DenseState, Generator,
    DEGENERACY_TOL, DENSE_LIMIT,
};
