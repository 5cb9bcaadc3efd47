//! Variational imaginary-time evolution on a layered circuit.
//!
//! Qubit `j` is site `j` of the chain with `|1⟩` = occupied, so dense states
//! from [`crate::ed`] are used directly as circuit inputs.

mod ansatz;
mod dynamics;

pub use ansatz::{ansatz_state, tangent_vectors, AnsatzSpec, Gate, Pauli, MAX_QUBITS, SEED_ANGLE};
pub use dynamics::{
    mclachlan_step, mclachlan_system, run_vqa, Integrator, McLachlanSystem, StepDiagnostics, TrajectoryRow, VqaRun,
    VqaRunConfig, SINGULAR_TOL,
};
