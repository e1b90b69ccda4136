//! Exact `2^N` state-vector simulation of the annealing dynamics.

mod evolve;
mod measure;
mod operator;
mod spectrum;
mod state;

pub use evolve::{evolve, initial_state, propagate, Drive, Hamiltonian, LabHamiltonian, StateTrajectory, NORM_ABORT};
pub use measure::{sample_measurements, success_probability, wilson_interval, MeasurementRecord, Z95};
pub use operator::{
    build_cd_operator, build_hamiltonian, exact_cd_operator, hamiltonian_derivative, spin_z, transverse, DenseOperator,
    IsingTables, LocalOperator, Operator, DEGENERACY_CUTOFF, MAX_EXACT_CD_SITES, MAX_SITES,
};
pub use spectrum::{fidelity_trace, final_fidelity, ground_subspace, FidelityTrace, GroundSubspace, DEFAULT_DEGENERACY_TOL};
pub use state::{bitstring, parse_bitstring, QuantumState};

pub(crate) use evolve::check_trajectory;
