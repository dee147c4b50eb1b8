//! State vectors, exact kernels, eigensolvers and time integration.

pub mod evolve;
pub mod gates;
pub mod spectrum;
pub mod state;

pub use evolve::{evolve, uniform_times, EvolveOptions, FnHamiltonian, HamiltonianProvider, Static, Trajectory};
pub use spectrum::{
    ground_state, ground_state_with, low_spectrum, low_spectrum_with, EigenConfig, GroundState,
    SpectrumResult,
};
pub use state::{apply, bitstring, expectation, fidelity, CompiledOperator, StateVector};
