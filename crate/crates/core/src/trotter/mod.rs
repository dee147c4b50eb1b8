//! Digitized protocols: Trotter circuits, sampling, energy estimation and tomography.

pub mod circuit;
pub mod export;
pub mod sampling;
pub mod tomography;

pub use circuit::{simulate_circuit, spec_hash, synthesize, Circuit, Gate, InitState};
pub use export::{export_circuit, parse_circuit_json, parse_qasm, to_qasm, CircuitFormat};
pub use sampling::{estimate_energy, exact_energy, sample, Basis, EnergyEstimate, ShotRecord};
pub use tomography::{
    project_to_simplex, tomography, tomography_exact, tomography_of_state, TomographyResult,
    MAX_TOMOGRAPHY_SITES,
};
