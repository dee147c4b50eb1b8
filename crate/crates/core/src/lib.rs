//! Local counterdiabatic driving of the transverse-field Ising chain.

pub mod cli;
pub mod engine;
pub mod error;
pub mod optimize;
pub mod pauli;
pub mod protocols;
pub mod schedules;
pub mod trotter;

pub use error::{Error, Result};
pub use num_complex::Complex64;
