//! Sweep function, interpolated Ising schedules and variational gauge potentials.

pub mod model;
pub mod quadrature;
pub mod sweep;
pub mod variational;

pub use model::{
    alpha_first_order, alpha_from_couplings, alpha_integral, bonds, field_sum, lambda_f_opt,
    nu_lambda_f, nu_lambda_f_time, schedule_table, Boundary, Couplings, IsingOperators,
    ModelSchedules, ScheduleRow,
};
pub use sweep::{lambda_of_t, Sweep, SweepPoint};
pub use variational::{gauge_residual, solve_variational, AgpAnsatz, VariationalSolution};
