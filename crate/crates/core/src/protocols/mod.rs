//! Adiabatic, linear, LCD and LCD-plus-unitary protocols with their analysis tools.

pub mod frame;
pub mod lu;
pub mod run;
pub mod scaling;
pub mod tuning;

pub use frame::{rotating_frame_h, rotating_frame_theta, RotatingFrame};
pub use lu::{apply_lu, wrap_angle, EulerTriple, LocalUnitary};
pub use run::{
    build_hamiltonian, final_state, run, run_with_target, symmetry_expectation, GroundSpace,
    ProtocolHamiltonian, ProtocolKind, ProtocolSpec, RunRecord, RunResult, Target,
};
pub use scaling::{scaling_experiment, LambdaFPolicy, ScalingFit, ScalingProtocol, ScalingReport, ScalingRow};
pub use tuning::{
    default_bracket, optimize_lambda_f, optimize_lu, optimize_lu_for_state, LambdaFObjective,
    LambdaFOptimum, LuMode, LuOptimum,
};
