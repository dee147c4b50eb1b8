//! Scalar and simplex optimizers plus the finite-size decay fit.

pub mod brent;
pub mod fit;
pub mod nelder_mead;

pub use brent::{minimize_bounded, scan_then_refine, BrentOptions, Minimum};
pub use fit::{fit_decay, DecayFit};
pub use nelder_mead::{nelder_mead, NelderMeadOptions, SimplexMinimum};
