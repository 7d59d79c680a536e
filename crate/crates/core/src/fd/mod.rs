//! Finite-difference Newton solver for the nonlinear two-layer problem.

pub mod continuation;
pub mod grid;
pub mod linalg;
pub mod newton;
pub mod system;

pub use continuation::{continuation, geometric_schedule, BifurcationBranch, BranchPoint, ContinuationOptions};
pub use grid::{Grid1D, GridField};
pub use newton::{discrete_expansion_reference, discrete_linear_eigenpair, newton_solve, verify_solution, Diagnostics, NewtonOutcome};
pub use system::{jacobian, reconstruct_u3, residual, BranchState, FdContext};
