//! Independent checks: finite-difference reference solvers, closed-form
//! solutions, and testers for the Laplace-transform bound and the linear
//! estimates.

mod audit;
mod exact;
mod fd;
mod laplace;

pub use audit::{estimate_audit, AuditDatum, AuditReport, AuditScenario};
pub use exact::{exact_forcing, exact_solution, ExactName, ExactParams};
pub use fd::{fd_field, fd_solve, FdMethod, OracleRun};
pub use laplace::{laplace_bound_test, laplace_sweep, random_profile, LaplaceBound, LaplaceSweep};

use crate::linear::LinearError;
use crate::norms::NormError;
use crate::problem::ProblemError;
use crate::sampled::SampleError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("explicit reaction term is stiff: dt·p·max|u|^(p-1) = {0:.3} at t = {1}")]
    StabilityWarning(f64, f64),
    #[error("unknown closed-form solution {0:?}")]
    UnknownName(String),
    #[error("profile is {0:e} at its truncation point")]
    TailTooFat(f64),
    #[error("bad grid: {0}")]
    BadGrid(String),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Linear(#[from] LinearError),
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    Sample(#[from] SampleError),
}
