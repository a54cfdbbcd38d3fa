//! Unified transform solvers for the forced heat equation on the half-line
//! and the interval, with Picard iteration for power-law reaction-diffusion.

pub mod acceptance;
pub mod contours;
pub mod linear;
pub mod nonlinear;
pub mod norms;
pub mod oracle;
pub mod problem;
pub mod quadrature;
pub mod sampled;
pub mod transforms;

pub use linear::{solve_linear, LinearError, LinearSolveReport};
pub use nonlinear::{lifespan, picard_solve, Lifespan, NonlinearError, PicardTrace};
pub use norms::{NormError, NormReport};
pub use problem::{
    Domain, ForcingField, GridSpec, NonlinearityForm, ProblemError, ProblemSpec, Regime, SobolevIndex,
    SolutionField, Tolerances,
};
pub use sampled::{Piecewise, SampleError, Sampled};
