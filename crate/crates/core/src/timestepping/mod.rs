//! Time discretisation: BDF coefficients, state history, startup and the
//! linearly implicit step.

mod bdf;
mod history;
mod stepper;

pub use bdf::{bdf_coefficients, BdfScheme};
pub use history::{FieldState, History};
pub use stepper::{
    bootstrap, bootstrap_substeps, compute_initial_w, compute_theta, integrate, step_matrix, BdfStepper, FieldForcing,
    ForcingProvider, NoForcing, Problem, StepObserver, Trajectory,
};
