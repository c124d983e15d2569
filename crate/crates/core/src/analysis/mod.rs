//! Manufactured solutions, error norms and convergence tables.

mod errors;
mod exact;
mod study;

pub use errors::{compute_errors, ErrorReport};
pub use exact::{ExactFields, ExactSolution, ExpSineSolution, PolynomialSolution};
pub use study::{
    reference_load_model, run_study, run_study_with, solve_level, ConvergenceTable, LevelRun, Orders, StudyConfig, TableRow, MAX_LEVEL,
};
