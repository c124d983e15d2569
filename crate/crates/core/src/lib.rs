//! Mixed finite elements for planar linear elasticity with symmetric
//! `H(div)` stresses built from continuous Lagrange fields plus edge bubbles
//! and discontinuous displacements.

pub mod analysis;
pub mod assembly;
pub mod elements;
pub mod error;
pub mod mesh;
pub mod quadrature;
pub mod solver;
pub mod spaces;
pub mod sparse;
pub mod verify;

pub use analysis::{run_study, ConvergenceTable, ErrorReport, ExactSolution, StudyConfig};
pub use assembly::{assemble, assemble_with_load, ComplianceTensor, LoadModel, SaddleSystem};
pub use error::{Error, Result};
pub use mesh::{Diagonal, Mesh, Point2};
pub use solver::{solve, Solution, SolverOptions};
pub use spaces::{DisplacementSpace, StressSpace};
pub use verify::{run_verification, NegativeControl, VerificationReport, VerifyOptions};
