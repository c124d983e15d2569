//! Convergence studies on uniformly refined unit-square meshes.

use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Serialize;

use super::errors::{compute_errors, ErrorReport};
use super::exact::{ExactSolution, ExpSineSolution};
use crate::assembly::{assemble_with_load, ComplianceTensor, LoadModel, SaddleSystem};
use crate::error::{Error, Result};
use crate::mesh::{Diagonal, Mesh};
use crate::solver::{solve, Solution};
use crate::spaces::{check_degree, DisplacementSpace, StressSpace};

pub const MAX_LEVEL: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub k: usize,
    /// Levels `1..=levels` are solved.
    pub levels: usize,
    pub material: ComplianceTensor,
    pub diagonal: Diagonal,
    pub load_model: LoadModel,
    /// Write the finest system in Matrix Market format here.
    pub dump_system: Option<PathBuf>,
}

/// Load treatment under which the study reproduces the published reference
/// tables: interpolated for `k = 3, 5`, projected for `k = 4`.
pub fn reference_load_model(k: usize) -> LoadModel {
    if k == 4 {
        LoadModel::Projected
    } else {
        LoadModel::Interpolated
    }
}

impl StudyConfig {
    /// `μ = 1/2`, `λ = 1` on the square cut from (1,0) to (0,1) with
    /// [`reference_load_model`].
    pub fn new(k: usize, levels: usize) -> Self {
        Self {
            k,
            levels,
            material: ComplianceTensor { mu: 0.5, lambda: 1.0 },
            diagonal: Diagonal::NorthWest,
            load_model: reference_load_model(k),
            dump_system: None,
        }
    }
}

/// Everything produced by one solve.
#[derive(Debug, Clone)]
pub struct LevelRun {
    pub mesh: Mesh,
    pub stress: StressSpace,
    pub displacement: DisplacementSpace,
    pub system: SaddleSystem,
    pub solution: Solution,
    pub report: ErrorReport,
}

pub fn solve_level(
    k: usize,
    level: usize,
    material: &ComplianceTensor,
    diagonal: Diagonal,
    load_model: LoadModel,
    exact: &dyn ExactSolution,
) -> Result<LevelRun> {
    let mesh = Mesh::unit_square_with(level, diagonal)?;
    let stress = StressSpace::build(&mesh, k)?;
    let displacement = DisplacementSpace::build(&mesh, k)?;
    let system = assemble_with_load(&mesh, &stress, &displacement, material, |p| exact.load(material, p), load_model)?;
    let solution = solve(&system)?;
    let report = compute_errors(&mesh, &stress, &displacement, &solution, exact, material, load_model)?;
    Ok(LevelRun { mesh, stress, displacement, system, solution, report })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Orders {
    pub displacement: f64,
    pub stress: f64,
    pub divergence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    #[serde(flatten)]
    pub errors: ErrorReport,
    /// `log₂` of the error ratio to the previous level; absent on the first.
    pub orders: Option<Orders>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub k: usize,
    pub mu: f64,
    pub lambda: f64,
    pub diagonal: Diagonal,
    pub load_model: LoadModel,
    pub solution: &'static str,
    pub rows: Vec<TableRow>,
}

fn order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

impl ConvergenceTable {
    pub fn from_reports(config: &StudyConfig, solution: &'static str, reports: Vec<ErrorReport>) -> Self {
        let mut rows: Vec<TableRow> = Vec::with_capacity(reports.len());
        for r in reports {
            let orders = rows.last().map(|prev| Orders {
                displacement: order(prev.errors.displacement, r.displacement),
                stress: order(prev.errors.stress, r.stress),
                divergence: order(prev.errors.divergence, r.divergence),
            });
            rows.push(TableRow { errors: r, orders });
        }
        Self {
            k: config.k,
            mu: config.material.mu,
            lambda: config.material.lambda,
            diagonal: config.diagonal,
            load_model: config.load_model,
            solution,
            rows,
        }
    }

    /// Aligned columns: level, `‖u-u_h‖`, order, `‖σ-σ_h‖`, order,
    /// `‖div(σ-σ_h)‖`, order, `dim V_h`, `dim Σ_h`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "k = {}, mu = {}, lambda = {}, diagonal = {:?}, load = {:?}",
            self.k, self.mu, self.lambda, self.diagonal, self.load_model
        );
        let _ = writeln!(
            s,
            "{:>5}  {:>12} {:>5}  {:>12} {:>5}  {:>12} {:>5}  {:>8} {:>8}",
            "level", "|u-u_h|", "order", "|eps_h|", "order", "|div eps_h|", "order", "dim V", "dim S"
        );
        for row in &self.rows {
            let e = &row.errors;
            let o = |f: fn(&Orders) -> f64| row.orders.as_ref().map_or(String::new(), |o| format!("{:.2}", f(o)));
            let _ = writeln!(
                s,
                "{:>5}  {:>12.6e} {:>5}  {:>12.6e} {:>5}  {:>12.6e} {:>5}  {:>8} {:>8}",
                e.level,
                e.displacement,
                o(|o| o.displacement),
                e.stress,
                o(|o| o.stress),
                e.divergence,
                o(|o| o.divergence),
                e.dim_displacement,
                e.dim_stress
            );
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(
            "level,u_error,u_order,stress_error,stress_order,div_error,div_order,dim_v,dim_sigma,divergence_identity,exact_load_identity,relative_residual\n",
        );
        for row in &self.rows {
            let e = &row.errors;
            let o = |f: fn(&Orders) -> f64| row.orders.as_ref().map_or(String::new(), |o| format!("{:.4}", f(o)));
            let _ = writeln!(
                s,
                "{},{:.10e},{},{:.10e},{},{:.10e},{},{},{},{:.3e},{:.3e},{:.3e}",
                e.level,
                e.displacement,
                o(|o| o.displacement),
                e.stress,
                o(|o| o.stress),
                e.divergence,
                o(|o| o.divergence),
                e.dim_displacement,
                e.dim_stress,
                e.divergence_identity,
                e.exact_load_identity,
                e.relative_residual
            );
        }
        s
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Solves levels `1..=config.levels` for the exponential-sine solution.
pub fn run_study(config: &StudyConfig) -> Result<ConvergenceTable> {
    run_study_with(config, &ExpSineSolution, |_| {})
}

/// As [`run_study`] for any exact solution; `progress` sees each report as
/// soon as its level is done.
pub fn run_study_with(
    config: &StudyConfig,
    exact: &dyn ExactSolution,
    mut progress: impl FnMut(&ErrorReport),
) -> Result<ConvergenceTable> {
    check_degree(config.k)?;
    if config.levels == 0 || config.levels > MAX_LEVEL {
        return Err(Error::InvalidLevel(config.levels));
    }
    let material = ComplianceTensor::new(config.material.mu, config.material.lambda)?;
    let mut reports = Vec::with_capacity(config.levels);
    for level in 1..=config.levels {
        let run = solve_level(config.k, level, &material, config.diagonal, config.load_model, exact)?;
        if level == config.levels {
            if let Some(path) = &config.dump_system {
                run.system.write_matrix_market(path)?;
            }
        }
        progress(&run.report);
        reports.push(run.report);
    }
    Ok(ConvergenceTable::from_reports(config, exact.name(), reports))
}
