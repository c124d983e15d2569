use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use mixel_core::analysis::{reference_load_model, run_study_with, ExpSineSolution, PolynomialSolution};
use mixel_core::{
    run_verification, ComplianceTensor, Diagonal, ExactSolution, LoadModel, NegativeControl, StudyConfig,
    VerifyOptions,
};

#[derive(Parser)]
#[command(name = "mixel", version, about = "Mixed finite elements for planar elasticity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve on uniformly refined unit-square meshes and tabulate errors.
    Study(StudyArgs),
    /// Run the stability checks and print a JSON report.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Cut {
    /// From (1,0) to (0,1).
    NorthWest,
    /// From (0,0) to (1,1).
    NorthEast,
}

impl From<Cut> for Diagonal {
    fn from(c: Cut) -> Self {
        match c {
            Cut::NorthWest => Diagonal::NorthWest,
            Cut::NorthEast => Diagonal::NorthEast,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Load {
    /// Interpolated for k = 3, 5 and projected for k = 4.
    Reference,
    Projected,
    Interpolated,
}

#[derive(Clone, Copy, ValueEnum)]
enum Solution {
    ExpSine,
    Polynomial,
}

#[derive(clap::Args)]
struct StudyArgs {
    /// Polynomial degree of the stress space.
    #[arg(long, value_parser = clap::value_parser!(u8).range(3..=5))]
    k: u8,
    /// Number of refinement levels, starting from two triangles.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=6))]
    levels: u8,
    #[arg(long, default_value_t = 0.5)]
    mu: f64,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the table here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the finest system matrix in Matrix Market format; the load
    /// vector goes next to it with an `_rhs` suffix.
    #[arg(long)]
    dump_system: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Cut::NorthWest)]
    diagonal: Cut,
    #[arg(long, value_enum, default_value_t = Load::Reference)]
    load: Load,
    #[arg(long, value_enum, default_value_t = Solution::ExpSine)]
    solution: Solution,
    /// Suppress per-level progress on standard error.
    #[arg(long, short)]
    quiet: bool,
}

#[derive(clap::Args)]
struct VerifyArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(3..=5))]
    k: u8,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=6))]
    level: u8,
    /// Corrupt the construction on purpose; the run must then fail.
    /// One of flip-sign, bubble-normal, projection-degree, non-bubble.
    #[arg(long)]
    negative_control: Option<NegativeControl>,
    #[arg(long, default_value_t = 100)]
    random_triangles: usize,
    #[arg(long, default_value_t = 1000)]
    random_pairs: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(out: Option<&PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, content).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().write_all(content.as_bytes())?;
            Ok(())
        }
    }
}

fn study(args: StudyArgs) -> Result<()> {
    let k = args.k as usize;
    let mut config = StudyConfig::new(k, args.levels as usize);
    config.material = ComplianceTensor::new(args.mu, args.lambda)?;
    config.diagonal = args.diagonal.into();
    config.load_model = match args.load {
        Load::Reference => reference_load_model(k),
        Load::Projected => LoadModel::Projected,
        Load::Interpolated => LoadModel::Interpolated,
    };
    config.dump_system = args.dump_system;
    let exact: &dyn ExactSolution = match args.solution {
        Solution::ExpSine => &ExpSineSolution,
        Solution::Polynomial => &PolynomialSolution::default(),
    };
    let quiet = args.quiet;
    let table = run_study_with(&config, exact, |r| {
        if !quiet {
            eprintln!(
                "level {}: dim V = {}, dim S = {}, residual {:.1e}",
                r.level, r.dim_displacement, r.dim_stress, r.relative_residual
            );
        }
    })?;
    let content = match args.format {
        Format::Text => table.to_text(),
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json()? + "\n",
    };
    emit(args.out.as_ref(), &content)
}

fn verify(args: VerifyArgs) -> Result<bool> {
    let mut opts = VerifyOptions::new(args.k as usize, args.level as usize);
    opts.negative_control = args.negative_control;
    opts.random_triangles = args.random_triangles;
    opts.random_pairs = args.random_pairs;
    if let Some(seed) = args.seed {
        opts.seed = seed;
    }
    let report = run_verification(&opts)?;
    emit(args.out.as_ref(), &(report.to_json()? + "\n"))?;
    if !report.passed {
        eprintln!("verification failed: {}", report.failed_checks.join(", "));
    }
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Study(args) => study(args).map(|_| true),
        Command::Verify(args) => verify(args),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
