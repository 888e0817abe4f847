//! `dirac-workbench`: constraint analysis, simulation and ring spectra from
//! the command line.
//!
//! Exit codes: 0 success, 1 parse or validation error, 2 unsupported singular
//! structure, 3 inconsistent or non-closing constraint chain, 4 first-class
//! constraints present (bracket table undefined), 5 integrator failure,
//! 6 eigensolver failure.

pub mod model_file;
pub mod report;

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dirac_core::dirac::{consistency_chain, Classification, DiracError, DiracStructure, Model};
use dirac_core::dynamics::{
    exact_circle, generate_eom, integrate_project, integrate_rk4, DynamicsError, Trajectory,
};
use dirac_core::quantum::{
    algebra_residuals, analytic_spectrum_with, fourier_spectrum, grid_spectrum,
    nonhermitian_ordering_demo, QuantumError, RingParams,
};
use num_traits::ToPrimitive;
use thiserror::Error;

pub use model_file::load_model;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{0}")]
    Unsupported(DiracError),
    #[error("{0}")]
    Inconsistent(DiracError),
    #[error("first-class constraints present ({0}); the Dirac bracket table is undefined")]
    FirstClass(String),
    #[error("integrator: {0}")]
    Integrator(DynamicsError),
    #[error("eigensolver: {0}")]
    Eigensolver(QuantumError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Io { .. } => 1,
            CliError::Unsupported(_) => 2,
            CliError::Inconsistent(_) => 3,
            CliError::FirstClass(_) => 4,
            CliError::Integrator(_) => 5,
            CliError::Eigensolver(_) => 6,
        }
    }
}

impl From<DiracError> for CliError {
    fn from(e: DiracError) -> Self {
        match e {
            DiracError::UnsupportedSingular => CliError::Unsupported(e),
            DiracError::Inconsistent { .. }
            | DiracError::GenerationCap { .. }
            | DiracError::Bracket(_) => CliError::Inconsistent(e),
            DiracError::FirstClassPresent => CliError::FirstClass("bracket requested".into()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::Dirac(d) => d.into(),
            other => CliError::Integrator(other),
        }
    }
}

fn quantum_error(e: QuantumError) -> CliError {
    match e {
        QuantumError::NoConvergence { .. } => CliError::Eigensolver(e),
        other => CliError::Validation(other.to_string()),
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "dirac-workbench",
    version,
    about = "Dirac constraint analysis, constrained dynamics and ring spectra"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the constraint algorithm on a model and write the JSON report.
    Analyze(AnalyzeArgs),
    /// Integrate the constrained equations of motion and write a CSV trajectory.
    Simulate(SimulateArgs),
    /// Energy levels of the quantum ring.
    Spectrum(SpectrumArgs),
    /// Operator-algebra residuals and the ordering demonstration.
    Operators(OperatorArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Model file, or the name of a bundled model (circle, free, pinned_line).
    pub model: PathBuf,
    /// Output path; `-` for stdout.
    #[arg(long, default_value = "-")]
    pub out: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimMethod {
    DiracRk4,
    Project,
    Exact,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub model: PathBuf,
    /// Step size; defaults to the model's.
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, value_enum, default_value = "dirac-rk4")]
    pub method: SimMethod,
    /// Index of the sample point used as initial state.
    #[arg(long, default_value_t = 0)]
    pub point: usize,
    #[arg(long, default_value = "-")]
    pub out: String,
}

#[derive(Debug, Clone, Args)]
pub struct RingArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub r0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub m: f64,
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
}

impl RingArgs {
    fn params(&self) -> Result<RingParams, CliError> {
        RingParams::new(self.r0, self.m, self.hbar, self.alpha, self.beta).map_err(quantum_error)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpectrumMethod {
    Analytic,
    Grid,
    Fourier,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub ring: RingArgs,
    #[arg(long, default_value_t = 5)]
    pub levels: usize,
    #[arg(long, value_enum, default_value = "analytic")]
    pub method: SpectrumMethod,
    #[arg(long = "gridN", default_value_t = 128)]
    pub grid_n: usize,
    /// Fourier truncation for `--method fourier`.
    #[arg(long = "N", default_value_t = 32)]
    pub n: usize,
    /// Drop the constant `hbar^2/(8 m r0^2)` (analytic method only).
    #[arg(long)]
    pub no_e0: bool,
    #[arg(long, default_value = "-")]
    pub out: String,
}

#[derive(Debug, Args)]
pub struct OperatorArgs {
    #[command(flatten)]
    pub ring: RingArgs,
    #[arg(long = "N", default_value_t = 16)]
    pub n: usize,
    #[arg(long, default_value = "-")]
    pub out: String,
}

fn write_out(out: &str, bytes: &[u8]) -> Result<(), CliError> {
    let io_err = |source| CliError::Io {
        path: out.to_string(),
        source,
    };
    if out == "-" {
        let mut so = io::stdout().lock();
        so.write_all(bytes).and_then(|_| so.flush()).map_err(io_err)
    } else {
        File::create(out)
            .and_then(|mut f| f.write_all(bytes))
            .map_err(io_err)
    }
}

/// Loads the model and runs the constraint algorithm.
pub fn analyze_model(model: &Model) -> Result<DiracStructure, CliError> {
    Ok(consistency_chain(model)?)
}

pub fn cmd_analyze(a: &AnalyzeArgs) -> Result<(), CliError> {
    let model = load_model(&a.model)?;
    let s = analyze_model(&model)?;
    let v = report::analysis(&model, &s)?;
    write_out(&a.out, report::to_text(&v).as_bytes())?;
    if let Classification::FirstClassPresent { first, .. } = s.classification() {
        let names: Vec<String> = first.iter().map(|i| format!("phi{}", i + 1)).collect();
        return Err(CliError::FirstClass(if names.is_empty() {
            "no identically vanishing row".into()
        } else {
            names.join(", ")
        }));
    }
    Ok(())
}

/// Initial state for the reduced equations of motion taken from a sample point.
pub fn initial_state(model: &Model, names: &[String], index: usize) -> Result<Vec<f64>, CliError> {
    let pts = model.sample_points();
    let pt = pts.get(index).ok_or_else(|| {
        CliError::Validation(format!(
            "sample point {index} does not exist ({} available)",
            pts.len()
        ))
    })?;
    let t = model.symbols();
    names
        .iter()
        .map(|n| {
            let s = t.sym(n).map_err(|e| CliError::Validation(e.to_string()))?;
            pt.get(&s).and_then(|v| v.to_f64()).ok_or_else(|| {
                CliError::Validation(format!(
                    "sample point {index} has no finite value for '{n}'"
                ))
            })
        })
        .collect()
}

pub fn simulate(model: &Model, a: &SimulateArgs) -> Result<Trajectory, CliError> {
    let h = a.h.unwrap_or(model.defaults().h);
    if !(h.is_finite() && h > 0.0) {
        return Err(CliError::Validation(format!(
            "--h must be positive and finite, got {h}"
        )));
    }
    let steps = a.steps.unwrap_or(model.defaults().steps);
    let s = analyze_model(model)?;
    let sys = generate_eom(&s, model.parameters())?;
    let init = initial_state(model, sys.state_names(), a.point)?;
    let radius = || -> Result<f64, CliError> {
        let t = model.symbols();
        t.lookup("r0")
            .and_then(|r| model.parameters().get(&r))
            .and_then(|v| v.to_f64())
            .ok_or_else(|| {
                CliError::Validation("this method needs the ring radius parameter 'r0'".into())
            })
    };
    let tr = match a.method {
        SimMethod::DiracRk4 => integrate_rk4(&sys, &init, h, steps)?,
        SimMethod::Project => integrate_project(&sys, radius()?, &init, h, steps)?,
        SimMethod::Exact => exact_circle(&sys, radius()?, &init, h, steps)?,
    };
    Ok(tr)
}

pub fn cmd_simulate(a: &SimulateArgs) -> Result<(), CliError> {
    let model = load_model(&a.model)?;
    let tr = simulate(&model, a)?;
    let mut buf = Vec::new();
    tr.write_csv(&mut buf).map_err(|source| CliError::Io {
        path: a.out.clone(),
        source,
    })?;
    write_out(&a.out, &buf)
}

pub fn spectrum_report(a: &SpectrumArgs) -> Result<serde_json::Value, CliError> {
    let p = a.ring.params()?;
    if a.levels == 0 {
        return Err(CliError::Validation("--levels must be at least 1".into()));
    }
    if a.no_e0 && a.method != SpectrumMethod::Analytic {
        return Err(CliError::Validation(
            "--no-e0 is only available with --method analytic".into(),
        ));
    }
    let (r, grid) = match a.method {
        SpectrumMethod::Analytic => (analytic_spectrum_with(&p, a.levels, !a.no_e0), None),
        SpectrumMethod::Grid => (
            grid_spectrum(&p, a.grid_n, a.levels).map_err(quantum_error)?,
            Some(a.grid_n),
        ),
        SpectrumMethod::Fourier => (
            fourier_spectrum(&p, a.n, a.levels).map_err(quantum_error)?,
            None,
        ),
    };
    Ok(report::spectrum(&p, &r, !a.no_e0, grid))
}

pub fn cmd_spectrum(a: &SpectrumArgs) -> Result<(), CliError> {
    let v = spectrum_report(a)?;
    write_out(&a.out, report::to_text(&v).as_bytes())
}

pub fn operators_report(a: &OperatorArgs) -> Result<serde_json::Value, CliError> {
    let p = a.ring.params()?;
    let r = algebra_residuals(&p, a.n).map_err(quantum_error)?;
    let o = nonhermitian_ordering_demo(&p, a.n).map_err(quantum_error)?;
    Ok(report::operators(&p, &r, &o))
}

pub fn cmd_operators(a: &OperatorArgs) -> Result<(), CliError> {
    let v = operators_report(a)?;
    write_out(&a.out, report::to_text(&v).as_bytes())
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Analyze(a) => cmd_analyze(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Operators(a) => cmd_operators(a),
    }
}
