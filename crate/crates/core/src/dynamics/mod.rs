//! Numeric equations of motion from Dirac brackets, integrators and error metrics.

mod eom;
mod integrate;

use std::io::{self, Write};

use thiserror::Error;

use crate::brackets::BracketError;
use crate::dirac::DiracError;
use crate::expr::ExprError;

pub use eom::{generate_eom, EomSystem, Program};
pub use integrate::{exact_circle, integrate_project, integrate_rk4, INITIAL_TOLERANCE};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error(transparent)]
    Dirac(#[from] DiracError),
    #[error(transparent)]
    Bracket(#[from] BracketError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("'{0}' survives in the equations of motion")]
    Unresolved(String),
    #[error("invalid step size {0}")]
    InvalidStep(f64),
    #[error("state has {got} components, expected {expected}")]
    StateLength { expected: usize, got: usize },
    #[error("initial state violates {name} by {value:e}")]
    OffSurface { name: String, value: f64 },
    #[error("non-finite state at step {step}")]
    NonFinite { step: usize },
    #[error("projection undefined at step {step} (|q| = 0)")]
    ProjectionUndefined { step: usize },
    #[error("the exact solution needs exactly two coordinates")]
    NotPlanar,
    #[error("trajectories are on different time grids")]
    GridMismatch,
}

/// States and diagnostics on the grid `t_k = t0 + k h`, `k = 0..=steps`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub t0: f64,
    pub h: f64,
    pub steps: usize,
    pub state_names: Vec<String>,
    pub diagnostic_names: Vec<String>,
    pub states: Vec<Vec<f64>>,
    pub diagnostics: Vec<Vec<f64>>,
    constraint_count: usize,
}

impl Trajectory {
    fn new(sys: &EomSystem, h: f64, steps: usize) -> Self {
        Trajectory {
            t0: 0.0,
            h,
            steps,
            state_names: sys.state_names().to_vec(),
            diagnostic_names: sys.diagnostic_names().to_vec(),
            states: Vec::with_capacity(steps + 1),
            diagnostics: Vec::with_capacity(steps + 1),
            constraint_count: sys.constraint_count(),
        }
    }

    fn push(&mut self, sys: &EomSystem, state: &[f64]) {
        self.diagnostics.push(sys.diagnostics(state));
        self.states.push(state.to_vec());
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.h
    }

    pub fn last(&self) -> &[f64] {
        self.states
            .last()
            .expect("trajectory holds the initial state")
    }

    fn diagnostic(&self, name: &str) -> Option<usize> {
        self.diagnostic_names.iter().position(|n| n == name)
    }

    /// Largest `|phi|` over all steps and all constraint diagnostics.
    pub fn constraint_drift(&self) -> f64 {
        self.diagnostics
            .iter()
            .flat_map(|d| d[..self.constraint_count].iter())
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest `|q(t) - q(0)| / |q(0)|` of a named diagnostic; absolute when `q(0) = 0`.
    pub fn relative_drift(&self, name: &str) -> Option<f64> {
        let i = self.diagnostic(name)?;
        let q0 = self.diagnostics[0][i];
        let scale = if q0 == 0.0 { 1.0 } else { q0.abs() };
        Some(
            self.diagnostics
                .iter()
                .fold(0.0f64, |m, d| m.max((d[i] - q0).abs() / scale)),
        )
    }

    /// One row per step, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let header: Vec<&str> = std::iter::once("t")
            .chain(self.state_names.iter().map(String::as_str))
            .chain(self.diagnostic_names.iter().map(String::as_str))
            .collect();
        writeln!(w, "{}", header.join(","))?;
        for (k, (s, d)) in self.states.iter().zip(&self.diagnostics).enumerate() {
            let mut row = format!("{:.16e}", self.time(k));
            for v in s.iter().chain(d) {
                row.push_str(&format!(",{v:.16e}"));
            }
            writeln!(w, "{row}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    /// Largest component-wise state difference over the grid.
    pub max_state_error: f64,
    /// Largest constraint value along the first trajectory.
    pub constraint_drift: f64,
    /// Relative energy drift along the first trajectory.
    pub energy_drift: f64,
}

pub fn compare(a: &Trajectory, b: &Trajectory) -> Result<Metrics, DynamicsError> {
    if a.steps != b.steps || a.h != b.h || a.t0 != b.t0 || a.states.len() != b.states.len() {
        return Err(DynamicsError::GridMismatch);
    }
    let max_state_error = a
        .states
        .iter()
        .zip(&b.states)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(u, v)| (u - v).abs()))
        .fold(0.0, f64::max);
    Ok(Metrics {
        max_state_error,
        constraint_drift: a.constraint_drift(),
        energy_drift: a.relative_drift("H").unwrap_or(0.0),
    })
}

/// `log(e_k / e_{k+1}) / log(h_k / h_{k+1})` for successive `(h, error)` pairs.
pub fn observed_orders(runs: &[(f64, f64)]) -> Vec<f64> {
    runs.windows(2)
        .map(|w| (w[0].1 / w[1].1).ln() / (w[0].0 / w[1].0).ln())
        .collect()
}
