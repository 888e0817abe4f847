//! Quantum particle on a ring: exact spectra, truncated Fourier-basis operators
//! and a finite-difference eigensolver.

mod grid;
mod ops;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use thiserror::Error;

pub use grid::{
    grid_hamiltonian, grid_spectrum, hermitian_eigenvalues, jacobi_eigenvalues, DEFAULT_SWEEPS,
    JACOBI_TOLERANCE,
};
pub use ops::{
    algebra_residuals, nonhermitian_ordering_demo, operator_matrix, DiffOp, Operator,
    OperatorMatrix, OrderingReport, ResidualReport, RingOperators, TrigPoly,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error("invalid ring parameters: {0}")]
    InvalidParams(String),
    #[error("truncation N = {got} is below the minimum {min}")]
    Truncation { min: usize, got: usize },
    #[error("grid of {got} points is below the minimum 16")]
    GridTooSmall { got: usize },
    #[error("requested {levels} levels; between 1 and {max} available")]
    Levels { levels: usize, max: usize },
    #[error("Jacobi iteration did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
}

/// Radius, mass, action unit, flux `alpha` and boundary twist `beta` in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingParams {
    pub r0: f64,
    pub m: f64,
    pub hbar: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl RingParams {
    pub fn new(r0: f64, m: f64, hbar: f64, alpha: f64, beta: f64) -> Result<Self, QuantumError> {
        for (name, v) in [("r0", r0), ("m", m), ("hbar", hbar)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(QuantumError::InvalidParams(format!(
                    "{name} must be positive and finite"
                )));
            }
        }
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(QuantumError::InvalidParams(
                "alpha and beta must be finite".into(),
            ));
        }
        Ok(RingParams {
            r0,
            m,
            hbar,
            alpha,
            beta: beta - beta.floor(),
        })
    }

    /// `r0 = m = hbar = 1`.
    pub fn unit(alpha: f64, beta: f64) -> Result<Self, QuantumError> {
        Self::new(1.0, 1.0, 1.0, alpha, beta)
    }

    /// `alpha mod 1`.
    pub fn alpha_bar(&self) -> f64 {
        self.alpha - self.alpha.floor()
    }

    /// `hbar^2 / (8 m r0^2)`.
    pub fn e0(&self) -> f64 {
        self.hbar * self.hbar / (8.0 * self.m * self.r0 * self.r0)
    }

    fn exact(&self) -> (BigRational, BigRational, BigRational) {
        let q = |v: f64| BigRational::from_float(v).expect("validated finite");
        let scale = q(self.hbar) * q(self.hbar)
            / (BigRational::from_integer(2.into()) * q(self.m) * q(self.r0) * q(self.r0));
        (scale, q(self.alpha), q(self.beta))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Analytic,
    FourierTruncated,
    GridFd,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::FourierTruncated => "fourier-truncated",
            Method::GridFd => "grid-fd",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    pub energy: f64,
    /// Fourier mode, when the level is labelled by one.
    pub n: Option<i64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub method: Method,
    pub levels: Vec<Level>,
}

impl SpectrumResult {
    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.energy).collect()
    }
}

/// Lowest `levels` values of `hbar^2 (n + beta - alpha)^2 / (2 m r0^2)` (plus
/// `E0` when requested), computed exactly, as `(n, energy)` ascending.
pub fn analytic_levels_exact(
    p: &RingParams,
    levels: usize,
    include_e0: bool,
) -> Vec<(i64, BigRational)> {
    let (scale, alpha, beta) = p.exact();
    let shift = &alpha - &beta;
    let centre = shift.round().to_i64().unwrap_or(0);
    let reach = levels as i64 / 2 + 2;
    let e0 = &scale / BigRational::from_integer(4.into());
    let mut out: Vec<(i64, BigRational)> = (centre - reach..=centre + reach)
        .map(|n| {
            let k = BigRational::from_integer(n.into()) - &shift;
            let e = &scale * &k * &k;
            (n, if include_e0 { e + &e0 } else { e })
        })
        .collect();
    out.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
    out.truncate(levels);
    out
}

pub fn analytic_spectrum(p: &RingParams, levels: usize) -> SpectrumResult {
    analytic_spectrum_with(p, levels, true)
}

pub fn analytic_spectrum_with(p: &RingParams, levels: usize, include_e0: bool) -> SpectrumResult {
    SpectrumResult {
        method: Method::Analytic,
        levels: analytic_levels_exact(p, levels, include_e0)
            .into_iter()
            .map(|(n, e)| Level {
                energy: e.to_f64().unwrap_or(f64::NAN),
                n: Some(n),
            })
            .collect(),
    }
}

/// `hbar^2/(2 m r0^2) (1/2 - |1/2 - alpha_bar|)^2 + E0`, for `beta = 0`.
pub fn ground_energy(p: &RingParams) -> f64 {
    let (scale, alpha, _) = p.exact();
    let half = BigRational::new(1.into(), 2.into());
    let abar = &alpha - alpha.floor();
    let d = &half - (&half - &abar).abs();
    let e = &scale * &d * &d + &scale / BigRational::from_integer(4.into());
    e.to_f64().unwrap_or(f64::NAN)
}

/// Eigenvalues of the truncated Hamiltonian matrix (diagonal in the twisted basis).
pub fn fourier_spectrum(
    p: &RingParams,
    truncation: usize,
    levels: usize,
) -> Result<SpectrumResult, QuantumError> {
    let h = operator_matrix(Operator::H, p, truncation)?;
    let n = truncation as i64;
    let mut lv: Vec<Level> = (-n..=n)
        .map(|k| Level {
            energy: h.at(k, k).re,
            n: Some(k),
        })
        .collect();
    lv.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    if levels == 0 || levels > lv.len() {
        return Err(QuantumError::Levels {
            levels,
            max: lv.len(),
        });
    }
    lv.truncate(levels);
    Ok(SpectrumResult {
        method: Method::FourierTruncated,
        levels: lv,
    })
}
