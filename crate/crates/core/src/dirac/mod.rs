//! Dirac's algorithm: Legendre analysis, the consistency chain, classification of
//! constraints and the Dirac bracket.

mod bracket;
mod chain;
mod legendre;
mod model;

use thiserror::Error;

use crate::brackets::{BracketError, PhaseSpace, RationalMatrix, RewriteRules};
use crate::expr::{ExprError, RationalExpr, SymbolTable};

pub use bracket::{
    dirac_bracket, reduced_hamiltonian, verify_strong_zero, StrongZeroReport, Violation,
};
pub use chain::{consistency_chain, consistency_chain_with, ChainOptions};
pub use legendre::legendre_analyze;
pub use model::{Defaults, Model};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiracError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Bracket(#[from] BracketError),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("lagrangian has a velocity in a denominator")]
    NonPolynomialVelocity,
    #[error("lagrangian has degree {degree} in the velocities (at most 2 supported)")]
    VelocityDegree { degree: u32 },
    #[error(
        "unsupported singular structure: the velocity Hessian is singular beyond absent velocities"
    )]
    UnsupportedSingular,
    #[error("inconsistent constraint chain at generation {generation}: {expression} must vanish")]
    Inconsistent {
        generation: usize,
        expression: String,
    },
    #[error("constraint chain did not close within {cap} generations")]
    GenerationCap { cap: usize },
    #[error("first-class constraints present; the Dirac bracket is undefined")]
    FirstClassPresent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Primary,
    Secondary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintClass {
    First,
    Second,
    Unknown,
}

impl ConstraintClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ConstraintClass::First => "first",
            ConstraintClass::Second => "second",
            ConstraintClass::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub expression: RationalExpr,
    pub origin: Origin,
    /// 0 for primaries, `k` for constraints found in the `k`-th consistency pass.
    pub generation: usize,
    pub class: ConstraintClass,
}

impl Constraint {
    pub fn primary(expression: RationalExpr) -> Self {
        Constraint {
            expression,
            origin: Origin::Primary,
            generation: 0,
            class: ConstraintClass::Unknown,
        }
    }

    pub fn secondary(expression: RationalExpr, generation: usize) -> Self {
        Constraint {
            expression,
            origin: Origin::Secondary,
            generation,
            class: ConstraintClass::Unknown,
        }
    }
}

/// Solution of the consistency conditions for the multiplier `u_j` of a primary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiplierSolution {
    /// Index of the primary constraint in [`DiracStructure::constraints`].
    pub constraint: usize,
    /// `None` when the conditions leave `u_j` undetermined.
    pub value: Option<RationalExpr>,
    /// Whether the solved value vanishes on the constraint surface.
    pub vanishes_on_surface: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification {
    Unconstrained,
    AllSecondClass,
    /// Rows of the reduced bracket matrix that vanish identically are listed;
    /// `rank` is the largest exact rank seen at the sample points.
    FirstClassPresent {
        first: Vec<usize>,
        rank: Option<usize>,
    },
}

/// Everything produced by the algorithm for one model.
#[derive(Debug, Clone)]
pub struct DiracStructure {
    pub(crate) symbols: SymbolTable,
    pub(crate) space: PhaseSpace,
    pub(crate) hamiltonian: RationalExpr,
    pub(crate) constraints: Vec<Constraint>,
    pub(crate) multipliers: Vec<MultiplierSolution>,
    pub(crate) m: Option<RationalMatrix>,
    pub(crate) g: Option<RationalMatrix>,
    pub(crate) rules: RewriteRules,
    pub(crate) classification: Classification,
    pub(crate) rank: Option<usize>,
    pub(crate) generations: usize,
}

impl DiracStructure {
    pub fn symbols(&self) -> &SymbolTable {
        &self.symbols
    }

    pub fn phase_space(&self) -> &PhaseSpace {
        &self.space
    }

    pub fn hamiltonian(&self) -> &RationalExpr {
        &self.hamiltonian
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn constraint_exprs(&self) -> Vec<RationalExpr> {
        self.constraints
            .iter()
            .map(|c| c.expression.clone())
            .collect()
    }

    pub fn multipliers(&self) -> &[MultiplierSolution] {
        &self.multipliers
    }

    /// `M_ij = {phi_i, phi_j}` before reduction.
    pub fn m(&self) -> Option<&RationalMatrix> {
        self.m.as_ref()
    }

    /// Inverse of `M`, reduced; present only when every constraint is second class.
    pub fn g(&self) -> Option<&RationalMatrix> {
        self.g.as_ref()
    }

    pub fn rules(&self) -> &RewriteRules {
        &self.rules
    }

    pub fn classification(&self) -> &Classification {
        &self.classification
    }

    pub fn rank(&self) -> Option<usize> {
        self.rank
    }

    pub fn generations(&self) -> usize {
        self.generations
    }

    /// `H + u1*phi_a + ...` with the multipliers kept as names.
    pub fn total_hamiltonian_text(&self) -> String {
        let mut s = self.hamiltonian.to_text(&self.symbols);
        for (j, u) in self.multipliers.iter().enumerate() {
            let phi = self.constraints[u.constraint]
                .expression
                .to_text(&self.symbols);
            s.push_str(&format!(" + u{}*({})", j + 1, phi));
        }
        s
    }
}
