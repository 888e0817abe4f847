//! Poisson brackets, constraint matrices and reduction modulo constraints.

mod matrix;
mod rules;

use thiserror::Error;

use crate::expr::{ExprError, RationalExpr, Sym, SymbolKind, SymbolTable};

pub use matrix::{bracket_matrix, invert_matrix, rank_at_points, RationalMatrix};
pub use rules::{RewriteRules, Rule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BracketError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("invalid rewrite rule: {0}")]
    InvalidRule(String),
    #[error("constraints are contradictory (the ideal contains 1)")]
    TrivialIdeal,
    #[error("rule completion exceeded {limit} rules")]
    CompletionLimit { limit: usize },
    #[error("reduction did not reach a fixpoint within {cap} passes")]
    ReductionCap { cap: usize },
    #[error("denominator vanishes on the constraint surface")]
    DenominatorVanishes,
    #[error("matrix must be square and non-empty")]
    NotSquare,
    #[error("matrix is singular on the constraint surface (no pivot in column {column})")]
    Singular { column: usize },
    #[error("computed inverse fails M*G = I modulo constraints")]
    InverseCheckFailed,
    #[error("sample point {point} violates constraint {constraint}")]
    OffSurface { point: usize, constraint: usize },
    #[error("matrix entry is undefined at sample point {point}")]
    UndefinedAtPoint { point: usize },
}

/// Canonical coordinates: ordered `(q, p)` pairs; every other symbol is a constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseSpace {
    nvars: usize,
    pairs: Vec<(Sym, Sym)>,
    parameters: Vec<Sym>,
}

impl PhaseSpace {
    pub fn new(symbols: &SymbolTable) -> Self {
        PhaseSpace {
            nvars: symbols.len(),
            pairs: symbols.canonical_pairs(),
            parameters: symbols.of_kind(SymbolKind::Parameter),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn pairs(&self) -> &[(Sym, Sym)] {
        &self.pairs
    }

    pub fn parameters(&self) -> &[Sym] {
        &self.parameters
    }

    /// Coordinates followed by momenta, in pair order.
    pub fn variables(&self) -> Vec<Sym> {
        self.pairs
            .iter()
            .map(|p| p.0)
            .chain(self.pairs.iter().map(|p| p.1))
            .collect()
    }
}

/// `{a, b} = sum_i (da/dq_i db/dp_i - da/dp_i db/dq_i)`.
pub fn poisson_bracket(space: &PhaseSpace, a: &RationalExpr, b: &RationalExpr) -> RationalExpr {
    let mut acc = RationalExpr::zero(space.nvars);
    for &(q, p) in &space.pairs {
        if a.depends_on(q) && b.depends_on(p) {
            acc = &acc + &(&a.differentiate(q) * &b.differentiate(p));
        }
        if a.depends_on(p) && b.depends_on(q) {
            acc = &acc - &(&a.differentiate(p) * &b.differentiate(q));
        }
    }
    acc
}
