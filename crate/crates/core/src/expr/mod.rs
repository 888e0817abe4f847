//! Exact symbolic kernel: parsing, canonical rational functions and calculus.

mod parse;
mod poly;
mod rational;
mod symbols;

use thiserror::Error;

pub use parse::{parse, Ast, BinOp, MAX_EXPONENT};
pub use poly::{Monomial, Poly};
pub use rational::{canonicalize, Point, RationalExpr};
pub use symbols::{Sym, SymbolInfo, SymbolKind, SymbolTable, SymbolTableBuilder};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("empty expression")]
    Empty,
    #[error("unexpected character '{ch}' at position {pos}")]
    Lex { pos: usize, ch: char },
    #[error("unexpected token '{found}' at position {pos}")]
    UnexpectedToken { pos: usize, found: String },
    #[error("unexpected end of input at position {pos}")]
    UnexpectedEnd { pos: usize },
    #[error("unknown symbol '{name}' at position {pos}")]
    UnknownSymbol { name: String, pos: usize },
    #[error("exponent at position {pos} is not an integer constant")]
    NonIntegerExponent { pos: usize },
    #[error("exponent {exponent} at position {pos} exceeds the limit of {MAX_EXPONENT}")]
    ExponentOutOfRange { pos: usize, exponent: String },
    #[error("division by an expression that is identically zero")]
    DivisionByZero,
    #[error("denominator vanishes")]
    ZeroDenominator,
    #[error("symbol '{0}' has no value")]
    UnboundSymbol(String),
    #[error("duplicate symbol '{0}'")]
    DuplicateSymbol(String),
    #[error("'{0}' is not a valid symbol name")]
    InvalidSymbolName(String),
}

/// Parse and canonicalize in one step.
pub fn expr(text: &str, symbols: &SymbolTable) -> Result<RationalExpr, ExprError> {
    canonicalize(&parse(text, symbols)?, symbols.len())
}
