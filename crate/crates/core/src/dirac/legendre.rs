use std::collections::BTreeMap;

use super::{Constraint, DiracError, Model};
use crate::brackets::{invert_matrix, BracketError, RationalMatrix, RewriteRules};
use crate::expr::{RationalExpr, Sym, SymbolKind};

/// Legendre transform of a Lagrangian at most quadratic in the velocities.
///
/// Velocities absent from `L` give primary constraints `p = 0`; the remaining
/// velocity block must have an invertible Hessian.
pub fn legendre_analyze(model: &Model) -> Result<(RationalExpr, Vec<Constraint>), DiracError> {
    let t = model.symbols();
    let nvars = t.len();
    let l = model.lagrangian();
    let velocity_syms = t.of_kind(SymbolKind::Velocity);

    if velocity_syms.iter().any(|&v| l.denominator().depends_on(v)) {
        return Err(DiracError::NonPolynomialVelocity);
    }
    for (m, _) in l.numerator().terms() {
        let d: u32 = velocity_syms.iter().map(|&v| m.exponent(v)).sum();
        if d > 2 {
            return Err(DiracError::VelocityDegree { degree: d });
        }
    }

    let mut primaries = Vec::new();
    let mut regular: Vec<(Sym, Sym)> = Vec::new();
    for (q, p) in t.canonical_pairs() {
        let v = t
            .velocity_of(q)
            .ok_or_else(|| DiracError::InvalidModel(format!("'{}' has no velocity", t.name(q))))?;
        if l.depends_on(v) {
            regular.push((v, p));
        } else {
            primaries.push(Constraint::primary(RationalExpr::symbol(nvars, p)));
        }
    }
    if regular.is_empty() {
        return Ok((-l, primaries));
    }

    let at_rest: BTreeMap<Sym, RationalExpr> = velocity_syms
        .iter()
        .map(|&v| (v, RationalExpr::zero(nvars)))
        .collect();
    let first: Vec<RationalExpr> = regular.iter().map(|&(v, _)| l.differentiate(v)).collect();
    let b: Vec<RationalExpr> = first
        .iter()
        .map(|d| d.substitute(&at_rest))
        .collect::<Result<_, _>>()?;
    let w = RationalMatrix::from_rows(
        first
            .iter()
            .map(|d| regular.iter().map(|&(v, _)| d.differentiate(v)).collect())
            .collect(),
    )?;
    let winv = invert_matrix(&w, &RewriteRules::empty(nvars)).map_err(|e| match e {
        BracketError::Singular { .. } => DiracError::UnsupportedSingular,
        other => other.into(),
    })?;

    let shifted: Vec<RationalExpr> = regular
        .iter()
        .zip(&b)
        .map(|(&(_, p), bi)| &RationalExpr::symbol(nvars, p) - bi)
        .collect();
    let mut solution = BTreeMap::new();
    for (i, &(v, _)) in regular.iter().enumerate() {
        let mut vi = RationalExpr::zero(nvars);
        for (j, s) in shifted.iter().enumerate() {
            vi = &vi + &(winv.get(i, j) * s);
        }
        solution.insert(v, vi);
    }

    let mut h = -l.substitute(&solution)?;
    for &(v, p) in &regular {
        h = &h + &(&RationalExpr::symbol(nvars, p) * &solution[&v]);
    }
    Ok((h, primaries))
}
