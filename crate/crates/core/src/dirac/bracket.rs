use super::{DiracError, DiracStructure};
use crate::brackets::poisson_bracket;
use crate::expr::RationalExpr;

/// `[A,B]_D = [A,B] - sum_ij [A,phi_i] G_ij [phi_j,B]`, reduced modulo the rules.
pub fn dirac_bracket(
    a: &RationalExpr,
    b: &RationalExpr,
    s: &DiracStructure,
) -> Result<RationalExpr, DiracError> {
    let pb = poisson_bracket(&s.space, a, b);
    if s.constraints.is_empty() {
        return Ok(s.rules.reduce(&pb)?);
    }
    let g = s.g.as_ref().ok_or(DiracError::FirstClassPresent)?;
    let left: Vec<RationalExpr> = s
        .constraints
        .iter()
        .map(|c| s.rules.reduce(&poisson_bracket(&s.space, a, &c.expression)))
        .collect::<Result<_, _>>()?;
    let right: Vec<RationalExpr> = s
        .constraints
        .iter()
        .map(|c| s.rules.reduce(&poisson_bracket(&s.space, &c.expression, b)))
        .collect::<Result<_, _>>()?;
    let mut acc = pb;
    for (i, l) in left.iter().enumerate().filter(|(_, l)| !l.is_zero()) {
        for (j, r) in right.iter().enumerate().filter(|(_, r)| !r.is_zero()) {
            let gij = g.get(i, j);
            if !gij.is_zero() {
                acc = &acc - &(&(l * gij) * r);
            }
        }
    }
    Ok(s.rules.reduce(&acc)?)
}

/// `H` with every constraint imposed strongly.
pub fn reduced_hamiltonian(s: &DiracStructure) -> Result<RationalExpr, DiracError> {
    Ok(s.rules.reduce(&s.hamiltonian)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub quantity: usize,
    pub constraint: usize,
    pub value: RationalExpr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrongZeroReport {
    pub checked: usize,
    pub violations: Vec<Violation>,
}

impl StrongZeroReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `[A, phi_i]_D = 0` for every quantity and every constraint.
pub fn verify_strong_zero(
    s: &DiracStructure,
    quantities: &[RationalExpr],
) -> Result<StrongZeroReport, DiracError> {
    let mut report = StrongZeroReport {
        checked: 0,
        violations: Vec::new(),
    };
    for (qi, a) in quantities.iter().enumerate() {
        for (ci, c) in s.constraints.iter().enumerate() {
            let v = dirac_bracket(a, &c.expression, s)?;
            report.checked += 1;
            if !s.rules.is_zero_mod(&v)? {
                report.violations.push(Violation {
                    quantity: qi,
                    constraint: ci,
                    value: v,
                });
            }
        }
    }
    Ok(report)
}
