use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::DynamicsError;
use crate::brackets::poisson_bracket;
use crate::dirac::{dirac_bracket, reduced_hamiltonian, DiracStructure};
use crate::expr::{Poly, RationalExpr, Sym, SymbolKind};

#[derive(Debug, Clone)]
struct Term {
    coef: f64,
    factors: Vec<(usize, u32)>,
}

/// A rational function lowered to flat term lists over state indices.
#[derive(Debug, Clone)]
pub struct Program {
    num: Vec<Term>,
    den: Option<Vec<Term>>,
}

impl Program {
    fn lower(
        e: &RationalExpr,
        index: &BTreeMap<Sym, usize>,
        names: &dyn Fn(Sym) -> String,
    ) -> Result<Self, DynamicsError> {
        let terms = |p: &Poly| -> Result<Vec<Term>, DynamicsError> {
            p.terms()
                .map(|(m, c)| {
                    let mut factors = Vec::new();
                    for (i, &k) in m.exponents().iter().enumerate() {
                        if k > 0 {
                            let slot = index
                                .get(&Sym(i))
                                .ok_or_else(|| DynamicsError::Unresolved(names(Sym(i))))?;
                            factors.push((*slot, k));
                        }
                    }
                    Ok(Term {
                        coef: c.to_f64().unwrap_or(f64::NAN),
                        factors,
                    })
                })
                .collect()
        };
        let num = terms(e.numerator())?;
        let den = if e.is_polynomial() {
            None
        } else {
            Some(terms(e.denominator())?)
        };
        Ok(Program { num, den })
    }

    fn max_exponents(&self, out: &mut [u32]) {
        for t in self.num.iter().chain(self.den.iter().flatten()) {
            for &(i, k) in &t.factors {
                out[i] = out[i].max(k);
            }
        }
    }

    fn eval(&self, pow: &Powers) -> f64 {
        let sum = |terms: &[Term]| {
            terms
                .iter()
                .map(|t| {
                    t.factors
                        .iter()
                        .fold(t.coef, |acc, &(i, k)| acc * pow.get(i, k))
                })
                .sum::<f64>()
        };
        match &self.den {
            None => sum(&self.num),
            Some(d) => sum(&self.num) / sum(d),
        }
    }
}

/// `pow.get(i, k) = state[i]^k` for `k` up to the largest exponent in use.
struct Powers {
    offsets: Vec<usize>,
    table: Vec<f64>,
}

impl Powers {
    fn new(max: &[u32]) -> Self {
        let mut offsets = Vec::with_capacity(max.len());
        let mut len = 0;
        for &m in max {
            offsets.push(len);
            len += m as usize + 1;
        }
        Powers {
            offsets,
            table: vec![1.0; len],
        }
    }

    fn fill(&mut self, state: &[f64], max: &[u32]) {
        for (i, (&m, &x)) in max.iter().zip(state).enumerate() {
            let o = self.offsets[i];
            for k in 1..=m as usize {
                self.table[o + k] = self.table[o + k - 1] * x;
            }
        }
    }

    fn get(&self, i: usize, k: u32) -> f64 {
        self.table[self.offsets[i] + k as usize]
    }
}

/// Named group of lowered programs sharing one power table.
#[derive(Debug, Clone)]
pub(crate) struct Bundle {
    programs: Vec<Program>,
    max: Vec<u32>,
}

impl Bundle {
    fn new(programs: Vec<Program>, nstate: usize) -> Self {
        let mut max = vec![0; nstate];
        for p in &programs {
            p.max_exponents(&mut max);
        }
        Bundle { programs, max }
    }

    pub(crate) fn eval(&self, state: &[f64], out: &mut [f64]) {
        let mut pow = Powers::new(&self.max);
        pow.fill(state, &self.max);
        for (o, p) in out.iter_mut().zip(&self.programs) {
            *o = p.eval(&pow);
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.programs.len()
    }
}

/// Equations of motion `z' = [z, H]_D` over the non-multiplier phase-space variables.
#[derive(Debug, Clone)]
pub struct EomSystem {
    pub(crate) state_names: Vec<String>,
    pub(crate) ncoords: usize,
    pub(crate) derivatives: Vec<RationalExpr>,
    pub(crate) rhs: Bundle,
    pub(crate) free_rhs: Bundle,
    pub(crate) diag_names: Vec<String>,
    pub(crate) diagnostics: Bundle,
    pub(crate) constraint_count: usize,
}

impl EomSystem {
    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    pub fn dim(&self) -> usize {
        self.state_names.len()
    }

    pub fn coordinates(&self) -> usize {
        self.ncoords
    }

    /// Exact derivative expressions, after multiplier elimination and before
    /// parameter substitution.
    pub fn derivative_exprs(&self) -> &[RationalExpr] {
        &self.derivatives
    }

    pub fn diagnostic_names(&self) -> &[String] {
        &self.diag_names
    }

    /// Number of leading diagnostics that are constraint values.
    pub fn constraint_count(&self) -> usize {
        self.constraint_count
    }

    pub fn derivative(&self, state: &[f64], out: &mut [f64]) {
        self.rhs.eval(state, out);
    }

    /// Canonical flow of the reduced Hamiltonian, ignoring the constraints.
    pub fn free_derivative(&self, state: &[f64], out: &mut [f64]) {
        self.free_rhs.eval(state, out);
    }

    pub fn diagnostics(&self, state: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.diagnostics.len()];
        self.diagnostics.eval(state, &mut out);
        out
    }
}

/// Multipliers and their momenta expressed through constraints linear in them.
fn multiplier_bindings(s: &DiracStructure) -> BTreeMap<Sym, RationalExpr> {
    let t = s.symbols();
    let mult: Vec<Sym> = t
        .iter()
        .filter(|(_, i)| {
            matches!(
                i.kind,
                SymbolKind::Multiplier | SymbolKind::MultiplierMomentum
            )
        })
        .map(|(s, _)| s)
        .collect();
    let mut out = BTreeMap::new();
    for &target in &mult {
        for c in s.constraints() {
            let num = c.expression.numerator();
            if num.degree_in(target) != 1 || c.expression.denominator().depends_on(target) {
                continue;
            }
            let co = num.coefficients_in(target);
            if co.iter().any(|p| mult.iter().any(|&m| p.depends_on(m))) {
                continue;
            }
            let c0 = RationalExpr::from_poly(co[0].clone());
            let c1 = RationalExpr::from_poly(co[1].clone());
            if let Ok(v) = (-c0).try_div(&c1) {
                out.insert(target, v);
                break;
            }
        }
    }
    out
}

/// Lowers the Dirac flow of the reduced Hamiltonian. `parameters` are
/// substituted exactly before lowering.
pub fn generate_eom(
    s: &DiracStructure,
    parameters: &BTreeMap<Sym, BigRational>,
) -> Result<EomSystem, DynamicsError> {
    let t = s.symbols();
    let nvars = t.len();
    let pairs: Vec<(Sym, Sym)> = t
        .canonical_pairs()
        .into_iter()
        .filter(|&(q, _)| t.kind(q) == SymbolKind::Coordinate)
        .collect();
    let state: Vec<Sym> = pairs
        .iter()
        .map(|p| p.0)
        .chain(pairs.iter().map(|p| p.1))
        .collect();
    let index: BTreeMap<Sym, usize> = state.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let state_names: Vec<String> = state.iter().map(|&s| t.name(s).to_string()).collect();

    let mult = multiplier_bindings(s);
    let params: BTreeMap<Sym, RationalExpr> = parameters
        .iter()
        .map(|(&k, v)| (k, RationalExpr::constant(nvars, v.clone())))
        .collect();
    let eliminate = |e: &RationalExpr| -> Result<RationalExpr, DynamicsError> {
        let e = if mult.is_empty() {
            e.clone()
        } else {
            e.substitute(&mult)?
        };
        Ok(s.rules().reduce(&e)?)
    };
    let names = |x: Sym| t.name(x).to_string();
    let lower = |e: &RationalExpr| -> Result<Program, DynamicsError> {
        Program::lower(&e.substitute(&params)?, &index, &names)
    };

    let h = eliminate(&reduced_hamiltonian(s)?)?;
    let mut derivatives = Vec::with_capacity(state.len());
    let mut free = Vec::with_capacity(state.len());
    for &z in &state {
        let ze = RationalExpr::symbol(nvars, z);
        derivatives.push(eliminate(&dirac_bracket(&ze, &h, s)?)?);
        free.push(poisson_bracket(s.phase_space(), &ze, &h));
    }

    let mut diag_names = Vec::new();
    let mut diag = Vec::new();
    for (i, c) in s.constraints().iter().enumerate() {
        let v = if mult.is_empty() {
            c.expression.clone()
        } else {
            c.expression.substitute(&mult)?
        };
        if !v.is_zero() {
            diag_names.push(format!("phi{}", i + 1));
            diag.push(v);
        }
    }
    let constraint_count = diag.len();
    diag_names.push("H".into());
    diag.push(h.clone());
    if pairs.len() == 2 {
        let (x, y) = (
            RationalExpr::symbol(nvars, pairs[0].0),
            RationalExpr::symbol(nvars, pairs[1].0),
        );
        let (px, py) = (
            RationalExpr::symbol(nvars, pairs[0].1),
            RationalExpr::symbol(nvars, pairs[1].1),
        );
        diag_names.push("Lz".into());
        diag.push(&(&x * &py) - &(&y * &px));
    }

    let n = state.len();
    let rhs = Bundle::new(derivatives.iter().map(&lower).collect::<Result<_, _>>()?, n);
    let free_rhs = Bundle::new(free.iter().map(&lower).collect::<Result<_, _>>()?, n);
    let diagnostics = Bundle::new(diag.iter().map(&lower).collect::<Result<_, _>>()?, n);
    Ok(EomSystem {
        state_names,
        ncoords: pairs.len(),
        derivatives,
        rhs,
        free_rhs,
        diag_names,
        diagnostics,
        constraint_count,
    })
}
