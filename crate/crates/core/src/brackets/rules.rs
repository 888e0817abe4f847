use std::collections::VecDeque;

use num_rational::BigRational;
use num_traits::One;

use super::BracketError;
use crate::expr::{Monomial, Poly, RationalExpr};

/// `target -> replacement`, where every monomial of the replacement is smaller
/// than the target in the graded-lex order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    target: Monomial,
    replacement: Poly,
}

impl Rule {
    pub fn new(target: Monomial, replacement: Poly) -> Result<Self, BracketError> {
        if target.is_one() {
            return Err(BracketError::InvalidRule("target is a constant".into()));
        }
        if let Some((m, _)) = replacement.leading_term() {
            if *m >= target {
                return Err(BracketError::InvalidRule(
                    "replacement is not smaller than its target".into(),
                ));
            }
        }
        Ok(Rule {
            target,
            replacement,
        })
    }

    /// Orients `g = 0` as a rule rewriting its leading monomial.
    pub fn from_generator(g: &Poly) -> Result<Self, BracketError> {
        let (lm, lc) = g
            .leading_term()
            .ok_or_else(|| BracketError::InvalidRule("zero generator".into()))?;
        if lm.is_one() {
            return Err(BracketError::TrivialIdeal);
        }
        let lm = lm.clone();
        let inv = -lc.recip();
        let mut tail = g.clone();
        tail.add_term(lm.clone(), -lc.clone());
        Ok(Rule {
            target: lm,
            replacement: tail.scale(&inv),
        })
    }

    pub fn target(&self) -> &Monomial {
        &self.target
    }

    pub fn replacement(&self) -> &Poly {
        &self.replacement
    }

    /// `target - replacement`, the polynomial this rule sets to zero.
    pub fn generator(&self) -> Poly {
        let mut g = -&self.replacement;
        g.add_term(self.target.clone(), BigRational::one());
        g
    }
}

/// Ordered rewrite system used to reduce expressions modulo constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteRules {
    nvars: usize,
    rules: Vec<Rule>,
    cap: usize,
}

impl RewriteRules {
    pub const DEFAULT_CAP: usize = 32;
    const COMPLETION_LIMIT: usize = 64;

    pub fn empty(nvars: usize) -> Self {
        RewriteRules {
            nvars,
            rules: Vec::new(),
            cap: Self::DEFAULT_CAP,
        }
    }

    pub fn new(nvars: usize, rules: Vec<Rule>) -> Self {
        RewriteRules {
            nvars,
            rules,
            cap: Self::DEFAULT_CAP,
        }
    }

    /// One rule per nonzero generator, oriented at its leading monomial.
    pub fn from_generators(nvars: usize, gens: &[Poly]) -> Result<Self, BracketError> {
        let rules = gens
            .iter()
            .filter(|g| !g.is_zero())
            .map(Rule::from_generator)
            .collect::<Result<_, _>>()?;
        Ok(Self::new(nvars, rules))
    }

    /// Completes the generators to a confluent system (reduced Gröbner basis), so
    /// that [`RewriteRules::reduce`] sends every member of the generated ideal to zero.
    pub fn completed(nvars: usize, gens: &[Poly]) -> Result<Self, BracketError> {
        let basis = groebner_basis(nvars, gens)?;
        Self::from_generators(nvars, &basis)
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn generators(&self) -> Vec<Poly> {
        self.rules.iter().map(Rule::generator).collect()
    }

    pub fn reduce_poly(&self, p: &Poly) -> Result<Poly, BracketError> {
        reduce_with(&self.rules, p, self.cap)
    }

    /// Rewrites numerator and denominator separately to their fixpoints.
    pub fn reduce(&self, e: &RationalExpr) -> Result<RationalExpr, BracketError> {
        if self.rules.is_empty() {
            return Ok(e.clone());
        }
        let num = self.reduce_poly(e.numerator())?;
        if num.is_zero() {
            return Ok(RationalExpr::zero(e.nvars()));
        }
        let den = self.reduce_poly(e.denominator())?;
        if den.is_zero() {
            return Err(BracketError::DenominatorVanishes);
        }
        Ok(RationalExpr::new(num, den)?)
    }

    pub fn is_zero_mod(&self, e: &RationalExpr) -> Result<bool, BracketError> {
        Ok(self.reduce_poly(e.numerator())?.is_zero())
    }

    /// Equality of `a` and `b` on the surface cut out by the rules.
    pub fn equivalent(&self, a: &RationalExpr, b: &RationalExpr) -> Result<bool, BracketError> {
        self.is_zero_mod(&(a - b))
    }
}

fn reduce_with(rules: &[Rule], p: &Poly, cap: usize) -> Result<Poly, BracketError> {
    let mut cur = p.clone();
    for _ in 0..=cap {
        let mut changed = false;
        let mut out = Poly::zero(cur.nvars());
        for (m, c) in cur.terms() {
            match rules.iter().find(|r| r.target.divides(m)) {
                Some(r) => {
                    let k = r.target.max_power_in(m);
                    let rest = r.target.pow(k).quotient_of(m);
                    let image = if k == 1 {
                        r.replacement.clone()
                    } else {
                        r.replacement.pow(k)
                    };
                    out = &out + &image.mul_term(&rest, c);
                    changed = true;
                }
                None => out.add_term(m.clone(), c.clone()),
            }
        }
        if !changed {
            return Ok(out);
        }
        cur = out;
    }
    Err(BracketError::ReductionCap { cap })
}

fn monic(p: &Poly) -> Poly {
    match p.leading_coefficient() {
        Some(c) if !c.is_one() => p.scale(&c.recip()),
        _ => p.clone(),
    }
}

fn s_polynomial(f: &Poly, g: &Poly) -> Poly {
    let (fm, fc) = f.leading_term().expect("nonzero");
    let (gm, gc) = g.leading_term().expect("nonzero");
    let l = fm.lcm(gm);
    let a = f.mul_term(&fm.quotient_of(&l), &fc.recip());
    let b = g.mul_term(&gm.quotient_of(&l), &gc.recip());
    &a - &b
}

const NORMAL_FORM_CAP: usize = 10_000;

/// Buchberger's algorithm with the coprime-leading-monomial criterion, followed by
/// minimisation and inter-reduction.
fn groebner_basis(nvars: usize, gens: &[Poly]) -> Result<Vec<Poly>, BracketError> {
    let mut basis: Vec<Poly> = Vec::new();
    for g in gens.iter().filter(|g| !g.is_zero()) {
        if g.as_constant().is_some() {
            return Err(BracketError::TrivialIdeal);
        }
        basis.push(monic(g));
    }
    let mut pairs: VecDeque<(usize, usize)> = VecDeque::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pairs.push_back((i, j));
        }
    }
    while let Some((i, j)) = pairs.pop_front() {
        let (fm, _) = basis[i].leading_term().unwrap();
        let (gm, _) = basis[j].leading_term().unwrap();
        if fm.is_coprime(gm) {
            continue;
        }
        let s = s_polynomial(&basis[i], &basis[j]);
        let rules = RewriteRules::from_generators(nvars, &basis)?.rules;
        let r = reduce_with(&rules, &s, NORMAL_FORM_CAP)?;
        if r.is_zero() {
            continue;
        }
        if r.as_constant().is_some() {
            return Err(BracketError::TrivialIdeal);
        }
        basis.push(monic(&r));
        if basis.len() > RewriteRules::COMPLETION_LIMIT {
            return Err(BracketError::CompletionLimit {
                limit: RewriteRules::COMPLETION_LIMIT,
            });
        }
        let k = basis.len() - 1;
        for i in 0..k {
            pairs.push_back((i, k));
        }
    }

    // drop elements whose leading monomial is a multiple of another one
    let mut minimal: Vec<Poly> = Vec::new();
    for (i, g) in basis.iter().enumerate() {
        let gm = g.leading_term().unwrap().0;
        let redundant = basis.iter().enumerate().any(|(j, h)| {
            let hm = h.leading_term().unwrap().0;
            j != i && hm.divides(gm) && (hm != gm || j < i)
        });
        if !redundant {
            minimal.push(g.clone());
        }
    }

    let mut reduced = Vec::with_capacity(minimal.len());
    for (i, g) in minimal.iter().enumerate() {
        let others: Vec<Poly> = minimal
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, h)| h.clone())
            .collect();
        let rules = RewriteRules::from_generators(nvars, &others)?.rules;
        let (lm, lc) = g.leading_term().unwrap();
        let mut tail = g.clone();
        tail.add_term(lm.clone(), -lc.clone());
        let mut r = reduce_with(&rules, &tail, NORMAL_FORM_CAP)?;
        r.add_term(lm.clone(), lc.clone());
        reduced.push(monic(&r));
    }
    reduced.sort_by(|a, b| a.leading_term().unwrap().0.cmp(b.leading_term().unwrap().0));
    Ok(reduced)
}
