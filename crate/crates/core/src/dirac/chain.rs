use num_traits::{One, Signed};

use super::{
    legendre_analyze, Classification, Constraint, ConstraintClass, DiracError, DiracStructure,
    Model, MultiplierSolution,
};
use crate::brackets::{
    bracket_matrix, invert_matrix, poisson_bracket, rank_at_points, BracketError, PhaseSpace,
    RewriteRules,
};
use crate::expr::{Poly, RationalExpr};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainOptions {
    pub max_generations: usize,
}

impl Default for ChainOptions {
    fn default() -> Self {
        ChainOptions {
            max_generations: 10,
        }
    }
}

pub fn consistency_chain(model: &Model) -> Result<DiracStructure, DiracError> {
    consistency_chain_with(model, ChainOptions::default())
}

/// One consistency condition `a + sum_j c_j u_j ~ 0`.
#[derive(Debug, Clone)]
struct Row {
    a: RationalExpr,
    c: Vec<RationalExpr>,
}

pub fn consistency_chain_with(
    model: &Model,
    opts: ChainOptions,
) -> Result<DiracStructure, DiracError> {
    let (h, primaries) = legendre_analyze(model)?;
    let t = model.symbols();
    let nvars = t.len();
    let space = PhaseSpace::new(t);
    let prim: Vec<RationalExpr> = primaries.iter().map(|c| c.expression.clone()).collect();

    let mut constraints = primaries;
    let mut rows: Vec<Row> = Vec::new();
    let mut frontier: Vec<usize> = (0..constraints.len()).collect();
    let mut generation = 0;

    while !frontier.is_empty() {
        if generation >= opts.max_generations {
            return Err(DiracError::GenerationCap {
                cap: opts.max_generations,
            });
        }
        for &i in &frontier {
            let phi = &constraints[i].expression;
            rows.push(Row {
                a: poisson_bracket(&space, phi, &h),
                c: prim
                    .iter()
                    .map(|pj| poisson_bracket(&space, phi, pj))
                    .collect(),
            });
        }

        let mut rules = completed(nvars, &constraints, &[], generation)?;
        let (_, residual) = eliminate(&rows, prim.len(), &rules)?;
        let mut found = Vec::new();
        for a in residual {
            let reduced = rules.reduce_poly(a.numerator())?;
            if reduced.is_zero() {
                continue;
            }
            if reduced.as_constant().is_some() {
                return Err(DiracError::Inconsistent {
                    generation,
                    expression: a.to_text(t),
                });
            }
            let candidate = normalize(a.numerator());
            if constraints
                .iter()
                .any(|c| c.expression.scale_factor_to(&candidate).is_some())
            {
                continue;
            }
            constraints.push(Constraint::secondary(candidate, generation + 1));
            found.push(constraints.len() - 1);
            rules = completed(nvars, &constraints, &[], generation)?;
        }
        frontier = found;
        generation += 1;
    }

    let chain_rules = completed(nvars, &constraints, &[], generation)?;
    let (pivots, _) = eliminate(&rows, prim.len(), &chain_rules)?;
    let mut multipliers = Vec::with_capacity(prim.len());
    for (j, pivot) in pivots.iter().enumerate() {
        let (value, vanishes) = match pivot {
            Some(row) => {
                let u = (-&row.a).try_div(&row.c[j])?;
                let z = chain_rules.is_zero_mod(&u)?;
                (Some(u), z)
            }
            None => (None, false),
        };
        multipliers.push(MultiplierSolution {
            constraint: j,
            value,
            vanishes_on_surface: vanishes,
        });
    }

    let declared: Vec<Poly> = model
        .rules()
        .iter()
        .map(|r| r.numerator().clone())
        .collect();
    let rules = completed(nvars, &constraints, &declared, generation)?;

    let mut structure = DiracStructure {
        symbols: t.clone(),
        space,
        hamiltonian: h,
        constraints,
        multipliers,
        m: None,
        g: None,
        rules,
        classification: Classification::Unconstrained,
        rank: None,
        generations: generation,
    };
    classify(&mut structure, model)?;
    Ok(structure)
}

fn classify(s: &mut DiracStructure, model: &Model) -> Result<(), DiracError> {
    if s.constraints.is_empty() {
        return Ok(());
    }
    let exprs = s.constraint_exprs();
    let m = bracket_matrix(&s.space, &exprs)?;
    if !model.sample_points().is_empty() {
        s.rank = rank_at_points(&m, &exprs, model.sample_points())?
            .into_iter()
            .max();
    }
    let first = m.zero_rows(&s.rules)?;
    let g = if first.is_empty() {
        match invert_matrix(&m, &s.rules) {
            Ok(g) => Some(g.reduce(&s.rules)?),
            Err(BracketError::Singular { .. }) => None,
            Err(e) => return Err(e.into()),
        }
    } else {
        None
    };
    match g {
        Some(g) => {
            for c in &mut s.constraints {
                c.class = ConstraintClass::Second;
            }
            s.g = Some(g);
            s.classification = Classification::AllSecondClass;
        }
        None => {
            for &i in &first {
                s.constraints[i].class = ConstraintClass::First;
            }
            s.classification = Classification::FirstClassPresent {
                first,
                rank: s.rank,
            };
        }
    }
    s.m = Some(m);
    Ok(())
}

fn completed(
    nvars: usize,
    constraints: &[Constraint],
    extra: &[Poly],
    generation: usize,
) -> Result<RewriteRules, DiracError> {
    let gens: Vec<Poly> = constraints
        .iter()
        .map(|c| c.expression.numerator().clone())
        .chain(extra.iter().cloned())
        .collect();
    RewriteRules::completed(nvars, &gens).map_err(|e| match e {
        BracketError::TrivialIdeal => DiracError::Inconsistent {
            generation,
            expression: "1".into(),
        },
        other => other.into(),
    })
}

/// Integer content removed, leading coefficient positive.
fn normalize(p: &Poly) -> RationalExpr {
    let g = p.numerator_gcd();
    let l = p.denominator_lcm();
    let mut f = num_rational::BigRational::new(l, g);
    if p.leading_coefficient().is_some_and(|c| c.is_negative()) {
        f = -f;
    }
    if f.is_one() {
        RationalExpr::from_poly(p.clone())
    } else {
        RationalExpr::from_poly(p.scale(&f))
    }
}

/// Gauss-Jordan elimination over the multiplier coefficients, testing for zero
/// modulo `rules`. Returns the pivot row of each column and the constant parts
/// of the rows left without multipliers.
fn eliminate(
    rows: &[Row],
    ncols: usize,
    rules: &RewriteRules,
) -> Result<(Vec<Option<Row>>, Vec<RationalExpr>), DiracError> {
    let mut rows = rows.to_vec();
    let mut used = vec![false; rows.len()];
    let mut pivot_of = vec![None; ncols];
    for col in 0..ncols {
        let mut best: Option<(usize, usize)> = None;
        for (r, row) in rows.iter().enumerate() {
            if used[r] || rules.is_zero_mod(&row.c[col])? {
                continue;
            }
            let size = row.c[col].size();
            if best.map_or(true, |(_, s)| size < s) {
                best = Some((r, size));
            }
        }
        let Some((p, _)) = best else { continue };
        used[p] = true;
        pivot_of[col] = Some(p);
        let pivot = rows[p].clone();
        for (k, row) in rows.iter_mut().enumerate() {
            if k == p || rules.is_zero_mod(&row.c[col])? {
                continue;
            }
            let f = row.c[col].try_div(&pivot.c[col])?;
            row.a = &row.a - &(&f * &pivot.a);
            for m in 0..ncols {
                row.c[m] = if m == col {
                    RationalExpr::zero(row.a.nvars())
                } else {
                    &row.c[m] - &(&f * &pivot.c[m])
                };
            }
        }
    }
    let pivots = pivot_of
        .into_iter()
        .map(|p| p.map(|r: usize| rows[r].clone()))
        .collect();
    let residual = rows
        .into_iter()
        .zip(used)
        .filter(|(_, u)| !u)
        .map(|(r, _)| r.a)
        .collect();
    Ok((pivots, residual))
}
