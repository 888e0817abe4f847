use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;

use super::DiracError;
use crate::expr::{Point, RationalExpr, Sym, SymbolKind, SymbolTable};

/// Step sizes and resolutions used when a command does not override them.
#[derive(Debug, Clone, PartialEq)]
pub struct Defaults {
    pub h: f64,
    pub steps: usize,
    pub n: usize,
    pub grid_n: usize,
}

impl Default for Defaults {
    fn default() -> Self {
        Defaults {
            h: 1e-3,
            steps: 10_000,
            n: 32,
            grid_n: 128,
        }
    }
}

/// A mechanical system given by a Lagrangian in coordinates, multipliers and velocities.
#[derive(Debug, Clone)]
pub struct Model {
    name: String,
    symbols: SymbolTable,
    lagrangian: RationalExpr,
    parameters: BTreeMap<Sym, BigRational>,
    rules: Vec<RationalExpr>,
    sample_points: Vec<Point>,
    defaults: Defaults,
}

impl Model {
    /// `rules` are declared as generators `target - replacement`. Sample points are
    /// completed with the parameter values and must bind every non-velocity symbol
    /// and satisfy every declared rule exactly.
    pub fn new(
        name: impl Into<String>,
        symbols: SymbolTable,
        lagrangian: RationalExpr,
        parameters: BTreeMap<Sym, BigRational>,
        rules: Vec<RationalExpr>,
        sample_points: Vec<Point>,
        defaults: Defaults,
    ) -> Result<Self, DiracError> {
        for s in lagrangian.symbols() {
            if matches!(
                symbols.kind(s),
                SymbolKind::Momentum | SymbolKind::MultiplierMomentum
            ) {
                return Err(DiracError::InvalidModel(format!(
                    "lagrangian depends on momentum '{}'",
                    symbols.name(s)
                )));
            }
        }
        for (&s, _) in &parameters {
            if symbols.kind(s) != SymbolKind::Parameter {
                return Err(DiracError::InvalidModel(format!(
                    "'{}' is not a parameter",
                    symbols.name(s)
                )));
            }
        }
        for s in symbols.of_kind(SymbolKind::Parameter) {
            if !parameters.contains_key(&s) {
                return Err(DiracError::InvalidModel(format!(
                    "parameter '{}' has no value",
                    symbols.name(s)
                )));
            }
        }
        for r in &rules {
            if let Some(s) = r
                .symbols()
                .into_iter()
                .find(|&s| symbols.kind(s) == SymbolKind::Velocity)
            {
                return Err(DiracError::InvalidModel(format!(
                    "rule mentions velocity '{}'",
                    symbols.name(s)
                )));
            }
        }

        let mut points = Vec::with_capacity(sample_points.len());
        for (i, mut pt) in sample_points.into_iter().enumerate() {
            for (&s, v) in &parameters {
                pt.entry(s).or_insert_with(|| v.clone());
            }
            for (s, info) in symbols.iter() {
                if info.kind != SymbolKind::Velocity && !pt.contains_key(&s) {
                    return Err(DiracError::InvalidModel(format!(
                        "sample point {i} does not bind '{}'",
                        info.name
                    )));
                }
            }
            for (k, r) in rules.iter().enumerate() {
                let v = r.evaluate(&pt)?;
                if !v.is_zero() {
                    return Err(DiracError::InvalidModel(format!(
                        "sample point {i} is off the surface: rule {k} ({} = 0) evaluates to {v}",
                        r.to_text(&symbols)
                    )));
                }
            }
            points.push(pt);
        }

        Ok(Model {
            name: name.into(),
            symbols,
            lagrangian,
            parameters,
            rules,
            sample_points: points,
            defaults,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn symbols(&self) -> &SymbolTable {
        &self.symbols
    }

    pub fn lagrangian(&self) -> &RationalExpr {
        &self.lagrangian
    }

    pub fn parameters(&self) -> &BTreeMap<Sym, BigRational> {
        &self.parameters
    }

    pub fn rules(&self) -> &[RationalExpr] {
        &self.rules
    }

    pub fn sample_points(&self) -> &[Point] {
        &self.sample_points
    }

    pub fn defaults(&self) -> &Defaults {
        &self.defaults
    }

    pub fn multipliers(&self) -> Vec<Sym> {
        self.symbols.of_kind(SymbolKind::Multiplier)
    }
}
