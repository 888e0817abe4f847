//! JSON model files.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use dirac_core::dirac::{Defaults, Model};
use dirac_core::expr::{expr, Point, RationalExpr, SymbolTable};
use num_rational::BigRational;
use serde::Deserialize;

use crate::CliError;

/// Models shipped with the binary, addressable by name.
pub const BUNDLED: [(&str, &str); 3] = [
    ("circle", include_str!("../models/circle.json")),
    ("free", include_str!("../models/free.json")),
    ("pinned_line", include_str!("../models/pinned_line.json")),
];

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub name: String,
    pub symbols: Vec<SymbolDecl>,
    #[serde(default)]
    pub parameters: BTreeMap<String, String>,
    pub lagrangian: String,
    #[serde(default)]
    pub rewrite_rules: Vec<RuleDecl>,
    pub sample_points: Vec<BTreeMap<String, String>>,
    #[serde(default)]
    pub defaults: DefaultsDecl,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolDecl {
    pub name: String,
    pub kind: DeclKind,
    pub velocity: Option<String>,
    pub momentum: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeclKind {
    Coordinate,
    Multiplier,
    Parameter,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleDecl {
    pub target: String,
    pub replacement: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DefaultsDecl {
    pub h: f64,
    pub steps: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "gridN")]
    pub grid_n: usize,
}

impl Default for DefaultsDecl {
    fn default() -> Self {
        let d = Defaults::default();
        DefaultsDecl {
            h: d.h,
            steps: d.steps,
            n: d.n,
            grid_n: d.grid_n,
        }
    }
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    BigRational::from_str(s.trim()).ok()
}

impl ModelFile {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Validation(format!("model schema: {e}")))
    }

    pub fn into_model(self) -> Result<Model, CliError> {
        let invalid = |m: String| CliError::Validation(m);
        let mut b = SymbolTable::builder();
        for d in &self.symbols {
            let pair = || match (&d.velocity, &d.momentum) {
                (Some(v), Some(p)) => Ok((v.as_str(), p.as_str())),
                _ => Err(invalid(format!(
                    "symbol '{}' needs both a velocity and a momentum name",
                    d.name
                ))),
            };
            b = match d.kind {
                DeclKind::Coordinate => {
                    let (v, p) = pair()?;
                    b.coordinate(&d.name, v, p)
                }
                DeclKind::Multiplier => {
                    let (v, p) = pair()?;
                    b.multiplier(&d.name, v, p)
                }
                DeclKind::Parameter => {
                    if d.velocity.is_some() || d.momentum.is_some() {
                        return Err(invalid(format!(
                            "parameter '{}' cannot have a velocity or momentum",
                            d.name
                        )));
                    }
                    b.parameter(&d.name)
                }
            };
        }
        let table = b.build().map_err(|e| invalid(format!("symbols: {e}")))?;

        let mut parameters = BTreeMap::new();
        for (name, value) in &self.parameters {
            let s = table
                .sym(name)
                .map_err(|e| invalid(format!("parameters: {e}")))?;
            let v = parse_rational(value).ok_or_else(|| {
                invalid(format!("parameter '{name}': '{value}' is not a rational"))
            })?;
            parameters.insert(s, v);
        }

        let parse = |what: &str, text: &str| -> Result<RationalExpr, CliError> {
            expr(text, &table).map_err(|e| invalid(format!("{what}: {e}")))
        };
        let lagrangian = parse("lagrangian", &self.lagrangian)?;
        let mut rules = Vec::new();
        for (i, r) in self.rewrite_rules.iter().enumerate() {
            let t = parse(&format!("rewrite rule {i} target"), &r.target)?;
            let rep = parse(&format!("rewrite rule {i} replacement"), &r.replacement)?;
            rules.push(&t - &rep);
        }

        // parameters that sit in a denominator must not vanish
        for (s, v) in &parameters {
            if num_traits::Zero::is_zero(v) {
                let in_den = std::iter::once(&lagrangian)
                    .chain(&rules)
                    .any(|e| e.denominator().depends_on(*s));
                if in_den {
                    return Err(invalid(format!(
                        "parameter '{}' is zero but divides an expression",
                        table.name(*s)
                    )));
                }
            }
        }

        if self.sample_points.is_empty() {
            return Err(invalid("at least one sample point is required".into()));
        }
        let mut points = Vec::new();
        for (i, p) in self.sample_points.iter().enumerate() {
            let mut pt = Point::new();
            for (name, value) in p {
                let s = table
                    .sym(name)
                    .map_err(|e| invalid(format!("sample point {i}: {e}")))?;
                let v = parse_rational(value).ok_or_else(|| {
                    invalid(format!("sample point {i}: '{value}' is not a rational"))
                })?;
                pt.insert(s, v);
            }
            points.push(pt);
        }

        let d = &self.defaults;
        if !(d.h.is_finite() && d.h > 0.0) {
            return Err(invalid(format!(
                "defaults: h must be positive, got {}",
                d.h
            )));
        }
        let defaults = Defaults {
            h: d.h,
            steps: d.steps,
            n: d.n,
            grid_n: d.grid_n,
        };
        Model::new(
            self.name, table, lagrangian, parameters, rules, points, defaults,
        )
        .map_err(|e| invalid(e.to_string()))
    }
}

/// Reads a model from `path`; a bare bundled name such as `circle` or
/// `circle.json` falls back to the copy compiled into the binary.
pub fn load_model(path: &Path) -> Result<Model, CliError> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            let stem = path.to_str().map(|s| s.trim_end_matches(".json"));
            match BUNDLED.iter().find(|(name, _)| Some(*name) == stem) {
                Some((_, text)) => text.to_string(),
                None => {
                    return Err(CliError::Validation(format!(
                        "cannot read {}: {e}",
                        path.display()
                    )))
                }
            }
        }
    };
    ModelFile::from_json(&text)?.into_model()
}
