use std::collections::HashMap;
use std::fmt;

use super::ExprError;

/// Index of a symbol inside its [`SymbolTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sym(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    Coordinate,
    Multiplier,
    Velocity,
    Momentum,
    MultiplierMomentum,
    Parameter,
}

impl SymbolKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SymbolKind::Coordinate => "coordinate",
            SymbolKind::Multiplier => "multiplier",
            SymbolKind::Velocity => "velocity",
            SymbolKind::Momentum => "momentum",
            SymbolKind::MultiplierMomentum => "multiplier-momentum",
            SymbolKind::Parameter => "parameter",
        }
    }

    /// Coordinates and Lagrange multipliers both carry a canonical momentum.
    pub fn is_configuration(self) -> bool {
        matches!(self, SymbolKind::Coordinate | SymbolKind::Multiplier)
    }
}

impl fmt::Display for SymbolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolInfo {
    pub name: String,
    pub kind: SymbolKind,
    /// For velocities and momenta: the configuration symbol they belong to.
    pub of: Option<Sym>,
}

/// Ordered, immutable set of named symbols.
///
/// Declaration order fixes the monomial order used by every polynomial built
/// over the table. Tables produced by [`SymbolTableBuilder`] list the
/// configuration symbols first, then momenta, then velocities, then parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolTable {
    symbols: Vec<SymbolInfo>,
    index: HashMap<String, Sym>,
}

impl SymbolTable {
    pub fn builder() -> SymbolTableBuilder {
        SymbolTableBuilder::default()
    }

    /// Table of plain parameter symbols, handy for free-standing algebra.
    pub fn with_parameters<S: AsRef<str>>(names: &[S]) -> Result<Self, ExprError> {
        let mut b = Self::builder();
        for n in names {
            b = b.parameter(n.as_ref());
        }
        b.build()
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn lookup(&self, name: &str) -> Option<Sym> {
        self.index.get(name).copied()
    }

    pub fn sym(&self, name: &str) -> Result<Sym, ExprError> {
        self.lookup(name).ok_or_else(|| ExprError::UnknownSymbol {
            name: name.to_string(),
            pos: 0,
        })
    }

    pub fn info(&self, s: Sym) -> &SymbolInfo {
        &self.symbols[s.0]
    }

    pub fn name(&self, s: Sym) -> &str {
        &self.symbols[s.0].name
    }

    pub fn kind(&self, s: Sym) -> SymbolKind {
        self.symbols[s.0].kind
    }

    pub fn iter(&self) -> impl Iterator<Item = (Sym, &SymbolInfo)> {
        self.symbols.iter().enumerate().map(|(i, s)| (Sym(i), s))
    }

    pub fn of_kind(&self, kind: SymbolKind) -> Vec<Sym> {
        self.iter()
            .filter(|(_, s)| s.kind == kind)
            .map(|(i, _)| i)
            .collect()
    }

    fn partner(&self, q: Sym, pred: impl Fn(SymbolKind) -> bool) -> Option<Sym> {
        self.iter()
            .find(|(_, s)| s.of == Some(q) && pred(s.kind))
            .map(|(i, _)| i)
    }

    pub fn momentum_of(&self, q: Sym) -> Option<Sym> {
        self.partner(q, |k| {
            matches!(k, SymbolKind::Momentum | SymbolKind::MultiplierMomentum)
        })
    }

    pub fn velocity_of(&self, q: Sym) -> Option<Sym> {
        self.partner(q, |k| k == SymbolKind::Velocity)
    }

    /// `(q, p)` pairs for every coordinate and multiplier, in declaration order.
    pub fn canonical_pairs(&self) -> Vec<(Sym, Sym)> {
        self.iter()
            .filter(|(_, s)| s.kind.is_configuration())
            .filter_map(|(q, _)| self.momentum_of(q).map(|p| (q, p)))
            .collect()
    }
}

#[derive(Debug, Default)]
pub struct SymbolTableBuilder {
    config: Vec<(String, SymbolKind, String, String)>,
    params: Vec<String>,
}

impl SymbolTableBuilder {
    pub fn coordinate(mut self, name: &str, velocity: &str, momentum: &str) -> Self {
        self.config.push((
            name.into(),
            SymbolKind::Coordinate,
            velocity.into(),
            momentum.into(),
        ));
        self
    }

    pub fn multiplier(mut self, name: &str, velocity: &str, momentum: &str) -> Self {
        self.config.push((
            name.into(),
            SymbolKind::Multiplier,
            velocity.into(),
            momentum.into(),
        ));
        self
    }

    pub fn parameter(mut self, name: &str) -> Self {
        self.params.push(name.into());
        self
    }

    pub fn build(self) -> Result<SymbolTable, ExprError> {
        let mut symbols = Vec::new();
        for (name, kind, _, _) in &self.config {
            symbols.push(SymbolInfo {
                name: name.clone(),
                kind: *kind,
                of: None,
            });
        }
        for (i, (_, kind, _, momentum)) in self.config.iter().enumerate() {
            let mk = match kind {
                SymbolKind::Multiplier => SymbolKind::MultiplierMomentum,
                _ => SymbolKind::Momentum,
            };
            symbols.push(SymbolInfo {
                name: momentum.clone(),
                kind: mk,
                of: Some(Sym(i)),
            });
        }
        for (i, (_, _, velocity, _)) in self.config.iter().enumerate() {
            symbols.push(SymbolInfo {
                name: velocity.clone(),
                kind: SymbolKind::Velocity,
                of: Some(Sym(i)),
            });
        }
        for p in &self.params {
            symbols.push(SymbolInfo {
                name: p.clone(),
                kind: SymbolKind::Parameter,
                of: None,
            });
        }

        let mut index = HashMap::new();
        for (i, s) in symbols.iter().enumerate() {
            if !is_identifier(&s.name) {
                return Err(ExprError::InvalidSymbolName(s.name.clone()));
            }
            if index.insert(s.name.clone(), Sym(i)).is_some() {
                return Err(ExprError::DuplicateSymbol(s.name.clone()));
            }
        }
        Ok(SymbolTable { symbols, index })
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}
