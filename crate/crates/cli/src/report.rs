//! Deterministic JSON reports. Objects use sorted keys; exact values are
//! written as canonical expression text or `"p/q"` strings.

use dirac_core::brackets::RationalMatrix;
use dirac_core::dirac::{
    dirac_bracket, reduced_hamiltonian, verify_strong_zero, Classification, DiracError,
    DiracStructure, Model, Origin,
};
use dirac_core::expr::{Poly, RationalExpr, SymbolTable};
use dirac_core::quantum::{OrderingReport, ResidualReport, RingParams, SpectrumResult};
use num_traits::One;
use serde_json::{json, Map, Value};

fn matrix(m: &RationalMatrix, t: &SymbolTable) -> Value {
    Value::Array(
        m.rows()
            .map(|r| Value::Array(r.iter().map(|e| Value::String(e.to_text(t))).collect()))
            .collect(),
    )
}

fn constraint_name(i: usize) -> String {
    format!("phi{}", i + 1)
}

/// Full report of the constraint analysis. The bracket table is `null` when
/// first-class constraints leave the Dirac bracket undefined.
pub fn analysis(model: &Model, s: &DiracStructure) -> Result<Value, DiracError> {
    let t = s.symbols();
    let text = |e: &RationalExpr| Value::String(e.to_text(t));

    let parameters: Map<String, Value> = model
        .parameters()
        .iter()
        .map(|(k, v)| (t.name(*k).to_string(), Value::String(v.to_string())))
        .collect();

    let constraints: Vec<Value> = s
        .constraints()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            json!({
                "name": constraint_name(i),
                "expression": text(&c.expression),
                "origin": match c.origin { Origin::Primary => "primary", Origin::Secondary => "secondary" },
                "generation": c.generation,
                "class": c.class.as_str(),
            })
        })
        .collect();

    let multipliers: Vec<Value> = s
        .multipliers()
        .iter()
        .enumerate()
        .map(|(j, u)| {
            json!({
                "name": format!("u{}", j + 1),
                "constraint": constraint_name(u.constraint),
                "value": u.value.as_ref().map(text),
                "vanishes_on_surface": u.vanishes_on_surface,
            })
        })
        .collect();

    let rules: Vec<Value> = s
        .rules()
        .rules()
        .iter()
        .map(|r| {
            json!({
                "target": RationalExpr::from_poly(Poly::term(r.target().clone(), One::one())).to_text(t),
                "replacement": RationalExpr::from_poly(r.replacement().clone()).to_text(t),
            })
        })
        .collect();

    let classification = match s.classification() {
        Classification::Unconstrained => {
            json!({ "kind": "unconstrained", "first_class": [], "rank": s.rank() })
        }
        Classification::AllSecondClass => {
            json!({ "kind": "all-second-class", "first_class": [], "rank": s.rank() })
        }
        Classification::FirstClassPresent { first, rank } => json!({
            "kind": "first-class-present",
            "first_class": first.iter().map(|&i| constraint_name(i)).collect::<Vec<_>>(),
            "rank": rank,
        }),
    };

    let vars = s.phase_space().variables();
    let bracket_ok = !matches!(s.classification(), Classification::FirstClassPresent { .. });
    let (table, strong_zero) = if bracket_ok {
        let mut table = Vec::new();
        for (i, &a) in vars.iter().enumerate() {
            for &b in &vars[i + 1..] {
                let (ea, eb) = (
                    RationalExpr::symbol(t.len(), a),
                    RationalExpr::symbol(t.len(), b),
                );
                let v = dirac_bracket(&ea, &eb, s)?;
                table.push(json!({ "a": t.name(a), "b": t.name(b), "value": text(&v) }));
            }
        }
        let mut quantities: Vec<RationalExpr> = vars
            .iter()
            .map(|&v| RationalExpr::symbol(t.len(), v))
            .collect();
        quantities.push(s.hamiltonian().clone());
        let names: Vec<String> = vars
            .iter()
            .map(|&v| t.name(v).to_string())
            .chain(["H".to_string()])
            .collect();
        let r = verify_strong_zero(s, &quantities)?;
        let violations: Vec<Value> = r
            .violations
            .iter()
            .map(|v| json!({ "quantity": names[v.quantity], "constraint": constraint_name(v.constraint), "value": text(&v.value) }))
            .collect();
        let sz = json!({
            "quantities": names,
            "checked": r.checked,
            "passed": r.passed(),
            "violations": violations,
        });
        (Value::Array(table), sz)
    } else {
        (Value::Null, Value::Null)
    };

    Ok(json!({
        "model": model.name(),
        "symbols": t.iter().map(|(_, info)| json!({ "name": info.name, "kind": info.kind.as_str() })).collect::<Vec<_>>(),
        "parameters": parameters,
        "lagrangian": text(model.lagrangian()),
        "hamiltonian": text(s.hamiltonian()),
        "total_hamiltonian": s.total_hamiltonian_text(),
        "reduced_hamiltonian": text(&reduced_hamiltonian(s)?),
        "constraints": constraints,
        "generations": s.generations(),
        "multipliers": multipliers,
        "rules": rules,
        "classification": classification,
        "M": s.m().map(|m| matrix(m, t)),
        "G": s.g().map(|g| matrix(g, t)),
        "bracket_table": table,
        "strong_zero": strong_zero,
    }))
}

pub fn params(p: &RingParams) -> Value {
    json!({ "r0": p.r0, "m": p.m, "hbar": p.hbar, "alpha": p.alpha, "beta": p.beta })
}

pub fn spectrum(
    p: &RingParams,
    r: &SpectrumResult,
    include_e0: bool,
    grid_n: Option<usize>,
) -> Value {
    let mut v = json!({
        "params": params(p),
        "method": r.method.as_str(),
        "levels": r.energies(),
        "e0": p.e0(),
        "e0_included": include_e0,
    });
    if r.levels.iter().all(|l| l.n.is_some()) {
        v["modes"] = json!(r.levels.iter().map(|l| l.n).collect::<Vec<_>>());
    }
    if let Some(g) = grid_n {
        v["gridN"] = json!(g);
    }
    v
}

pub fn operators(p: &RingParams, r: &ResidualReport, o: &OrderingReport) -> Value {
    let named = |xs: &[(String, f64)]| -> Map<String, Value> {
        xs.iter().map(|(k, v)| (k.clone(), json!(v))).collect()
    };
    json!({
        "params": params(p),
        "N": r.truncation,
        "hermiticity": named(&r.hermiticity),
        "relations": named(&r.relations),
        "max_hermiticity": r.max_hermiticity(),
        "max_relation": r.max_relation(),
        "phi3w": r.phi3w,
        "orderings": o
            .orderings
            .iter()
            .map(|(name, px, py)| json!({ "ordering": name, "px_defect": px, "py_defect": py }))
            .collect::<Vec<_>>(),
    })
}

/// Pretty-printed with a trailing newline.
pub fn to_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values always serialize");
    s.push('\n');
    s
}
