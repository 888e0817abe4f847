#![allow(dead_code)]

use std::collections::BTreeMap;

use dirac_core::dirac::{Defaults, Model};
use dirac_core::expr::{expr, Point, RationalExpr, SymbolTable};
use num_rational::BigRational;

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn planar_table() -> SymbolTable {
    SymbolTable::builder()
        .coordinate("x", "xdot", "px")
        .coordinate("y", "ydot", "py")
        .multiplier("lambda", "lambdadot", "plambda")
        .parameter("r0")
        .build()
        .unwrap()
}

pub fn e(t: &SymbolTable, s: &str) -> RationalExpr {
    expr(s, t).unwrap()
}

pub fn point(t: &SymbolTable, vals: &[(&str, BigRational)]) -> Point {
    vals.iter()
        .map(|(n, v)| (t.sym(n).unwrap(), v.clone()))
        .collect()
}

/// Two coordinates and a parameter, no multiplier.
pub fn free_table() -> SymbolTable {
    SymbolTable::builder()
        .coordinate("x", "xdot", "px")
        .coordinate("y", "ydot", "py")
        .parameter("r0")
        .build()
        .unwrap()
}

fn model_in(
    t: SymbolTable,
    name: &str,
    lagrangian: &str,
    rules: &[&str],
    points: Vec<Vec<(&str, BigRational)>>,
) -> Model {
    let params: BTreeMap<_, _> = [(t.sym("r0").unwrap(), q(1, 1))].into_iter().collect();
    let rules = rules.iter().map(|r| e(&t, r)).collect();
    let pts = points.iter().map(|p| point(&t, p)).collect();
    Model::new(
        name,
        t.clone(),
        e(&t, lagrangian),
        params,
        rules,
        pts,
        Defaults::default(),
    )
    .unwrap()
}

/// On-surface points of the circle model for r0 = 1.
pub fn circle_points() -> Vec<Vec<(&'static str, BigRational)>> {
    vec![
        vec![
            ("x", q(1, 1)),
            ("y", q(0, 1)),
            ("px", q(0, 1)),
            ("py", q(1, 1)),
            ("lambda", q(1, 2)),
            ("plambda", q(0, 1)),
        ],
        vec![
            ("x", q(3, 5)),
            ("y", q(4, 5)),
            ("px", q(-8, 5)),
            ("py", q(6, 5)),
            ("lambda", q(2, 1)),
            ("plambda", q(0, 1)),
        ],
        vec![
            ("x", q(-5, 13)),
            ("y", q(12, 13)),
            ("px", q(-12, 13)),
            ("py", q(-5, 13)),
            ("lambda", q(1, 2)),
            ("plambda", q(0, 1)),
        ],
    ]
}

fn model(
    name: &str,
    lagrangian: &str,
    rules: &[&str],
    points: Vec<Vec<(&str, BigRational)>>,
) -> Model {
    model_in(planar_table(), name, lagrangian, rules, points)
}

pub fn circle() -> Model {
    model(
        "circle",
        "1/2*(xdot^2 + ydot^2) - lambda*(x^2 + y^2 - r0^2)",
        &["x^2 + y^2 - r0^2", "plambda"],
        circle_points(),
    )
}

pub fn pinned_line() -> Model {
    model(
        "pinned-line",
        "1/2*(xdot^2 + ydot^2) - lambda*x",
        &[],
        vec![vec![
            ("x", q(0, 1)),
            ("y", q(1, 2)),
            ("px", q(0, 1)),
            ("py", q(3, 1)),
            ("lambda", q(0, 1)),
            ("plambda", q(0, 1)),
        ]],
    )
}

pub fn lagrangian_model(lagrangian: &str) -> Model {
    model("test", lagrangian, &[], vec![])
}

pub fn free_model(lagrangian: &str) -> Model {
    model_in(free_table(), "free", lagrangian, &[], vec![])
}
