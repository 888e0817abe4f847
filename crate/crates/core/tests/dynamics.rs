mod common;

use common::*;
use dirac_core::dirac::consistency_chain;
use dirac_core::dynamics::{
    compare, exact_circle, generate_eom, integrate_project, integrate_rk4, observed_orders,
    DynamicsError, EomSystem,
};

fn circle_eom() -> EomSystem {
    let m = circle();
    let s = consistency_chain(&m).unwrap();
    generate_eom(&s, m.parameters()).unwrap()
}

const START: [f64; 4] = [1.0, 0.0, 0.0, 1.0];

#[test]
fn circle_equations() {
    let m = circle();
    let t = m.symbols();
    let s = consistency_chain(&m).unwrap();
    let sys = generate_eom(&s, m.parameters()).unwrap();
    assert_eq!(sys.state_names(), ["x", "y", "px", "py"]);
    assert_eq!(sys.diagnostic_names(), ["phi2", "phi3", "H", "Lz"]);
    let xdot = &sys.derivative_exprs()[0];
    assert!(s
        .rules()
        .equivalent(xdot, &e(t, "px - x*(x*px+y*py)/r0^2"))
        .unwrap());
    assert!(s.rules().equivalent(xdot, &e(t, "px")).unwrap());
    for d in sys.derivative_exprs() {
        assert!(!d.depends_on(t.sym("lambda").unwrap()));
    }
    let mut out = [0.0; 4];
    sys.derivative(&START, &mut out);
    assert_eq!(out, [0.0, 1.0, -1.0, 0.0]);
    sys.derivative(&[0.6, 0.8, -1.6, 1.2], &mut out);
    let want = [-1.6, 1.2, -0.6 * 4.0, -0.8 * 4.0];
    for (a, b) in out.iter().zip(want) {
        assert!((a - b).abs() < 1e-14);
    }
}

#[test]
fn free_particle_equations() {
    let m = free_model("1/2*(xdot^2 + ydot^2)");
    let s = consistency_chain(&m).unwrap();
    let sys = generate_eom(&s, m.parameters()).unwrap();
    assert_eq!(sys.diagnostic_names(), ["H", "Lz"]);
    let mut out = [0.0; 4];
    sys.derivative(&[0.3, -1.0, 2.0, 5.0], &mut out);
    assert_eq!(out, [2.0, 5.0, 0.0, 0.0]);
    let tr = integrate_rk4(&sys, &[0.0, 0.0, 1.0, 0.0], 0.01, 100).unwrap();
    for (k, st) in tr.states.iter().enumerate() {
        assert!((st[0] - tr.time(k)).abs() < 1e-13);
    }
}

#[test]
fn rk4_quarter_turn_and_rest() {
    let sys = circle_eom();
    let tr = integrate_rk4(&sys, &START, 1e-3, 1000).unwrap();
    assert!((tr.last()[0] - 1f64.cos()).abs() < 1e-9);
    assert!((tr.last()[1] - 1f64.sin()).abs() < 1e-9);
    let rest = integrate_rk4(&sys, &[1.0, 0.0, 0.0, 0.0], 1e-2, 50).unwrap();
    assert!(rest.states.iter().all(|s| s == &[1.0, 0.0, 0.0, 0.0]));
}

#[test]
fn rk4_conservation_over_ten_units() {
    let sys = circle_eom();
    let tr = integrate_rk4(&sys, &START, 1e-3, 10_000).unwrap();
    assert!(tr.constraint_drift() <= 1e-8);
    assert!(tr.relative_drift("H").unwrap() <= 1e-8);
    assert!(tr.relative_drift("Lz").unwrap() <= 1e-8);
    let ex = exact_circle(&sys, 1.0, &START, 1e-3, 10_000).unwrap();
    assert!(compare(&tr, &ex).unwrap().max_state_error <= 1e-7);
}

#[test]
fn rk4_convergence_order() {
    let sys = circle_eom();
    let mut runs = Vec::new();
    for k in 0..4 {
        let h = 0.2 / f64::from(1 << k);
        let steps = (10.0 / h).round() as usize;
        let a = integrate_rk4(&sys, &START, h, steps).unwrap();
        let b = exact_circle(&sys, 1.0, &START, h, steps).unwrap();
        runs.push((h, compare(&a, &b).unwrap().max_state_error));
    }
    for w in runs.windows(2) {
        assert!(w[1].1 < w[0].1);
    }
    for p in observed_orders(&runs) {
        assert!((p - 4.0).abs() <= 0.5, "order {p}");
    }
}

#[test]
fn projection_integrator() {
    let sys = circle_eom();
    let mut runs = Vec::new();
    for k in 0..4 {
        let h = 0.02 / f64::from(1 << k);
        let steps = (1.0 / h).round() as usize;
        let a = integrate_project(&sys, 1.0, &START, h, steps).unwrap();
        for d in &a.diagnostics {
            assert!(d[0].abs() <= 4.0 * f64::EPSILON, "phi2 {}", d[0]);
            assert!(d[1].abs() <= 4.0 * f64::EPSILON, "phi3 {}", d[1]);
        }
        let b = exact_circle(&sys, 1.0, &START, h, steps).unwrap();
        runs.push((h, compare(&a, &b).unwrap().max_state_error));
    }
    for w in runs.windows(2) {
        assert!(w[1].1 < w[0].1);
    }
    for p in observed_orders(&runs) {
        assert!(p >= 0.9, "order {p}");
    }
    let id = integrate_project(&sys, 1.0, &START, 0.0, 5).unwrap();
    assert!(id.states.iter().all(|s| s == &START));
    assert!(integrate_project(&sys, 1.0, &[0.0; 4], 1e-3, 5).is_err());
}

#[test]
fn exact_solution() {
    let sys = circle_eom();
    let q = exact_circle(&sys, 1.0, &START, std::f64::consts::FRAC_PI_2, 1).unwrap();
    let want = [0.0, 1.0, -1.0, 0.0];
    for (a, b) in q.last().iter().zip(want) {
        assert!((a - b).abs() < 1e-15);
    }
    let still = exact_circle(&sys, 1.0, &[0.6, 0.8, 0.0, 0.0], 0.1, 10).unwrap();
    assert!(still.states.iter().all(|s| s == &[0.6, 0.8, 0.0, 0.0]));
    let zero = exact_circle(&sys, 1.0, &START, 0.0, 3).unwrap();
    assert!(zero.states.iter().all(|s| s == &START));
    assert!(matches!(
        exact_circle(&sys, 1.0, &[2.0, 0.0, 0.0, 1.0], 0.1, 1),
        Err(DynamicsError::OffSurface { .. })
    ));
}

#[test]
fn three_methods_agree_as_h_shrinks() {
    let sys = circle_eom();
    let mut rk_vs_proj = Vec::new();
    for k in 0..4 {
        let h = 0.05 / f64::from(1 << k);
        let steps = (2.0 / h).round() as usize;
        let a = integrate_rk4(&sys, &START, h, steps).unwrap();
        let b = integrate_project(&sys, 1.0, &START, h, steps).unwrap();
        rk_vs_proj.push(compare(&a, &b).unwrap().max_state_error);
    }
    assert!(rk_vs_proj.windows(2).all(|w| w[1] < w[0]), "{rk_vs_proj:?}");
}

#[test]
fn time_reversal() {
    let sys = circle_eom();
    let fwd = integrate_rk4(&sys, &START, 1e-3, 3000).unwrap();
    let mut mid = fwd.last().to_vec();
    mid[2] = -mid[2];
    mid[3] = -mid[3];
    let back = integrate_rk4(&sys, &mid, 1e-3, 3000).unwrap();
    let end = back.last();
    let got = [end[0], end[1], -end[2], -end[3]];
    for (a, b) in got.iter().zip(START) {
        assert!((a - b).abs() < 1e-7);
    }
}

#[test]
fn rejects_bad_input() {
    let sys = circle_eom();
    assert!(matches!(
        integrate_rk4(&sys, &START, 0.0, 1),
        Err(DynamicsError::InvalidStep(_))
    ));
    assert!(matches!(
        integrate_rk4(&sys, &START, f64::NAN, 1),
        Err(DynamicsError::InvalidStep(_))
    ));
    assert!(matches!(
        integrate_rk4(&sys, &[1.0, 0.0, 0.0], 0.1, 1),
        Err(DynamicsError::StateLength { .. })
    ));
    assert!(matches!(
        integrate_rk4(&sys, &[1.0, 1e-5, 0.0, 1.0], 0.1, 1),
        Err(DynamicsError::OffSurface { .. })
    ));
    assert!(matches!(
        integrate_rk4(&sys, &[1.0, 0.0, 1e-9, 1.0], 0.1, 1),
        Err(DynamicsError::OffSurface { .. })
    ));
    assert!(matches!(
        integrate_rk4(&sys, &[f64::INFINITY, 0.0, 0.0, 1.0], 0.1, 1),
        Err(DynamicsError::NonFinite { .. })
    ));
    let a = integrate_rk4(&sys, &START, 0.1, 3).unwrap();
    let b = integrate_rk4(&sys, &START, 0.1, 4).unwrap();
    assert!(matches!(compare(&a, &b), Err(DynamicsError::GridMismatch)));
    let m = compare(&a, &a).unwrap();
    assert_eq!(m.max_state_error, 0.0);
}

#[test]
fn csv_layout() {
    let sys = circle_eom();
    let tr = integrate_rk4(&sys, &START, 0.5, 2).unwrap();
    let mut buf = Vec::new();
    tr.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "t,x,y,px,py,phi2,phi3,H,Lz");
    assert_eq!(lines.len(), 4);
    let row: Vec<f64> = lines[2].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(row.len(), 9);
    assert_eq!(row[0], 0.5);
    assert_eq!(&row[1..5], tr.states[1].as_slice());
    assert!(lines[1].starts_with("0.0000000000000000e0,1.0000000000000000e0"));
}
