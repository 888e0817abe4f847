use dirac_core::quantum::*;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::Zero;

fn unit(alpha: f64, beta: f64) -> RingParams {
    RingParams::unit(alpha, beta).unwrap()
}

#[test]
fn params_validation() {
    assert!(RingParams::new(0.0, 1.0, 1.0, 0.0, 0.0).is_err());
    assert!(RingParams::new(1.0, -1.0, 1.0, 0.0, 0.0).is_err());
    assert!(RingParams::new(1.0, 1.0, f64::NAN, 0.0, 0.0).is_err());
    assert!(RingParams::new(1.0, 1.0, 1.0, f64::INFINITY, 0.0).is_err());
    let p = RingParams::new(1.0, 1.0, 1.0, -0.25, 1.75).unwrap();
    assert_eq!(p.beta, 0.75);
    assert_eq!(p.alpha_bar(), 0.75);
    assert_eq!(p.e0(), 0.125);
}

#[test]
fn analytic_levels() {
    assert_eq!(
        analytic_spectrum(&unit(0.0, 0.0), 5).energies(),
        vec![0.125, 0.625, 0.625, 2.125, 2.125]
    );
    let half = analytic_spectrum(&unit(0.5, 0.0), 4).energies();
    assert_eq!(half, vec![0.25, 0.25, 1.25, 1.25]);
    let p = RingParams::new(2.0, 3.0, 0.5, 0.0, 0.0).unwrap();
    let e = analytic_spectrum(&p, 3).energies();
    let scale = 0.25 / (2.0 * 3.0 * 4.0);
    for (a, b) in e.iter().zip([scale / 4.0, scale * 1.25, scale * 1.25]) {
        assert!((a - b).abs() <= 4.0 * f64::EPSILON * b);
    }
}

#[test]
fn analytic_depends_only_on_beta_minus_alpha() {
    let base = analytic_spectrum(&unit(0.0, 0.0), 7).energies();
    assert_eq!(analytic_spectrum(&unit(0.3, 0.3), 7).energies(), base);
    for k in 0..16 {
        let c = k as f64 / 64.0 * 7.0 - 1.5;
        let (a, b) = (0.15625, 0.40625);
        assert_eq!(
            analytic_spectrum(&unit(a + c, b + c), 7).energies(),
            analytic_spectrum(&unit(a, b), 7).energies()
        );
    }
    // dyadic alphas keep alpha + 1 exact in binary
    for a in [0.0, 0.125, 0.375, 0.5, 0.90625] {
        assert_eq!(
            analytic_spectrum(&unit(a + 1.0, 0.2), 9).energies(),
            analytic_spectrum(&unit(a, 0.2), 9).energies()
        );
    }
}

#[test]
fn e0_shift_is_exact() {
    for (a, b) in [(0.0, 0.0), (0.3, 0.1), (0.75, 0.5), (-2.2, 0.9)] {
        let p = unit(a, b);
        let with = analytic_levels_exact(&p, 9, true);
        let without = analytic_levels_exact(&p, 9, false);
        for (x, y) in with.iter().zip(&without) {
            assert_eq!(x.0, y.0);
            assert_eq!(&x.1 - &y.1, BigRational::new(1.into(), 8.into()));
        }
    }
    let p = unit(0.25, 0.0);
    let d: Vec<f64> = analytic_spectrum_with(&p, 5, true)
        .energies()
        .iter()
        .zip(analytic_spectrum_with(&p, 5, false).energies())
        .map(|(a, b)| a - b)
        .collect();
    assert!(d.iter().all(|&v| v == 0.125));
}

#[test]
fn ground_energy_formula() {
    assert_eq!(ground_energy(&unit(0.0, 0.0)), 0.125);
    assert_eq!(ground_energy(&unit(0.5, 0.0)), 0.25);
    assert_eq!(
        ground_energy(&unit(1.0, 0.0)),
        ground_energy(&unit(0.0, 0.0))
    );
    for k in 0..100 {
        let p = unit(k as f64 / 100.0, 0.0);
        let min = analytic_spectrum(&p, 5)
            .energies()
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        assert!(
            (ground_energy(&p) - min).abs() <= 1e-14,
            "alpha {}",
            p.alpha
        );
    }
}

#[test]
fn operator_matrix_elements() {
    let p = RingParams::new(1.5, 1.0, 1.0, 0.25, 0.0).unwrap();
    let x = operator_matrix(Operator::X, &p, 4).unwrap();
    for m in -4..=4i64 {
        for n in -4..=4i64 {
            let want = if (m - n).abs() == 1 { 0.75 } else { 0.0 };
            assert_eq!(x.at(m, n), Complex64::new(want, 0.0));
        }
    }
    let lz = operator_matrix(Operator::Lz, &p, 4).unwrap();
    let h = operator_matrix(Operator::H, &p, 4).unwrap();
    for n in -4..=4i64 {
        let k = n as f64 - 0.25;
        assert_eq!(lz.at(n, n), Complex64::new(k, 0.0));
        let want = k * k / (2.0 * 2.25) + 1.0 / (8.0 * 2.25);
        assert!((h.at(n, n) - want).norm() < 1e-15);
        for m in -4..=4i64 {
            if m != n {
                assert_eq!(lz.at(m, n), Complex64::new(0.0, 0.0));
                assert_eq!(h.at(m, n), Complex64::new(0.0, 0.0));
            }
        }
    }
    assert!(operator_matrix(Operator::X, &p, 1).is_err());
    assert_eq!(Operator::parse("phi3w"), Some(Operator::Phi3W));
}

#[test]
fn hamiltonian_operator_is_exact() {
    let p = RingParams::new(1.25, 0.5, 0.75, 0.375, 0.125).unwrap();
    let ops = RingOperators::new(&p);
    // H = Lz^2 / (2 m r0^2) + hbar^2 / (8 m r0^2)
    let q = |v: f64| BigRational::from_float(v).unwrap();
    let scale = (BigRational::from_integer(2.into()) * q(0.5) * q(1.25) * q(1.25)).recip();
    let e0 = q(0.75) * q(0.75) * &scale / BigRational::from_integer(4.into());
    let want = ops
        .lz
        .compose(&ops.lz)
        .scale(&Complex::new(scale, BigRational::zero()))
        .add(&DiffOp::constant(Complex::new(e0, BigRational::zero())));
    assert_eq!(ops.h, want);
    assert!(ops.phi3w.is_zero());
    assert_eq!(ops.px.order(), 1);
}

#[test]
fn weyl_constraint_vanishes() {
    for (a, b, n) in [
        (0.0, 0.0, 8),
        (0.3, 0.0, 8),
        (0.7, 0.25, 16),
        (-1.4, 0.5, 5),
    ] {
        let m = operator_matrix(Operator::Phi3W, &unit(a, b), n).unwrap();
        assert_eq!(m.max_norm(), 0.0);
    }
}

#[test]
fn algebra_closes_on_interior() {
    for n in [8, 16, 32] {
        for (a, b) in [(0.0, 0.0), (0.3, 0.1)] {
            let r = algebra_residuals(&unit(a, b), n).unwrap();
            assert_eq!(r.max_hermiticity(), 0.0, "{:?}", r.hermiticity);
            assert!(r.max_relation() <= 1e-12, "{:?}", r.relations);
            assert_eq!(r.phi3w, 0.0);
            assert_eq!(r.relations.len(), 8);
        }
    }
    let p = RingParams::new(2.0, 0.5, 1.5, 0.2, 0.0).unwrap();
    let r = algebra_residuals(&p, 16).unwrap();
    assert!(r.max_relation() <= 1e-12, "{:?}", r.relations);
    assert!(algebra_residuals(&p, 3).is_err());
}

/// The interior check is meaningful: the outer band of a truncated product is wrong.
#[test]
fn truncation_error_lives_on_the_edge() {
    let p = unit(0.0, 0.0);
    let x = operator_matrix(Operator::X, &p, 6).unwrap();
    let px = operator_matrix(Operator::Px, &p, 6).unwrap();
    let c = x.commutator(&px);
    let want = x
        .identity_like()
        .sub(&x.mul(&x))
        .scale(Complex64::new(0.0, 1.0));
    let d = c.sub(&want);
    assert!(d.interior_max(2) < 1e-15);
    assert!(d.max_norm() > 0.1);
}

#[test]
fn ordering_and_hermiticity() {
    let r = nonhermitian_ordering_demo(&unit(0.0, 0.0), 8).unwrap();
    let get = |name: &str| r.orderings.iter().find(|o| o.0 == name).unwrap().clone();
    assert_eq!(get("phi3W = 0").1, 0.0);
    assert_eq!(get("phi3W = 0").2, 0.0);
    assert_eq!(get("x px + y py = 0").1, 0.5);
    assert_eq!(get("x px + y py = 0").2, 0.5);
    assert_eq!(get("px x + py y = 0").1, 0.5);
    // hbar / (2 r0)
    let p = RingParams::new(2.0, 1.0, 1.5, 0.3, 0.0).unwrap();
    let r = nonhermitian_ordering_demo(&p, 8).unwrap();
    assert!((r.orderings[0].1 - 0.375).abs() < 1e-15);
    assert_eq!(r.orderings[2].1, 0.0);
}

#[test]
fn grid_lowest_level_and_convergence() {
    let p = unit(0.0, 0.0);
    let g = grid_spectrum(&p, 64, 3).unwrap();
    assert!((g.levels[0].energy - 0.125).abs() <= 5e-4);
    let exact = 0.625;
    let mut errs = Vec::new();
    for n in [32, 64, 128] {
        let e = grid_spectrum(&p, n, 3).unwrap().energies();
        errs.push((e[1] - exact).abs());
    }
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((order - 2.0).abs() < 0.1, "order {order}");
    }
}

#[test]
fn grid_is_gauge_covariant() {
    let a = grid_spectrum(&unit(0.0, 0.0), 48, 6).unwrap().energies();
    let b = grid_spectrum(&unit(1.0, 0.0), 48, 6).unwrap().energies();
    let c = grid_spectrum(&unit(0.3, 0.3), 48, 6).unwrap().energies();
    for i in 0..6 {
        assert!((a[i] - b[i]).abs() <= 1e-10);
        assert!((a[i] - c[i]).abs() <= 1e-10);
    }
    assert!(grid_spectrum(&unit(0.0, 0.0), 8, 2).is_err());
    assert!(grid_spectrum(&unit(0.0, 0.0), 16, 0).is_err());
}

#[test]
fn grid_matches_discrete_dispersion() {
    // eigenvalues of the periodic second difference are known in closed form
    let p = unit(0.2, 0.45);
    let n = 40;
    let h = 2.0 * std::f64::consts::PI / n as f64;
    let mut want: Vec<f64> = (-20..20)
        .map(|j| (2.0 - 2.0 * ((j as f64 + 0.45 - 0.2) * h).cos()) / (2.0 * h * h) + 0.125)
        .collect();
    want.sort_by(f64::total_cmp);
    let got = grid_spectrum(&p, n, 10).unwrap().energies();
    for (a, b) in got.iter().zip(&want) {
        assert!((a - b).abs() < 1e-10, "{a} {b}");
    }
}

#[test]
fn fourier_spectrum_matches_analytic() {
    let p = unit(0.3, 0.1);
    let f = fourier_spectrum(&p, 8, 6).unwrap().energies();
    let a = analytic_spectrum(&p, 6).energies();
    for (x, y) in f.iter().zip(&a) {
        assert!((x - y).abs() < 1e-14);
    }
}
