use super::{DynamicsError, EomSystem, Trajectory};

/// Constraint violation allowed in an initial state, relative to `max(1, |z|^2)`.
pub const INITIAL_TOLERANCE: f64 = 1e-12;

fn check_initial(sys: &EomSystem, initial: &[f64]) -> Result<(), DynamicsError> {
    if initial.len() != sys.dim() {
        return Err(DynamicsError::StateLength {
            expected: sys.dim(),
            got: initial.len(),
        });
    }
    if initial.iter().any(|v| !v.is_finite()) {
        return Err(DynamicsError::NonFinite { step: 0 });
    }
    let scale = initial.iter().fold(1.0f64, |m, v| m.max(v * v));
    let d = sys.diagnostics(initial);
    for (i, v) in d.iter().take(sys.constraint_count()).enumerate() {
        if v.abs() > INITIAL_TOLERANCE * scale {
            return Err(DynamicsError::OffSurface {
                name: sys.diagnostic_names()[i].clone(),
                value: *v,
            });
        }
    }
    Ok(())
}

fn check_step(h: f64, allow_zero: bool) -> Result<(), DynamicsError> {
    if !h.is_finite() || h < 0.0 || (h == 0.0 && !allow_zero) {
        return Err(DynamicsError::InvalidStep(h));
    }
    Ok(())
}

fn rk4_step(f: &dyn Fn(&[f64], &mut [f64]), y: &[f64], h: f64, out: &mut [f64]) {
    let n = y.len();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
    );
    f(y, &mut k1);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * k1[i];
    }
    f(&tmp, &mut k2);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * k2[i];
    }
    f(&tmp, &mut k3);
    for i in 0..n {
        tmp[i] = y[i] + h * k3[i];
    }
    f(&tmp, &mut k4);
    for i in 0..n {
        out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

fn run(
    sys: &EomSystem,
    initial: &[f64],
    h: f64,
    steps: usize,
    mut advance: impl FnMut(&[f64], &mut [f64], usize) -> Result<(), DynamicsError>,
) -> Result<Trajectory, DynamicsError> {
    let mut traj = Trajectory::new(sys, h, steps);
    let mut y = initial.to_vec();
    traj.push(sys, &y);
    let mut next = vec![0.0; y.len()];
    for step in 1..=steps {
        advance(&y, &mut next, step)?;
        if next.iter().any(|v| !v.is_finite()) {
            return Err(DynamicsError::NonFinite { step });
        }
        std::mem::swap(&mut y, &mut next);
        traj.push(sys, &y);
    }
    Ok(traj)
}

/// Classical fourth-order Runge-Kutta on the Dirac equations of motion.
pub fn integrate_rk4(
    sys: &EomSystem,
    initial: &[f64],
    h: f64,
    steps: usize,
) -> Result<Trajectory, DynamicsError> {
    check_step(h, false)?;
    check_initial(sys, initial)?;
    let f = |y: &[f64], out: &mut [f64]| sys.derivative(y, out);
    run(sys, initial, h, steps, |y, out, _| {
        rk4_step(&f, y, h, out);
        Ok(())
    })
}

/// Free RK4 step of the reduced Hamiltonian, then `q <- q r0/|q|` and removal of
/// the radial momentum component.
pub fn integrate_project(
    sys: &EomSystem,
    radius: f64,
    initial: &[f64],
    h: f64,
    steps: usize,
) -> Result<Trajectory, DynamicsError> {
    check_step(h, true)?;
    check_initial(sys, initial)?;
    let nc = sys.coordinates();
    let f = |y: &[f64], out: &mut [f64]| sys.free_derivative(y, out);
    run(sys, initial, h, steps, |y, out, step| {
        if h == 0.0 {
            out.copy_from_slice(y);
            return Ok(());
        }
        rk4_step(&f, y, h, out);
        let norm = out[..nc].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(DynamicsError::ProjectionUndefined { step });
        }
        for v in &mut out[..nc] {
            *v *= radius / norm;
        }
        let radial: f64 = (0..nc).map(|i| out[nc + i] * out[i]).sum::<f64>() / (radius * radius);
        for i in 0..nc {
            out[nc + i] -= radial * out[i];
        }
        Ok(())
    })
}

/// Uniform rotation `theta(t) = theta0 + Lz t / r0^2` through the initial point.
pub fn exact_circle(
    sys: &EomSystem,
    radius: f64,
    initial: &[f64],
    h: f64,
    steps: usize,
) -> Result<Trajectory, DynamicsError> {
    if sys.coordinates() != 2 {
        return Err(DynamicsError::NotPlanar);
    }
    check_step(h, true)?;
    if initial.len() != 4 {
        return Err(DynamicsError::StateLength {
            expected: 4,
            got: initial.len(),
        });
    }
    let [x, y, px, py] = [initial[0], initial[1], initial[2], initial[3]];
    let r2 = radius * radius;
    let scale = initial.iter().fold(1.0f64, |m, v| m.max(v * v));
    let on = [("phi2", x * x + y * y - r2), ("phi3", x * px + y * py)];
    for (name, v) in on {
        if v.abs() > INITIAL_TOLERANCE * scale {
            return Err(DynamicsError::OffSurface {
                name: name.into(),
                value: v,
            });
        }
    }
    let th0 = y.atan2(x);
    let lz = x * py - y * px;
    let mut traj = Trajectory::new(sys, h, steps);
    traj.push(sys, initial);
    for step in 1..=steps {
        let th = th0 + lz * (step as f64 * h) / r2;
        let (s, c) = th.sin_cos();
        traj.push(
            sys,
            &[radius * c, radius * s, -lz / radius * s, lz / radius * c],
        );
    }
    Ok(traj)
}
