use std::f64::consts::PI;

use num_complex::Complex64;

use super::{Level, Method, QuantumError, RingParams, SpectrumResult};

pub const DEFAULT_SWEEPS: usize = 100;
pub const JACOBI_TOLERANCE: f64 = 1e-12;

/// Finite-difference Hamiltonian on `gridN` points with gauge-covariant
/// hopping `e^{-i alpha h}` and the twist `e^{i 2 pi beta}` across the seam.
pub fn grid_hamiltonian(p: &RingParams, grid_n: usize) -> Result<Vec<Complex64>, QuantumError> {
    if grid_n < 16 {
        return Err(QuantumError::GridTooSmall { got: grid_n });
    }
    let n = grid_n;
    let h = 2.0 * PI / n as f64;
    let c = p.hbar * p.hbar / (2.0 * p.m * p.r0 * p.r0 * h * h);
    let e0 = p.e0();
    let hop = Complex64::from_polar(c, -p.alpha * h);
    let twist = Complex64::from_polar(1.0, 2.0 * PI * p.beta);
    let mut a = vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..n {
        a[j * n + j] = Complex64::new(2.0 * c + e0, 0.0);
        let (right, phase) = if j + 1 == n {
            (0, twist)
        } else {
            (j + 1, Complex64::new(1.0, 0.0))
        };
        let forward = -hop * phase;
        a[j * n + right] += forward;
        a[right * n + j] += forward.conj();
    }
    Ok(a)
}

/// Lowest `levels` eigenvalues of the grid Hamiltonian.
pub fn grid_spectrum(
    p: &RingParams,
    grid_n: usize,
    levels: usize,
) -> Result<SpectrumResult, QuantumError> {
    if levels == 0 || levels > grid_n {
        return Err(QuantumError::Levels {
            levels,
            max: grid_n,
        });
    }
    let a = grid_hamiltonian(p, grid_n)?;
    let ev = hermitian_eigenvalues(&a, grid_n, DEFAULT_SWEEPS)?;
    Ok(SpectrumResult {
        method: Method::GridFd,
        levels: ev
            .into_iter()
            .take(levels)
            .map(|energy| Level { energy, n: None })
            .collect(),
    })
}

/// Eigenvalues of a hermitian `n x n` matrix `A + iB`, from the real symmetric
/// matrix `[[A, -B], [B, A]]` whose spectrum is that of `A + iB` doubled.
pub fn hermitian_eigenvalues(
    a: &[Complex64],
    n: usize,
    max_sweeps: usize,
) -> Result<Vec<f64>, QuantumError> {
    let m = 2 * n;
    let mut s = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            let z = a[i * n + j];
            s[i * m + j] = z.re;
            s[(i + n) * m + j + n] = z.re;
            s[i * m + j + n] = -z.im;
            s[(i + n) * m + j] = z.im;
        }
    }
    let mut ev = jacobi_eigenvalues(s, m, max_sweeps)?;
    ev.sort_by(f64::total_cmp);
    Ok(ev.into_iter().step_by(2).collect())
}

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops below
/// `JACOBI_TOLERANCE * |A|_F`. Returns the unsorted diagonal.
pub fn jacobi_eigenvalues(
    mut a: Vec<f64>,
    n: usize,
    max_sweeps: usize,
) -> Result<Vec<f64>, QuantumError> {
    let total: f64 = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        s.sqrt()
    };
    let target = JACOBI_TOLERANCE * total;
    for _ in 0..=max_sweeps {
        if off(&a) <= target {
            return Ok((0..n).map(|i| a[i * n + i]).collect());
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    Err(QuantumError::NoConvergence { sweeps: max_sweeps })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_small_matrices() {
        let ev = {
            let mut v = jacobi_eigenvalues(vec![2.0, 1.0, 1.0, 2.0], 2, 10).unwrap();
            v.sort_by(f64::total_cmp);
            v
        };
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);
        let d = jacobi_eigenvalues(vec![5.0, 0.0, 0.0, -1.0], 2, 0).unwrap();
        assert_eq!(d, vec![5.0, -1.0]);
    }

    #[test]
    fn hermitian_two_by_two() {
        // [[1, -i], [i, 1]] has eigenvalues 0 and 2
        let a = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(1.0, 0.0),
        ];
        let ev = hermitian_eigenvalues(&a, 2, 20).unwrap();
        assert!(ev[0].abs() < 1e-14 && (ev[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn sweep_cap() {
        let a = vec![1.0, 2.0, 3.0, 2.0, 4.0, 5.0, 3.0, 5.0, 6.0];
        assert!(matches!(
            jacobi_eigenvalues(a, 3, 0),
            Err(QuantumError::NoConvergence { sweeps: 0 })
        ));
    }
}
