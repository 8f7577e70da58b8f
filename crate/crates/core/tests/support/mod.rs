//! Shared helpers for the integration suites: the Gaussian reference
//! problem, a Householder-QR least-squares oracle, and small utilities.

use num_complex::Complex64;
use transheat_core::{real_fn, real_fn2, ComplexMatrix, IBVProblem};

/// The reference problem: `q = x^2` on `(-1,1) x (0,1)` with data cut from
/// the exact solution `exp(-x^2/2 - t)`.
pub fn gaussian_problem() -> IBVProblem {
    IBVProblem::new(
        1.0,
        1.0,
        real_fn(|x| x * x),
        real_fn(|x| (-0.5 * x * x).exp()),
        real_fn(|t| (-0.5 - t).exp()),
        real_fn(|t| (-0.5 - t).exp()),
        Some(real_fn2(|x, t| (-0.5 * x * x - t).exp())),
    )
    .expect("reference problem data are compatible")
}

/// Dense least squares by complex Householder QR, written independently of
/// the SVD path so the two can check each other. Requires full column rank
/// and at least as many rows as columns.
pub fn qr_least_squares(a: &ComplexMatrix, rhs: &[Complex64]) -> Vec<Complex64> {
    let m = a.nrows();
    let n = a.ncols();
    assert!(m >= n, "QR oracle needs a tall system");
    // column-major working copy
    let mut r = vec![Complex64::ZERO; m * n];
    for j in 0..n {
        for i in 0..m {
            r[j * m + i] = a.get(i, j);
        }
    }
    let mut y: Vec<Complex64> = rhs.to_vec();

    for j in 0..n {
        // Householder vector for column j below the diagonal
        let norm_x = (j..m).map(|i| r[j * m + i].norm_sqr()).sum::<f64>().sqrt();
        if norm_x == 0.0 {
            panic!("QR oracle hit a zero column");
        }
        let x0 = r[j * m + j];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { Complex64::new(1.0, 0.0) };
        let alpha = -phase * norm_x;
        let mut v: Vec<Complex64> = (j..m).map(|i| r[j * m + i]).collect();
        v[0] -= alpha;
        let v_norm_sqr: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        if v_norm_sqr > 0.0 {
            // apply I - 2 v v^H / (v^H v) to the trailing columns and rhs
            for col in j..n {
                let dot: Complex64 = v
                    .iter()
                    .enumerate()
                    .map(|(k, &vk)| vk.conj() * r[col * m + j + k])
                    .sum();
                let scale = dot * (2.0 / v_norm_sqr);
                for (k, &vk) in v.iter().enumerate() {
                    r[col * m + j + k] -= vk * scale;
                }
            }
            let dot: Complex64 = v.iter().enumerate().map(|(k, &vk)| vk.conj() * y[j + k]).sum();
            let scale = dot * (2.0 / v_norm_sqr);
            for (k, &vk) in v.iter().enumerate() {
                y[j + k] -= vk * scale;
            }
        }
        r[j * m + j] = alpha;
        for i in j + 1..m {
            r[j * m + i] = Complex64::ZERO;
        }
    }

    // back substitution on the upper triangle
    let mut x = vec![Complex64::ZERO; n];
    for i in (0..n).rev() {
        let mut acc = y[i];
        for k in i + 1..n {
            acc -= r[k * m + i] * x[k];
        }
        x[i] = acc / r[i * m + i];
    }
    x
}

/// Convenience wrapper asserting two complex slices agree within `tol`.
pub fn assert_vectors_close(a: &[Complex64], b: &[Complex64], tol: f64, label: &str) {
    assert_eq!(a.len(), b.len(), "{label}: length mismatch");
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        assert!(
            (x - y).norm() <= tol,
            "{label}: entry {i} differs: {x} vs {y} (tol {tol:.1e})"
        );
    }
}
