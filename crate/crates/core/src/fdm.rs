//! Crank-Nicolson finite-difference solver for the same initial-Dirichlet
//! problem, used to validate the collocation solver on problems without a
//! closed-form solution.
//!
//! Standard second-order central differences in space and the trapezoidal
//! rule in time; each step solves one complex tridiagonal system by the
//! Thomas algorithm. The scheme is unconditionally stable, so the solver's
//! accuracy is governed by the mesh alone.

use num_complex::Complex64;

use crate::collocation::IBVProblem;
use crate::error::{Error, Result};
use crate::SpaceTimeFn;

/// Minimum pivot magnitude accepted by the tridiagonal elimination.
const PIVOT_GUARD: f64 = 1e-12;

/// Finite-difference solution on the uniform space-time lattice, boundary
/// rows and columns included.
#[derive(Debug, Clone)]
pub struct FdMesh {
    b: f64,
    tau: f64,
    nx: usize,
    nt: usize,
    /// `(nt + 1) x (nx + 1)` values, row-major in time.
    values: Vec<Complex64>,
}

impl FdMesh {
    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.b / self.nx as f64
    }

    pub fn dt(&self) -> f64 {
        self.tau / self.nt as f64
    }

    pub fn x(&self, ix: usize) -> f64 {
        -self.b + 2.0 * self.b * ix as f64 / self.nx as f64
    }

    pub fn t(&self, it: usize) -> f64 {
        self.tau * it as f64 / self.nt as f64
    }

    pub fn value(&self, ix: usize, it: usize) -> Complex64 {
        self.values[it * (self.nx + 1) + ix]
    }

    /// Largest deviation from an exact solution over the whole lattice.
    pub fn max_error_vs(&self, exact: &SpaceTimeFn) -> f64 {
        let mut worst: f64 = 0.0;
        for it in 0..=self.nt {
            for ix in 0..=self.nx {
                let truth = exact(self.x(ix), self.t(it));
                worst = worst.max((self.value(ix, it) - truth).norm());
            }
        }
        worst
    }

    /// CSV rendering in the shared mesh format: `x,t,re_u,im_u` plus error
    /// columns when an exact solution is supplied.
    pub fn to_csv(&self, exact: Option<&SpaceTimeFn>) -> String {
        let mut out = String::from(if exact.is_some() {
            "x,t,re_u,im_u,abs_err,rel_err\n"
        } else {
            "x,t,re_u,im_u\n"
        });
        for it in 0..=self.nt {
            for ix in 0..=self.nx {
                let v = self.value(ix, it);
                let (x, t) = (self.x(ix), self.t(it));
                match exact {
                    Some(exact) => {
                        let truth = exact(x, t);
                        let abs = (v - truth).norm();
                        let rel = abs / truth.norm().max(1e-300);
                        out.push_str(&format!(
                            "{},{},{:.15e},{:.15e},{:.15e},{:.15e}\n",
                            x, t, v.re, v.im, abs, rel
                        ));
                    }
                    None => out.push_str(&format!("{},{},{:.15e},{:.15e}\n", x, t, v.re, v.im)),
                }
            }
        }
        out
    }
}

/// Solves the complex tridiagonal system in place by forward elimination and
/// back substitution. `lower`, `diag`, `upper` are the three bands; `rhs`
/// becomes the solution.
fn thomas_solve(
    lower: &[Complex64],
    diag: &[Complex64],
    upper: &[Complex64],
    rhs: &mut [Complex64],
) -> Result<()> {
    let n = diag.len();
    let mut scratch = vec![Complex64::ZERO; n];
    let mut pivot = diag[0];
    if pivot.norm() < PIVOT_GUARD {
        return Err(Error::SingularTridiagonal { row: 0, pivot: pivot.norm() });
    }
    rhs[0] /= pivot;
    for i in 1..n {
        scratch[i] = upper[i - 1] / pivot;
        pivot = diag[i] - lower[i - 1] * scratch[i];
        if pivot.norm() < PIVOT_GUARD {
            return Err(Error::SingularTridiagonal { row: i, pivot: pivot.norm() });
        }
        rhs[i] = (rhs[i] - lower[i - 1] * rhs[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        let next = rhs[i + 1];
        rhs[i] -= scratch[i + 1] * next;
    }
    Ok(())
}

/// Runs Crank-Nicolson on `problem` with `nx` spatial intervals and `nt`
/// time steps. The initial row and the two lateral columns carry the data
/// exactly.
pub fn crank_nicolson(problem: &IBVProblem, nx: usize, nt: usize) -> Result<FdMesh> {
    if nx < 4 || nt < 4 {
        return Err(Error::Domain(format!("mesh too coarse: nx = {nx}, nt = {nt} (need >= 4)")));
    }
    let b = problem.half_width();
    let tau = problem.final_time();
    let dx = 2.0 * b / nx as f64;
    let dt = tau / nt as f64;
    let r = dt / (2.0 * dx * dx);

    let xs: Vec<f64> = (0..=nx).map(|i| -b + dx * i as f64).collect();
    let q: Vec<Complex64> = xs.iter().map(|&x| (problem.q())(x)).collect();

    let mut values = vec![Complex64::ZERO; (nx + 1) * (nt + 1)];
    for (i, &x) in xs.iter().enumerate() {
        values[i] = (problem.initial())(x);
    }

    // bands of the implicit operator I - dt/2 (D_xx - q) on the interior
    let interior = nx - 1;
    let lower = vec![Complex64::new(-r, 0.0); interior - 1];
    let upper = lower.clone();
    let diag: Vec<Complex64> = (1..nx)
        .map(|i| Complex64::new(1.0 + 2.0 * r, 0.0) + q[i] * (dt / 2.0))
        .collect();

    let mut rhs = vec![Complex64::ZERO; interior];
    for step in 0..nt {
        let t_next = tau * (step + 1) as f64 / nt as f64;
        let left_next = (problem.left())(t_next);
        let right_next = (problem.right())(t_next);
        {
            let current = &values[step * (nx + 1)..(step + 1) * (nx + 1)];
            for i in 1..nx {
                let explicit = current[i] * (Complex64::new(1.0 - 2.0 * r, 0.0) - q[i] * (dt / 2.0))
                    + (current[i - 1] + current[i + 1]) * r;
                rhs[i - 1] = explicit;
            }
            // the explicit stencil above already used the old boundary
            // values; only the implicit-side boundary terms move to the rhs
            rhs[0] += left_next * r;
            rhs[interior - 1] += right_next * r;
        }
        thomas_solve(&lower, &diag, &upper, &mut rhs)?;
        let next = &mut values[(step + 1) * (nx + 1)..(step + 2) * (nx + 1)];
        next[0] = left_next;
        next[nx] = right_next;
        next[1..nx].copy_from_slice(&rhs);
    }

    Ok(FdMesh { b, tau, nx, nt, values })
}
