//! Heat polynomials and their transmuted counterparts.
//!
//! The classical heat polynomial of index `n` is
//! `h_n(x,t) = n! * sum_k t^k x^(n-2k) / (k! (n-2k)!)`, a polynomial solution
//! of `u_xx = u_t`. Replacing the monomial `x^(n-2k)` by the formal power
//! `phi_(n-2k)` yields `u_n(x,t)`, a solution of `u_xx - q u = u_t` for the
//! potential the formal powers were built from. The family `u_0 .. u_N` is
//! complete in the uniform norm over the closed rectangle, which is what the
//! collocation solver relies on.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::formal_powers::FormalPowersBasis;
use crate::grid::{GridFunction, InterpPoint};

/// Largest supported polynomial index. The coefficient recurrence stays
/// finite in `f64` up to here; beyond it the coefficients overflow.
pub const MAX_POLY_INDEX: usize = 170;

/// Default step factor for the finite-difference residual probe: the step is
/// this factor times the half-width.
pub const DEFAULT_RESIDUAL_STEP_FACTOR: f64 = 1e-4;

/// Coefficients `n! / (k! (n-2k)!)` for `k = 0 ..= n/2`, by multiplicative
/// recurrence so no factorial is ever formed.
fn heat_coefficients(n: usize) -> Vec<f64> {
    let kmax = n / 2;
    let mut coeffs = Vec::with_capacity(kmax + 1);
    let mut c = 1.0;
    coeffs.push(c);
    for k in 0..kmax {
        let a = (n - 2 * k) as f64;
        c *= a * (a - 1.0) / (k as f64 + 1.0);
        coeffs.push(c);
    }
    coeffs
}

/// The heat polynomial `h_n(x, t)`, accumulated Horner-style in `k`.
pub fn heat_polynomial(n: usize, x: f64, t: f64) -> f64 {
    let coeffs = heat_coefficients(n);
    let y = x * x;
    let mut acc = coeffs[0];
    let mut tp = 1.0;
    for &c in &coeffs[1..] {
        tp *= t;
        acc = acc * y + c * tp;
    }
    if n % 2 == 1 {
        acc *= x;
    }
    acc
}

/// Spatial derivative of the heat polynomial, term by term.
pub fn heat_polynomial_dx(n: usize, x: f64, t: f64) -> f64 {
    let coeffs = heat_coefficients(n);
    let mut acc = 0.0;
    let mut tp = 1.0;
    for (k, &c) in coeffs.iter().enumerate() {
        let p = (n - 2 * k) as i32;
        if p > 0 {
            acc += c * tp * p as f64 * x.powi(p - 1);
        }
        tp *= t;
    }
    acc
}

/// Time derivative of the heat polynomial, term by term.
pub fn heat_polynomial_dt(n: usize, x: f64, t: f64) -> f64 {
    let coeffs = heat_coefficients(n);
    let mut acc = 0.0;
    let mut tp = 1.0;
    for (k, &c) in coeffs.iter().enumerate() {
        if k >= 1 {
            acc += c * k as f64 * tp * x.powi((n - 2 * k) as i32);
            tp *= t;
        }
    }
    acc
}

/// Evaluator for the transmuted heat polynomials `u_0 .. u_N` and their
/// time derivatives, with a residual probe for the underlying PDE.
///
/// Immutable after construction; evaluation is pure and may run from many
/// threads at once.
#[derive(Debug)]
pub struct TransmutedHeatBasis {
    fp: FormalPowersBasis,
    n_max: usize,
    coeffs: Vec<Vec<f64>>,
    phi_xx: OnceLock<Vec<GridFunction>>,
}

impl TransmutedHeatBasis {
    /// Wraps a formal-power family as a transmuted heat basis of order
    /// `n_max`. The family must have been built at least that far.
    pub fn new(fp: FormalPowersBasis, n_max: usize) -> Result<Self> {
        if n_max > MAX_POLY_INDEX {
            return Err(Error::Domain(format!(
                "polynomial index {n_max} exceeds the supported maximum {MAX_POLY_INDEX}"
            )));
        }
        if fp.max_index() < n_max {
            return Err(Error::IndexOutOfRange { index: n_max, max: fp.max_index() });
        }
        let coeffs = (0..=n_max).map(heat_coefficients).collect();
        Ok(TransmutedHeatBasis { fp, n_max, coeffs, phi_xx: OnceLock::new() })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn formal_powers(&self) -> &FormalPowersBasis {
        &self.fp
    }

    pub fn grid(&self) -> &std::sync::Arc<crate::grid::Grid> {
        self.fp.grid()
    }

    /// Default finite-difference step for [`Self::pde_residual_fd`].
    pub fn default_residual_step(&self) -> f64 {
        DEFAULT_RESIDUAL_STEP_FACTOR * self.grid().half_width()
    }

    fn check_index(&self, n: usize) -> Result<()> {
        if n > self.n_max {
            return Err(Error::IndexOutOfRange { index: n, max: self.n_max });
        }
        Ok(())
    }

    /// Second spatial derivatives of the formal powers, computed once on
    /// first use.
    fn phi_xx(&self) -> &[GridFunction] {
        self.phi_xx.get_or_init(|| {
            (0..=self.n_max)
                .map(|k| self.fp.phi(k).derivative().derivative())
                .collect()
        })
    }

    fn value_at(&self, n: usize, point: &InterpPoint, t: f64) -> Complex64 {
        let mut acc = Complex64::ZERO;
        let mut tp = 1.0;
        for (k, &c) in self.coeffs[n].iter().enumerate() {
            acc += self.fp.phi(n - 2 * k).interpolate_at(point) * (c * tp);
            tp *= t;
        }
        acc
    }

    /// `u_n(x, t)`.
    pub fn value(&self, n: usize, x: f64, t: f64) -> Result<Complex64> {
        self.check_index(n)?;
        let point = self.grid().locate(x)?;
        Ok(self.value_at(n, &point, t))
    }

    /// All of `u_0(x,t) .. u_N(x,t)` sharing one interpolation of the formal
    /// powers.
    pub fn values_all(&self, x: f64, t: f64) -> Result<Vec<Complex64>> {
        let point = self.grid().locate(x)?;
        let phi: Vec<Complex64> = (0..=self.n_max)
            .map(|j| self.fp.phi(j).interpolate_at(&point))
            .collect();
        Ok((0..=self.n_max)
            .map(|n| {
                let mut acc = Complex64::ZERO;
                let mut tp = 1.0;
                for (k, &c) in self.coeffs[n].iter().enumerate() {
                    acc += phi[n - 2 * k] * (c * tp);
                    tp *= t;
                }
                acc
            })
            .collect())
    }

    /// The linear combination `sum_n a_n u_n(x, t)`.
    pub fn combination(&self, a: &[Complex64], x: f64, t: f64) -> Result<Complex64> {
        if a.len() > self.n_max + 1 {
            return Err(Error::IndexOutOfRange { index: a.len() - 1, max: self.n_max });
        }
        let point = self.grid().locate(x)?;
        let phi: Vec<Complex64> = (0..a.len())
            .map(|j| self.fp.phi(j).interpolate_at(&point))
            .collect();
        let mut acc = Complex64::ZERO;
        for (n, &an) in a.iter().enumerate() {
            let mut tp = 1.0;
            for (k, &c) in self.coeffs[n].iter().enumerate() {
                acc += an * phi[n - 2 * k] * (c * tp);
                tp *= t;
            }
        }
        Ok(acc)
    }

    /// The formal powers `phi_0 .. phi_N` interpolated at one point; the
    /// building block for evaluating many `u_n` at shared abscissae.
    pub fn phi_values(&self, x: f64) -> Result<Vec<Complex64>> {
        let point = self.grid().locate(x)?;
        Ok((0..=self.n_max)
            .map(|j| self.fp.phi(j).interpolate_at(&point))
            .collect())
    }

    /// Collapses a coefficient vector at fixed `t` into weights over the
    /// formal powers: `sum_n a_n u_n(x, t) = sum_j w_j phi_j(x)` for every
    /// `x`. Lets tensor meshes interpolate each `phi_j` once per abscissa.
    pub fn combination_weights(&self, a: &[Complex64], t: f64) -> Result<Vec<Complex64>> {
        if a.len() > self.n_max + 1 {
            return Err(Error::IndexOutOfRange { index: a.len() - 1, max: self.n_max });
        }
        let mut w = vec![Complex64::ZERO; a.len()];
        for (n, &an) in a.iter().enumerate() {
            let mut tp = 1.0;
            for (k, &c) in self.coeffs[n].iter().enumerate() {
                w[n - 2 * k] += an * (c * tp);
                tp *= t;
            }
        }
        Ok(w)
    }

    /// Analytic time derivative of `u_n` (the `t^k` factors are
    /// differentiated term by term).
    pub fn time_derivative(&self, n: usize, x: f64, t: f64) -> Result<Complex64> {
        self.check_index(n)?;
        let point = self.grid().locate(x)?;
        let mut acc = Complex64::ZERO;
        let mut tp_prev = 1.0;
        for (k, &c) in self.coeffs[n].iter().enumerate() {
            if k >= 1 {
                acc += self.fp.phi(n - 2 * k).interpolate_at(&point) * (c * k as f64 * tp_prev);
                tp_prev *= t;
            }
        }
        Ok(acc)
    }

    /// Absolute PDE residual `|u_xx - q u - u_t|` of `u_n` at `(x, t)`.
    ///
    /// The spatial part interpolates the spectrally differentiated formal
    /// powers and the time part is analytic, so the probe is limited only by
    /// the accuracy of the basis itself.
    pub fn pde_residual(&self, n: usize, x: f64, t: f64) -> Result<f64> {
        self.check_index(n)?;
        let point = self.grid().locate(x)?;
        let q = self.fp.particular_solution().q().interpolate_at(&point);
        let phi_xx = self.phi_xx();
        let mut residual = Complex64::ZERO;
        let mut tp = 1.0;
        let mut tp_prev = 1.0;
        for (k, &c) in self.coeffs[n].iter().enumerate() {
            let j = n - 2 * k;
            let phi = self.fp.phi(j).interpolate_at(&point);
            residual += (phi_xx[j].interpolate_at(&point) - q * phi) * (c * tp);
            if k >= 1 {
                residual -= phi * (c * k as f64 * tp_prev);
                tp_prev *= t;
            }
            tp *= t;
        }
        Ok(residual.norm())
    }

    /// Finite-difference variant of the residual probe: `u_xx` by central
    /// differences with step `h`, `u_t` analytic. Useful as a check that is
    /// independent of the spectral differentiation path.
    pub fn pde_residual_fd(&self, n: usize, x: f64, t: f64, h: f64) -> Result<f64> {
        self.check_index(n)?;
        if h.is_nan() || h <= 0.0 {
            return Err(Error::Domain(format!("step must be positive, got {h}")));
        }
        let center = self.value(n, x, t)?;
        let plus = self.value(n, x + h, t)?;
        let minus = self.value(n, x - h, t)?;
        let uxx = (plus - center * 2.0 + minus) / (h * h);
        let q = self.fp.particular_solution().q().interpolate(x)?;
        let ut = self.time_derivative(n, x, t)?;
        Ok((uxx - q * center - ut).norm())
    }
}
