//! Explicit series solution of the noncharacteristic Cauchy problem: given
//! `u(0, t) = F(t)` and `u_x(0, t) = G(t)` along the time axis, the solution
//! is reconstructed for `|x| <= r < b` as
//!
//! ```text
//! u(x,t) = sum_j [ F^(j)(t)/(2j)! * (phi_2j - alpha/(2j+1) phi_2j+1)
//!                + G^(j)(t)/(2j+1)! * phi_2j+1 ](x)
//! ```
//!
//! The even combination is exactly the formal power family of the companion
//! solution with zero slope at the origin (see
//! [`FormalPowersBasis::alpha_corrected_power`]). Convergence holds for data
//! whose derivatives grow no faster than factorially (Holmgren-class data);
//! that regularity is the caller's assertion and is not checked here.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::formal_powers::FormalPowersBasis;
use crate::DerivativeProvider;

/// Data and truncation order for the noncharacteristic Cauchy problem.
#[derive(Clone)]
pub struct CauchyProblem {
    /// `(j, t)` maps to the j-th derivative of the axis values `F`.
    pub f_derivs: DerivativeProvider,
    /// `(j, t)` maps to the j-th derivative of the axis slope `G`.
    pub g_derivs: DerivativeProvider,
    /// Half-width of the time interval: data live on `|t| < tau`.
    pub tau: f64,
    /// Series truncation order `J` (terms `j = 0 ..= J` are summed).
    pub order: usize,
}

impl std::fmt::Debug for CauchyProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CauchyProblem")
            .field("tau", &self.tau)
            .field("order", &self.order)
            .finish()
    }
}

/// One evaluation of the truncated series: the partial sum and the magnitude
/// of its last term, a cheap convergence indicator.
#[derive(Debug, Clone, Copy)]
pub struct CauchyValue {
    pub value: Complex64,
    pub tail: f64,
}

/// Sums the series through `j = problem.order` at `(x, t)`.
///
/// The basis must have been built at least to index `2 * order + 1`.
pub fn cauchy_solution(
    problem: &CauchyProblem,
    basis: &FormalPowersBasis,
    x: f64,
    t: f64,
) -> Result<CauchyValue> {
    let highest_needed = 2 * problem.order + 1;
    if basis.max_index() < highest_needed {
        return Err(Error::IndexOutOfRange { index: highest_needed, max: basis.max_index() });
    }
    let point = basis.grid().locate(x)?;
    let alpha = basis.particular_solution().alpha();

    let mut value = Complex64::ZERO;
    let mut tail = 0.0;
    let mut fact_even = 1.0; // (2j)!
    for j in 0..=problem.order {
        let odd_index = 2 * j + 1;
        let fact_odd = fact_even * odd_index as f64; // (2j+1)!

        let phi_even = basis.phi(2 * j).interpolate_at(&point);
        let phi_odd = basis.phi(odd_index).interpolate_at(&point);
        // pointwise form of alpha_corrected_power(j)
        let even_power = phi_even - alpha / Complex64::new(odd_index as f64, 0.0) * phi_odd;

        let term_f = (problem.f_derivs)(j, t) / fact_even * even_power;
        let term_g = (problem.g_derivs)(j, t) / fact_odd * phi_odd;
        value += term_f + term_g;
        tail = term_f.norm() + term_g.norm();

        fact_even = fact_odd * (odd_index + 1) as f64; // (2j+2)!
    }
    Ok(CauchyValue { value, tail })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid, GridFunction};
    use crate::spps::{nonvanishing_solution, AlphaStrategy};
    use std::sync::Arc;

    fn zero_provider() -> DerivativeProvider {
        Arc::new(|_, _| Complex64::ZERO)
    }

    fn basis_for(q: impl Fn(f64) -> f64, m: usize, highest: usize) -> FormalPowersBasis {
        let grid = Grid::chebyshev(1.0, m).unwrap();
        let q = GridFunction::sample_real(&grid, q);
        let ps = nonvanishing_solution(&q, AlphaStrategy::Auto).unwrap();
        FormalPowersBasis::build(ps, highest)
    }

    #[test]
    fn constant_data_gives_constant_solution() {
        // q = 0, F = 1, G = 0: only the j = 0 term survives
        let basis = basis_for(|_| 0.0, 64, 3);
        let problem = CauchyProblem {
            f_derivs: Arc::new(|j, _| if j == 0 { Complex64::new(1.0, 0.0) } else { Complex64::ZERO }),
            g_derivs: zero_provider(),
            tau: 1.0,
            order: 1,
        };
        for &(x, t) in &[(0.0, 0.0), (0.5, 0.3), (-0.8, 0.9)] {
            let v = cauchy_solution(&problem, &basis, x, t).unwrap();
            assert!((v.value - Complex64::new(1.0, 0.0)).norm() <= 1e-13, "at ({x},{t})");
        }
    }

    #[test]
    fn heat_kernel_mode_for_zero_potential() {
        // q = 0, F = e^-t, G = 0 sums to e^-t cos x
        let basis = basis_for(|_| 0.0, 128, 31);
        let problem = CauchyProblem {
            f_derivs: Arc::new(|j, t| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                Complex64::new(sign * (-t).exp(), 0.0)
            }),
            g_derivs: zero_provider(),
            tau: 1.0,
            order: 15,
        };
        let v = cauchy_solution(&problem, &basis, 0.5, 0.2).unwrap();
        let expected = (-0.2_f64).exp() * 0.5_f64.cos();
        assert!(
            (v.value - Complex64::new(expected, 0.0)).norm() <= 1e-10,
            "{} vs {expected}",
            v.value
        );
    }

    #[test]
    fn gaussian_example_matches_exact_solution() {
        // q = x^2 with data from u = exp(-x^2/2 - t) restricted to the axis
        let basis = basis_for(|x| x * x, 257, 31);
        let problem = CauchyProblem {
            f_derivs: Arc::new(|j, t| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                Complex64::new(sign * (-t).exp(), 0.0)
            }),
            g_derivs: zero_provider(),
            tau: 1.0,
            order: 15,
        };
        let v = cauchy_solution(&problem, &basis, 0.5, 0.2).unwrap();
        let expected = (-0.125_f64 - 0.2).exp();
        assert!(
            (v.value - Complex64::new(expected, 0.0)).norm() <= 1e-8,
            "{} vs {expected}",
            v.value
        );
    }

    #[test]
    fn axis_values_reproduce_data() {
        let basis = basis_for(|x| x.cos(), 128, 21);
        let problem = CauchyProblem {
            f_derivs: Arc::new(|j, t| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                Complex64::new(sign * (-t).exp(), 0.0)
            }),
            g_derivs: zero_provider(),
            tau: 1.0,
            order: 10,
        };
        for &t in &[0.1, 0.4, 0.8] {
            let v = cauchy_solution(&problem, &basis, 0.0, t).unwrap();
            assert!((v.value.re - (-t).exp()).abs() <= 1e-12, "t = {t}");
            assert!(v.value.im.abs() <= 1e-12);
        }
    }

    #[test]
    fn axis_slope_matches_g() {
        // pure-G data: u_x(0, t) should recover G(t)
        let basis = basis_for(|x| x.cos(), 257, 25);
        let problem = CauchyProblem {
            f_derivs: zero_provider(),
            g_derivs: Arc::new(|j, t| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                Complex64::new(sign * (-t).exp(), 0.0)
            }),
            tau: 1.0,
            order: 12,
        };
        let h = 1e-4;
        for &t in &[0.2, 0.6] {
            let plus = cauchy_solution(&problem, &basis, h, t).unwrap().value;
            let minus = cauchy_solution(&problem, &basis, -h, t).unwrap().value;
            let slope = (plus - minus) / (2.0 * h);
            assert!((slope.re - (-t).exp()).abs() <= 1e-6, "t = {t}: {slope}");
        }
    }

    #[test]
    fn truncated_series_nearly_solves_the_pde() {
        let basis = basis_for(|x| x * x, 257, 31);
        let problem = CauchyProblem {
            f_derivs: Arc::new(|j, t| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                Complex64::new(sign * (-t).exp(), 0.0)
            }),
            g_derivs: zero_provider(),
            tau: 1.0,
            order: 15,
        };
        let h = 1e-3;
        for &(x, t) in &[(0.3, 0.5), (-0.5, 0.4)] {
            let u = |x: f64, t: f64| cauchy_solution(&problem, &basis, x, t).unwrap().value;
            let center = u(x, t);
            let uxx = (u(x + h, t) - center * 2.0 + u(x - h, t)) / (h * h);
            let ut = (u(x, t + h) - u(x, t - h)) / (2.0 * h);
            let tail = cauchy_solution(&problem, &basis, x, t).unwrap().tail;
            let residual = (uxx - Complex64::new(x * x, 0.0) * center - ut).norm();
            assert!(
                residual <= (1e-6_f64).max(10.0 * tail),
                "residual {residual:.3e} at ({x},{t})"
            );
        }
    }

    #[test]
    fn pointwise_even_power_matches_module_route() {
        // the scalar combination inside the series equals the grid-level
        // alpha-corrected power
        let basis = basis_for(|x| x * x, 128, 9);
        let alpha = basis.particular_solution().alpha();
        for j in 0..4 {
            let corrected = basis.alpha_corrected_power(j).unwrap();
            for &x in &[0.0, 0.35, -0.8] {
                let direct = corrected.interpolate(x).unwrap();
                let odd = 2 * j + 1;
                let pointwise = basis.phi(2 * j).interpolate(x).unwrap()
                    - alpha / Complex64::new(odd as f64, 0.0)
                        * basis.phi(odd).interpolate(x).unwrap();
                assert!((direct - pointwise).norm() <= 1e-13);
            }
        }
    }

    #[test]
    fn order_beyond_basis_is_rejected() {
        let basis = basis_for(|_| 0.0, 64, 5);
        let problem = CauchyProblem {
            f_derivs: zero_provider(),
            g_derivs: zero_provider(),
            tau: 1.0,
            order: 3, // needs phi up to index 7 > 5
        };
        match cauchy_solution(&problem, &basis, 0.1, 0.1) {
            Err(Error::IndexOutOfRange { .. }) => {}
            other => panic!("expected index error, got {other:?}"),
        }
    }
}
