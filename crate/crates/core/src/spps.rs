//! Nonvanishing particular solution of `f'' - q f = 0` on `[-b, b]` with
//! `f(0) = 1`, `f'(0) = alpha`, built as an iterated-integral series.
//!
//! The series starts from `c_0(x) = y0 + y0' x` and repeatedly applies the
//! double integral `c_{k+1}(x) = int_0^x int_0^s q(r) c_k(r) dr ds`; the sum
//! solves the initial value problem for any continuous potential on a bounded
//! interval. Nonvanishing of `f` is certified on the grid rather than proved.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{GridFunction, DEFAULT_NONVANISHING_EPS};

/// Default truncation tolerance for the iterated-integral series. The
/// collocation solver reaches absolute errors near 1e-13, which requires `f`
/// to carry full double precision.
pub const DEFAULT_SERIES_TOL: f64 = 1e-14;

/// Hard cap on series terms before reporting failure.
pub const MAX_SERIES_TERMS: usize = 200;

/// How to pick `alpha = f'(0)` in [`nonvanishing_solution`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaStrategy {
    /// For real potentials use `f = y_c + i y_s` (never vanishes because the
    /// Wronskian of the two IVP solutions is 1). For complex potentials try
    /// `alpha` in `{i, 1+i, 2i}` and keep the first certified candidate.
    Auto,
    /// Use the given `alpha` and verify nonvanishing on the grid.
    Given(Complex64),
}

/// Result of [`solve_ivp_series`]: the solution samples plus convergence
/// bookkeeping.
#[derive(Debug, Clone)]
pub struct IvpSeries {
    pub y: GridFunction,
    /// Number of series terms summed, including the affine seed term.
    pub terms_used: usize,
    /// Sup norm of the last two (sub-threshold) terms; a tail indicator.
    pub tail_estimate: f64,
}

/// Solves `y'' = q y`, `y(0) = y0`, `y'(0) = y0_prime` by summing iterated
/// double integrals of the potential against the previous term.
///
/// Truncates once the newest term stays below `tol` times the partial sum
/// for two consecutive terms.
pub fn solve_ivp_series(
    q: &GridFunction,
    y0: Complex64,
    y0_prime: Complex64,
    tol: f64,
) -> Result<IvpSeries> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain(format!("series tolerance must be positive, got {tol}")));
    }
    let grid = q.grid();
    let seed = GridFunction::sample(grid, |x| y0 + y0_prime * x);
    let mut term = seed.clone();
    let mut sum = seed;
    let mut previous_norm = term.max_abs();
    let mut below = 0;
    for step in 1..=MAX_SERIES_TERMS {
        term = q
            .mul(&term)
            .antiderivative_from_zero()
            .antiderivative_from_zero();
        sum = sum.add(&term);
        let terms_used = step + 1;
        if term.values().iter().any(|v| !v.is_finite()) {
            return Err(Error::NoConvergence { max_terms: terms_used, last_term: f64::INFINITY });
        }
        let norm = term.max_abs();
        if norm <= tol * sum.max_abs() {
            below += 1;
            if below >= 2 {
                return Ok(IvpSeries { y: sum, terms_used, tail_estimate: previous_norm + norm });
            }
        } else {
            below = 0;
        }
        previous_norm = norm;
    }
    Err(Error::NoConvergence { max_terms: MAX_SERIES_TERMS, last_term: term.max_abs() })
}

/// A certified-nonvanishing solution of `f'' - q f = 0` with `f(0) = 1`,
/// together with the squared quantities the recurrent integrals consume.
#[derive(Debug, Clone)]
pub struct ParticularSolution {
    q: GridFunction,
    f: GridFunction,
    alpha: Complex64,
    f_squared: GridFunction,
    f_inv_squared: GridFunction,
    series_terms_used: usize,
    tail_estimate: f64,
}

impl ParticularSolution {
    pub fn q(&self) -> &GridFunction {
        &self.q
    }

    pub fn f(&self) -> &GridFunction {
        &self.f
    }

    /// The derivative of `f` at the origin.
    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn f_squared(&self) -> &GridFunction {
        &self.f_squared
    }

    pub fn f_inv_squared(&self) -> &GridFunction {
        &self.f_inv_squared
    }

    pub fn series_terms_used(&self) -> usize {
        self.series_terms_used
    }

    pub fn tail_estimate(&self) -> f64 {
        self.tail_estimate
    }

    pub fn grid(&self) -> &std::sync::Arc<crate::grid::Grid> {
        self.f.grid()
    }
}

/// Builds a nonvanishing particular solution for the given potential.
pub fn nonvanishing_solution(q: &GridFunction, strategy: AlphaStrategy) -> Result<ParticularSolution> {
    nonvanishing_solution_with_tol(q, strategy, DEFAULT_SERIES_TOL)
}

/// As [`nonvanishing_solution`] with an explicit series tolerance.
pub fn nonvanishing_solution_with_tol(
    q: &GridFunction,
    strategy: AlphaStrategy,
    tol: f64,
) -> Result<ParticularSolution> {
    let even = solve_ivp_series(q, Complex64::new(1.0, 0.0), Complex64::ZERO, tol)?;
    let odd = solve_ivp_series(q, Complex64::ZERO, Complex64::new(1.0, 0.0), tol)?;
    let q_is_real = q.values().iter().all(|v| v.im == 0.0);
    let candidates: Vec<Complex64> = match strategy {
        AlphaStrategy::Given(alpha) => vec![alpha],
        AlphaStrategy::Auto if q_is_real => vec![Complex64::I],
        AlphaStrategy::Auto => vec![
            Complex64::I,
            Complex64::new(1.0, 1.0),
            Complex64::new(0.0, 2.0),
        ],
    };
    let mut rejection = None;
    for alpha in candidates {
        let f = even.y.add(&odd.y.scale(alpha));
        match assemble(q, f, alpha, &even, &odd) {
            Ok(ps) => return Ok(ps),
            Err(e @ Error::NonvanishingViolation { .. }) => rejection = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(rejection.expect("at least one alpha candidate"))
}

fn assemble(
    q: &GridFunction,
    f: GridFunction,
    alpha: Complex64,
    even: &IvpSeries,
    odd: &IvpSeries,
) -> Result<ParticularSolution> {
    let f_inv = f.reciprocal_with_threshold(DEFAULT_NONVANISHING_EPS)?;
    Ok(ParticularSolution {
        q: q.clone(),
        f_squared: f.square(),
        f_inv_squared: f_inv.square(),
        f,
        alpha,
        series_terms_used: even.terms_used.max(odd.terms_used),
        tail_estimate: even.tail_estimate + alpha.norm() * odd.tail_estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use num_complex::Complex64;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn zero_potential_constant_solution() {
        let grid = Grid::chebyshev(1.0, 32).unwrap();
        let q = GridFunction::constant(&grid, Complex64::ZERO);
        let sol = solve_ivp_series(&q, c(1.0), Complex64::ZERO, 1e-14).unwrap();
        for &v in sol.y.values() {
            assert!((v - c(1.0)).norm() <= 1e-15);
        }
        assert!(sol.terms_used <= 3);
    }

    #[test]
    fn unit_potential_gives_cosh_and_sinh() {
        let grid = Grid::chebyshev(1.0, 64).unwrap();
        let q = GridFunction::constant(&grid, c(1.0));
        let cosh = solve_ivp_series(&q, c(1.0), Complex64::ZERO, 1e-14).unwrap();
        // node 0 is x = 1
        assert!((cosh.y.value_at_node(0).re - 1.0_f64.cosh()).abs() <= 1e-11);
        let sinh = solve_ivp_series(&q, Complex64::ZERO, c(1.0), 1e-14).unwrap();
        assert!((sinh.y.value_at_node(0).re - 1.0_f64.sinh()).abs() <= 1e-11);
    }

    #[test]
    fn rejects_nonpositive_tolerance() {
        let grid = Grid::chebyshev(1.0, 32).unwrap();
        let q = GridFunction::constant(&grid, Complex64::ZERO);
        assert!(solve_ivp_series(&q, c(1.0), Complex64::ZERO, 0.0).is_err());
    }

    #[test]
    fn huge_potential_does_not_converge() {
        let grid = Grid::chebyshev(1.0, 32).unwrap();
        let q = GridFunction::constant(&grid, c(1e8));
        match solve_ivp_series(&q, c(1.0), Complex64::ZERO, 1e-14) {
            Err(Error::NoConvergence { .. }) => {}
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }

    #[test]
    fn zero_potential_given_alpha_zero() {
        let grid = Grid::chebyshev(1.0, 32).unwrap();
        let q = GridFunction::constant(&grid, Complex64::ZERO);
        let ps = nonvanishing_solution(&q, AlphaStrategy::Given(Complex64::ZERO)).unwrap();
        assert_eq!(ps.alpha(), Complex64::ZERO);
        for &v in ps.f().values() {
            assert!((v - c(1.0)).norm() <= 1e-15);
        }
    }

    #[test]
    fn unit_potential_alpha_one_is_exponential() {
        let grid = Grid::chebyshev(1.0, 64).unwrap();
        let q = GridFunction::constant(&grid, c(1.0));
        let ps = nonvanishing_solution(&q, AlphaStrategy::Given(c(1.0))).unwrap();
        // node m-1 is x = -1
        let at_minus_one = ps.f().value_at_node(63);
        assert!((at_minus_one.re - (-1.0_f64).exp()).abs() <= 1e-11);
        assert!(at_minus_one.im.abs() <= 1e-13);
    }

    #[test]
    fn auto_strategy_for_real_potential() {
        let grid = Grid::chebyshev(1.0, 32).unwrap();
        let q = GridFunction::constant(&grid, Complex64::ZERO);
        let ps = nonvanishing_solution(&q, AlphaStrategy::Auto).unwrap();
        assert_eq!(ps.alpha(), Complex64::I);
        for (&v, &x) in ps.f().values().iter().zip(grid.nodes()) {
            // f = 1 + i x, so |f| >= 1 everywhere
            assert!((v - Complex64::new(1.0, x)).norm() <= 1e-14);
            assert!(v.norm() >= 1.0 - 1e-14);
        }
    }

    #[test]
    fn ode_residual_and_initial_conditions() {
        let grid = Grid::chebyshev(1.0, 257).unwrap();
        let potentials: Vec<(&str, GridFunction)> = vec![
            ("zero", GridFunction::constant(&grid, Complex64::ZERO)),
            ("one", GridFunction::constant(&grid, c(1.0))),
            ("x^2", GridFunction::sample_real(&grid, |x| x * x)),
            ("cos", GridFunction::sample_real(&grid, f64::cos)),
        ];
        for (name, q) in potentials {
            let ps = nonvanishing_solution(&q, AlphaStrategy::Auto).unwrap();
            let f = ps.f();
            let residual = f.derivative().derivative().sub(&q.mul(f));
            assert!(
                residual.max_abs() <= 1e-8 * f.max_abs(),
                "q = {name}: residual {:.3e}",
                residual.max_abs()
            );
            let at_zero = f.interpolate(0.0).unwrap();
            assert!((at_zero - c(1.0)).norm() <= 1e-13, "q = {name}");
            let slope = f.derivative().interpolate(0.0).unwrap();
            assert!((slope - ps.alpha()).norm() <= 1e-10, "q = {name}");
        }
    }

    #[test]
    fn tail_estimate_bounds_truncation_error() {
        let grid = Grid::chebyshev(1.0, 128).unwrap();
        let q = GridFunction::sample_real(&grid, f64::cos);
        let coarse = solve_ivp_series(&q, c(1.0), Complex64::ZERO, 1e-6).unwrap();
        let fine = solve_ivp_series(&q, c(1.0), Complex64::ZERO, 1e-8).unwrap();
        let actual = coarse.y.sub(&fine.y).max_abs();
        assert!(
            actual <= 10.0 * coarse.tail_estimate,
            "actual {actual:.3e} vs tail {:.3e}",
            coarse.tail_estimate
        );
    }
}
