//! Numerical core for solving the one-dimensional reaction-diffusion
//! equation `u_xx - q(x) u = u_t` on a rectangle.
//!
//! The solver represents solutions as linear combinations of transmuted heat
//! polynomials: images of the classical heat polynomials under the
//! transmutation operator associated with the potential `q`. The basis is
//! built from a nonvanishing particular solution of `f'' - q f = 0` and the
//! recurrent integrals that define the formal powers, so no transmutation
//! kernel is ever constructed. Initial-Dirichlet problems are fitted by
//! collocation on the parabolic boundary with a truncated-SVD pseudoinverse
//! solve; noncharacteristic Cauchy problems are summed explicitly from data
//! derivatives along the time axis.
//!
//! Modules:
//! - [`grid`]: Chebyshev-sampled function calculus (the integration substrate)
//! - [`spps`]: nonvanishing particular solution by iterated-integral series
//! - [`formal_powers`]: recurrent integrals and the formal power family
//! - [`heat_basis`]: heat polynomials and their transmuted counterparts
//! - [`lsq`]: truncated-SVD minimum-norm least squares with conditioning report
//! - [`collocation`]: parabolic-boundary collocation solver for IBVPs
//! - [`cauchy`]: explicit series solution of the noncharacteristic Cauchy problem
//! - [`fdm`]: Crank-Nicolson finite-difference reference solver

pub mod cauchy;
pub mod collocation;
pub mod error;
pub mod fdm;
pub mod formal_powers;
pub mod grid;
pub mod heat_basis;
pub mod lsq;
pub mod spps;

pub use cauchy::{cauchy_solution, CauchyProblem, CauchyValue};
pub use collocation::{
    clustered_boundary_points, parabolic_boundary_points, solve_ibvp, BoundaryPoint,
    CollocationSolution, IBVProblem, MeshEvaluation, PointPlacement, Segment, SolveParams,
};
pub use error::{Error, Result};
pub use fdm::{crank_nicolson, FdMesh};
pub use formal_powers::FormalPowersBasis;
pub use grid::{chebyshev_nodes, Grid, GridFunction, InterpPoint, DEFAULT_NONVANISHING_EPS};
pub use heat_basis::{heat_polynomial, heat_polynomial_dt, heat_polynomial_dx, TransmutedHeatBasis};
pub use lsq::{default_rcond, singular_values, svd_least_squares, ComplexMatrix, LeastSquaresReport};
pub use spps::{nonvanishing_solution, solve_ivp_series, AlphaStrategy, ParticularSolution};

use num_complex::Complex64;
use std::sync::Arc;

/// A scalar function of the space variable, e.g. the potential `q` or the
/// initial datum.
pub type ScalarFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// A scalar function of space and time, used for exact solutions.
pub type SpaceTimeFn = Arc<dyn Fn(f64, f64) -> Complex64 + Send + Sync>;

/// Provider of data derivatives for the Cauchy solver: `(j, t)` maps to the
/// j-th derivative at `t`.
pub type DerivativeProvider = Arc<dyn Fn(usize, f64) -> Complex64 + Send + Sync>;

/// Wraps a real-valued function as a [`ScalarFn`].
pub fn real_fn(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> ScalarFn {
    Arc::new(move |x| Complex64::new(f(x), 0.0))
}

/// Wraps a real-valued function of `(x, t)` as a [`SpaceTimeFn`].
pub fn real_fn2(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> SpaceTimeFn {
    Arc::new(move |x, t| Complex64::new(f(x, t), 0.0))
}
