//! Sampled-function calculus on a Chebyshev–Gauss–Lobatto grid over `[-b, b]`.
//!
//! Functions are stored by their complex samples at the CGL nodes. Repeated
//! indefinite integration from the origin, pointwise arithmetic and
//! barycentric evaluation are the operations every recurrent-integral
//! construction in this crate is made of. Integration and differentiation go
//! through the Chebyshev coefficient space, so both are exact (to round-off)
//! on polynomial data and spectrally accurate on smooth data.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Threshold below which a function is considered to vanish numerically.
pub const DEFAULT_NONVANISHING_EPS: f64 = 1e-10;

/// Compensated (Kahan) accumulator for complex sums. The recurrent-integral
/// pipeline chains hundreds of length-`m` sums; naive accumulation leaves
/// random-walk round-off near 1e-13 that caps the collocation accuracy,
/// while compensation keeps each sum within a few ulps.
#[derive(Clone, Copy, Default)]
struct KahanComplex {
    sum_re: f64,
    sum_im: f64,
    c_re: f64,
    c_im: f64,
}

impl KahanComplex {
    #[inline]
    fn add(&mut self, v: Complex64) {
        let y = v.re - self.c_re;
        let t = self.sum_re + y;
        self.c_re = (t - self.sum_re) - y;
        self.sum_re = t;
        let y = v.im - self.c_im;
        let t = self.sum_im + y;
        self.c_im = (t - self.sum_im) - y;
        self.sum_im = t;
    }

    #[inline]
    fn value(&self) -> Complex64 {
        Complex64::new(self.sum_re, self.sum_im)
    }
}

/// Minimum node count accepted by [`Grid::chebyshev`].
pub const MIN_GRID_SIZE: usize = 16;

/// Chebyshev–Gauss–Lobatto nodes on `[-b, b]`, ordered from `b` down to `-b`.
///
/// Node `j` is `b * cos(pi * j / (m - 1))`, so both endpoints are included.
pub fn chebyshev_nodes(b: f64, m: usize) -> Vec<f64> {
    assert!(m >= 2, "need at least two nodes");
    let n = (m - 1) as f64;
    (0..m)
        .map(|j| {
            // evaluate symmetrically so the node set is exactly symmetric
            let theta = PI * j as f64 / n;
            let v = b * theta.cos();
            if 2 * j == m - 1 {
                0.0
            } else {
                v
            }
        })
        .collect()
}

/// A Chebyshev–Gauss–Lobatto grid on `[-b, b]`.
#[derive(Debug)]
pub struct Grid {
    b: f64,
    m: usize,
    nodes: Vec<f64>,
    /// Barycentric weights up to a common factor: (-1)^j, halved at the ends.
    bary: Vec<f64>,
    /// cos(pi * p / (m-1)) for p in 0..2(m-1); cos(pi*j*k/(m-1)) is looked up
    /// at p = j*k mod 2(m-1).
    cos_table: Vec<f64>,
}

impl Grid {
    /// Builds the CGL grid with `m` nodes on `[-b, b]`.
    pub fn chebyshev(b: f64, m: usize) -> Result<Arc<Self>> {
        if b.is_nan() || b <= 0.0 || !b.is_finite() {
            return Err(Error::Domain(format!("half-width must be positive, got {b}")));
        }
        if m < MIN_GRID_SIZE {
            return Err(Error::Domain(format!(
                "grid needs at least {MIN_GRID_SIZE} nodes, got {m}"
            )));
        }
        let nodes = chebyshev_nodes(b, m);
        let n = m - 1;
        let bary = (0..m)
            .map(|j| {
                let s = if j % 2 == 0 { 1.0 } else { -1.0 };
                if j == 0 || j == n {
                    0.5 * s
                } else {
                    s
                }
            })
            .collect();
        let cos_table = (0..2 * n).map(|p| (PI * p as f64 / n as f64).cos()).collect();
        Ok(Arc::new(Grid { b, m, nodes, bary, cos_table }))
    }

    pub fn half_width(&self) -> f64 {
        self.b
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    fn compatible(&self, other: &Grid) -> bool {
        self.m == other.m && self.b == other.b
    }

    #[inline]
    fn cos_jk(&self, j: usize, k: usize) -> f64 {
        self.cos_table[(j * k) % self.cos_table.len()]
    }

    /// Discrete Chebyshev transform: node samples to series coefficients.
    fn values_to_coeffs(&self, values: &[Complex64]) -> Vec<Complex64> {
        let n = self.m - 1;
        let mut coeffs = Vec::with_capacity(self.m);
        for k in 0..self.m {
            let mut acc = KahanComplex::default();
            for (j, &v) in values.iter().enumerate() {
                let w = if j == 0 || j == n { 0.5 } else { 1.0 };
                acc.add(v * (w * self.cos_jk(j, k)));
            }
            let dk = if k == 0 || k == n { 2.0 } else { 1.0 };
            coeffs.push(acc.value() * (2.0 / (dk * n as f64)));
        }
        coeffs
    }

    /// Evaluates a Chebyshev series at the grid nodes. The series may carry
    /// more coefficients than the grid has nodes (integration raises the
    /// degree by one); extra terms alias consistently onto the node values.
    fn coeffs_to_values(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        (0..self.m)
            .map(|j| {
                let mut acc = KahanComplex::default();
                for (k, &c) in coeffs.iter().enumerate() {
                    acc.add(c * self.cos_jk(j, k));
                }
                acc.value()
            })
            .collect()
    }

    /// Where a point sits for barycentric evaluation: exactly on a node, or
    /// between nodes with precomputed normalized weights. Reusable across any
    /// number of grid functions on the same grid.
    pub fn locate(&self, x: f64) -> Result<InterpPoint> {
        let tol = 1e-12 * self.b;
        if x.abs() > self.b + tol {
            return Err(Error::OutsideInterval { x, lo: -self.b, hi: self.b });
        }
        let x = x.clamp(-self.b, self.b);
        let mut weights = Vec::with_capacity(self.m);
        let mut total = 0.0;
        for (j, &xj) in self.nodes.iter().enumerate() {
            if x == xj {
                return Ok(InterpPoint::Node(j));
            }
            let w = self.bary[j] / (x - xj);
            weights.push(w);
            total += w;
        }
        for w in &mut weights {
            *w /= total;
        }
        Ok(InterpPoint::Weights(weights))
    }
}

/// Result of [`Grid::locate`]: either a node index or normalized barycentric
/// weights for a point strictly between nodes.
#[derive(Debug, Clone)]
pub enum InterpPoint {
    Node(usize),
    Weights(Vec<f64>),
}

/// A complex-valued function sampled at the nodes of a [`Grid`].
///
/// Values are immutable after construction; every operation returns a new
/// function, so sharing across threads is safe.
#[derive(Debug, Clone)]
pub struct GridFunction {
    grid: Arc<Grid>,
    values: Vec<Complex64>,
}

impl GridFunction {
    /// Wraps existing samples; the sample count must match the grid.
    pub fn from_values(grid: Arc<Grid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.m {
            return Err(Error::Domain(format!(
                "expected {} samples, got {}",
                grid.m,
                values.len()
            )));
        }
        Ok(GridFunction { grid, values })
    }

    /// Samples a scalar function at the grid nodes.
    pub fn sample(grid: &Arc<Grid>, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.nodes.iter().map(|&x| f(x)).collect();
        GridFunction { grid: Arc::clone(grid), values }
    }

    /// Samples a real-valued function at the grid nodes.
    pub fn sample_real(grid: &Arc<Grid>, f: impl Fn(f64) -> f64) -> Self {
        Self::sample(grid, |x| Complex64::new(f(x), 0.0))
    }

    /// The constant function.
    pub fn constant(grid: &Arc<Grid>, c: Complex64) -> Self {
        GridFunction { grid: Arc::clone(grid), values: vec![c; grid.m] }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value_at_node(&self, j: usize) -> Complex64 {
        self.values[j]
    }

    /// Sup norm over the grid nodes.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Smallest modulus over the grid nodes.
    pub fn min_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min)
    }

    fn zip_with(&self, other: &GridFunction, f: impl Fn(Complex64, Complex64) -> Complex64) -> GridFunction {
        assert!(
            self.grid.compatible(&other.grid),
            "grid functions combined across different grids"
        );
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        GridFunction { grid: Arc::clone(&self.grid), values }
    }

    pub fn add(&self, other: &GridFunction) -> GridFunction {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &GridFunction) -> GridFunction {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &GridFunction) -> GridFunction {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: Complex64) -> GridFunction {
        let values = self.values.iter().map(|&v| v * c).collect();
        GridFunction { grid: Arc::clone(&self.grid), values }
    }

    pub fn square(&self) -> GridFunction {
        let values = self.values.iter().map(|&v| v * v).collect();
        GridFunction { grid: Arc::clone(&self.grid), values }
    }

    /// Pointwise reciprocal, guarded by the default nonvanishing threshold.
    pub fn reciprocal(&self) -> Result<GridFunction> {
        self.reciprocal_with_threshold(DEFAULT_NONVANISHING_EPS)
    }

    /// Pointwise reciprocal; fails if any sample modulus is at or below
    /// `threshold`.
    pub fn reciprocal_with_threshold(&self, threshold: f64) -> Result<GridFunction> {
        let min_abs = self.min_abs();
        if min_abs <= threshold {
            return Err(Error::NonvanishingViolation { min_abs, threshold });
        }
        let values = self.values.iter().map(|&v| v.inv()).collect();
        Ok(GridFunction { grid: Arc::clone(&self.grid), values })
    }

    /// The antiderivative `G(x) = integral from 0 to x of g`, computed by
    /// Chebyshev coefficient integration and re-sampled at the nodes.
    /// `G(0) = 0` and `G' = g` in the interpolant sense.
    pub fn antiderivative_from_zero(&self) -> GridFunction {
        let a = self.grid.values_to_coeffs(&self.values);
        let n = a.len() - 1;
        let mut out = vec![Complex64::ZERO; n + 2];
        let a2 = if n >= 2 { a[2] } else { Complex64::ZERO };
        out[1] = a[0] - 0.5 * a2;
        for k in 2..=n + 1 {
            let hi = if k < n { a[k + 1] } else { Complex64::ZERO };
            out[k] = (a[k - 1] - hi) / (2.0 * k as f64);
        }
        // pin G(0) = 0: T_k(0) is 0 for odd k and (-1)^(k/2) for even k
        let mut at_zero = Complex64::ZERO;
        for k in (2..=n + 1).step_by(2) {
            let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            at_zero += out[k] * sign;
        }
        out[0] = -at_zero;
        let scale = Complex64::new(self.grid.b, 0.0);
        for c in &mut out {
            *c *= scale;
        }
        let values = self.grid.coeffs_to_values(&out);
        GridFunction { grid: Arc::clone(&self.grid), values }
    }

    /// Spectral derivative. Trailing coefficients below round-off are dropped
    /// before differentiating, which keeps the noise amplification bounded by
    /// the function's true bandwidth instead of the grid size.
    pub fn derivative(&self) -> GridFunction {
        let a = self.grid.values_to_coeffs(&self.values);
        let max_a = a.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut last = 0;
        for (k, c) in a.iter().enumerate() {
            if c.norm() > 1e-15 * max_a {
                last = k;
            }
        }
        if last == 0 || max_a == 0.0 {
            return GridFunction::constant(&self.grid, Complex64::ZERO);
        }
        let n = last;
        let mut out = vec![Complex64::ZERO; n];
        out[n - 1] = a[n] * (2.0 * n as f64);
        if n >= 2 {
            out[n - 2] = a[n - 1] * (2.0 * (n - 1) as f64);
        }
        for k in (1..n.saturating_sub(1)).rev() {
            out[k - 1] = out[k + 1] + a[k] * (2.0 * k as f64);
        }
        out[0] *= 0.5;
        let inv_scale = Complex64::new(1.0 / self.grid.b, 0.0);
        for c in &mut out {
            *c *= inv_scale;
        }
        let values = self.grid.coeffs_to_values(&out);
        GridFunction { grid: Arc::clone(&self.grid), values }
    }

    /// Barycentric Chebyshev interpolation. At a node the stored sample is
    /// returned exactly.
    pub fn interpolate(&self, x: f64) -> Result<Complex64> {
        Ok(self.interpolate_at(&self.grid.locate(x)?))
    }

    /// Evaluation at a pre-located point (see [`Grid::locate`]).
    pub fn interpolate_at(&self, point: &InterpPoint) -> Complex64 {
        match point {
            InterpPoint::Node(j) => self.values[*j],
            InterpPoint::Weights(w) => {
                let mut acc = KahanComplex::default();
                for (wj, &v) in w.iter().zip(&self.values) {
                    acc.add(v * *wj);
                }
                acc.value()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(b: f64, m: usize) -> Arc<Grid> {
        Grid::chebyshev(b, m).unwrap()
    }

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn node_formula_small_counts() {
        let n3 = chebyshev_nodes(1.0, 3);
        assert_eq!(n3, vec![1.0, 0.0, -1.0]);
        let n3b = chebyshev_nodes(2.0, 3);
        assert_eq!(n3b, vec![2.0, 0.0, -2.0]);
        let n5 = chebyshev_nodes(1.0, 5);
        let s = 0.5_f64.sqrt();
        assert_close(n5[0], 1.0, 0.0);
        assert_close(n5[1], s, 1e-15);
        assert_close(n5[2], 0.0, 0.0);
        assert_close(n5[3], -s, 1e-15);
        assert_close(n5[4], -1.0, 0.0);
    }

    #[test]
    fn grid_rejects_bad_arguments() {
        assert!(Grid::chebyshev(0.0, 64).is_err());
        assert!(Grid::chebyshev(-1.0, 64).is_err());
        assert!(Grid::chebyshev(1.0, 8).is_err());
    }

    #[test]
    fn nodes_monotone_with_endpoints() {
        let g = grid(2.5, 33);
        let nodes = g.nodes();
        assert_eq!(nodes[0], 2.5);
        assert_eq!(nodes[32], -2.5);
        for w in nodes.windows(2) {
            assert!(w[0] > w[1]);
        }
    }

    #[test]
    fn sampling_basics() {
        let g = grid(1.0, 17);
        let sq = GridFunction::sample_real(&g, |x| x * x);
        for (j, &x) in g.nodes().iter().enumerate() {
            assert_eq!(sq.value_at_node(j), Complex64::new(x * x, 0.0));
        }
        let one = GridFunction::constant(&g, Complex64::new(1.0, 0.0));
        assert!(one.values().iter().all(|&v| v == Complex64::new(1.0, 0.0)));
        let e = GridFunction::sample_real(&g, f64::exp);
        // x = 0 is the middle node of an odd grid
        assert_eq!(e.value_at_node(8), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn antiderivative_of_one_is_x() {
        let g = grid(1.0, 16);
        let one = GridFunction::constant(&g, Complex64::new(1.0, 0.0));
        let integral = one.antiderivative_from_zero();
        for (j, &x) in g.nodes().iter().enumerate() {
            assert_close(integral.value_at_node(j).re, x, 1e-14);
            assert_close(integral.value_at_node(j).im, 0.0, 1e-14);
        }
    }

    #[test]
    fn antiderivative_of_x() {
        let g = grid(1.0, 16);
        let lin = GridFunction::sample_real(&g, |x| x);
        let integral = lin.antiderivative_from_zero();
        assert_close(integral.value_at_node(0).re, 0.5, 1e-14);
    }

    #[test]
    fn antiderivative_of_exp2x() {
        // integral of e^(2x) from 0 to 1 is (e^2 - 1) / 2
        let g = grid(1.0, 64);
        let f = GridFunction::sample_real(&g, |x| (2.0 * x).exp());
        let integral = f.antiderivative_from_zero();
        let expected = (std::f64::consts::E.powi(2) - 1.0) / 2.0;
        assert_close(integral.value_at_node(0).re, expected, 1e-12);
    }

    #[test]
    fn polynomial_antidifferentiation_is_exact() {
        let m = 64;
        let g = grid(1.0, m);
        for p in 0..=(m - 2) as i32 {
            let f = GridFunction::sample_real(&g, |x| x.powi(p));
            let integral = f.antiderivative_from_zero();
            let scale = 1.0 / (p as f64 + 1.0);
            for (j, &x) in g.nodes().iter().enumerate() {
                let expected = x.powi(p + 1) * scale;
                let got = integral.value_at_node(j).re;
                assert!(
                    (got - expected).abs() <= 1e-12 * scale.max(1.0),
                    "p = {p}, node {j}: {got} vs {expected}"
                );
            }
        }
    }

    #[test]
    fn fundamental_theorem_round_trip() {
        let g = grid(1.0, 64);
        let f = GridFunction::sample_real(&g, |x| x.exp() * (2.0 * x).cos());
        let back = f.antiderivative_from_zero().derivative();
        let scale = f.max_abs();
        for j in 0..g.len() {
            let err = (back.value_at_node(j) - f.value_at_node(j)).norm();
            assert!(err <= 1e-8 * scale, "node {j}: err {err:.3e}");
        }
    }

    #[test]
    fn pointwise_ops() {
        let g = grid(1.0, 64);
        let one = GridFunction::constant(&g, Complex64::new(1.0, 0.0));
        let rec = one.reciprocal().unwrap();
        assert!(rec.values().iter().all(|&v| v == Complex64::new(1.0, 0.0)));

        let lin = GridFunction::sample_real(&g, |x| x);
        assert_eq!(lin.square().value_at_node(0), Complex64::new(1.0, 0.0));

        let ep = GridFunction::sample_real(&g, f64::exp);
        let em = GridFunction::sample_real(&g, |x| (-x).exp());
        let prod = ep.mul(&em);
        for &v in prod.values() {
            assert!((v - Complex64::new(1.0, 0.0)).norm() <= 1e-13);
        }
    }

    #[test]
    fn reciprocal_guards_vanishing() {
        // odd node count puts a node exactly at the origin
        let g = grid(1.0, 33);
        let lin = GridFunction::sample_real(&g, |x| x);
        match lin.reciprocal() {
            Err(Error::NonvanishingViolation { .. }) => {}
            other => panic!("expected nonvanishing violation, got {other:?}"),
        }
        // a function clear of the threshold inverts fine
        let shifted = GridFunction::sample_real(&g, |x| x + 2.0);
        assert!(shifted.reciprocal().is_ok());
    }

    #[test]
    fn interpolation_matches_samples_and_values() {
        let g = grid(1.0, 32);
        let sq = GridFunction::sample_real(&g, |x| x * x);
        let v = sq.interpolate(0.3).unwrap();
        assert_close(v.re, 0.09, 1e-13);
        assert_close(v.im, 0.0, 1e-13);
        // node hit returns the stored sample bit for bit
        for (j, &x) in g.nodes().iter().enumerate() {
            assert_eq!(sq.interpolate(x).unwrap(), sq.value_at_node(j));
        }

        let g64 = grid(1.0, 64);
        let e = GridFunction::sample_real(&g64, f64::exp);
        let v = e.interpolate(0.5).unwrap();
        assert_close(v.re, 0.5_f64.exp(), 1e-12);
    }

    #[test]
    fn interpolation_domain_check() {
        let g = grid(1.0, 32);
        let f = GridFunction::constant(&g, Complex64::new(1.0, 0.0));
        assert!(f.interpolate(1.0 + 1e-9).is_err());
        // within the 1e-12 * b tolerance the point clamps to the endpoint
        assert!(f.interpolate(1.0 + 1e-13).is_ok());
    }

    #[test]
    fn derivative_of_cubic() {
        let g = grid(1.0, 32);
        let f = GridFunction::sample_real(&g, |x| x * x * x);
        let d = f.derivative();
        for (j, &x) in g.nodes().iter().enumerate() {
            assert_close(d.value_at_node(j).re, 3.0 * x * x, 1e-12);
        }
    }
}
