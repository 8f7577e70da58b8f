//! Recurrent integrals and the formal powers associated with a nonvanishing
//! particular solution.
//!
//! Two families of iterated integrals are built from the squared solution:
//!
//! ```text
//! X^(0) = 1,   X^(n)(x)  = n * int_0^x X^(n-1)(s)  * (f^2(s))^(+-1) ds
//! Xt^(0) = 1,  Xt^(n)(x) = n * int_0^x Xt^(n-1)(s) * (f^2(s))^(-+1) ds
//! ```
//!
//! where the `X` family uses `f^-2` for odd `n` and `f^2` for even `n`, and
//! the `Xt` family the opposite parity. The formal power of index `k` is
//! `f * X^(k)` for odd `k` and `f * Xt^(k)` for even `k`; it plays the role
//! of `x^k` for the operator `d^2/dx^2 - q`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::spps::ParticularSolution;

/// Picks the integral weight for step `n`: the exponent of `f^2` alternates
/// with `n`, and the two families are offset by one parity.
fn step_weight(ps: &ParticularSolution, n: usize, tilde: bool) -> &GridFunction {
    let n_even = n.is_multiple_of(2);
    let inverse = if tilde { n_even } else { !n_even };
    if inverse {
        ps.f_inv_squared()
    } else {
        ps.f_squared()
    }
}

/// Builds both families of recurrent integrals up to index `highest`.
pub fn recurrent_integrals(
    ps: &ParticularSolution,
    highest: usize,
) -> (Vec<GridFunction>, Vec<GridFunction>) {
    let one = GridFunction::constant(ps.grid(), Complex64::new(1.0, 0.0));
    let mut plain = Vec::with_capacity(highest + 1);
    let mut tilde = Vec::with_capacity(highest + 1);
    plain.push(one.clone());
    tilde.push(one);
    for n in 1..=highest {
        let scale = Complex64::new(n as f64, 0.0);
        let next_plain = plain[n - 1]
            .mul(step_weight(ps, n, false))
            .antiderivative_from_zero()
            .scale(scale);
        plain.push(next_plain);
        let next_tilde = tilde[n - 1]
            .mul(step_weight(ps, n, true))
            .antiderivative_from_zero()
            .scale(scale);
        tilde.push(next_tilde);
    }
    (plain, tilde)
}

/// The family of formal powers `phi_0 .. phi_K` together with the recurrent
/// integrals they were assembled from. Immutable after construction.
#[derive(Debug, Clone)]
pub struct FormalPowersBasis {
    ps: ParticularSolution,
    phi: Vec<GridFunction>,
    x_plain: Vec<GridFunction>,
    x_tilde: Vec<GridFunction>,
}

impl FormalPowersBasis {
    /// Builds the formal powers up to index `highest`.
    pub fn build(ps: ParticularSolution, highest: usize) -> Self {
        let (x_plain, x_tilde) = recurrent_integrals(&ps, highest);
        let f = ps.f();
        let phi = (0..=highest)
            .map(|k| {
                if k % 2 == 1 {
                    f.mul(&x_plain[k])
                } else {
                    f.mul(&x_tilde[k])
                }
            })
            .collect();
        FormalPowersBasis { ps, phi, x_plain, x_tilde }
    }

    /// Highest available power index.
    pub fn max_index(&self) -> usize {
        self.phi.len() - 1
    }

    pub fn particular_solution(&self) -> &ParticularSolution {
        &self.ps
    }

    pub fn grid(&self) -> &std::sync::Arc<crate::grid::Grid> {
        self.ps.grid()
    }

    /// The formal power of index `k`.
    pub fn phi(&self, k: usize) -> &GridFunction {
        &self.phi[k]
    }

    /// Recurrent integral `X^(n)`.
    pub fn x_integral(&self, n: usize) -> &GridFunction {
        &self.x_plain[n]
    }

    /// Recurrent integral `Xt^(n)`.
    pub fn x_tilde_integral(&self, n: usize) -> &GridFunction {
        &self.x_tilde[n]
    }

    /// The even formal power of index `2j` associated with the companion
    /// solution `g` (`g(0) = 1`, `g'(0) = 0`): `phi_2j - alpha/(2j+1) phi_2j+1`.
    pub fn alpha_corrected_power(&self, j: usize) -> Result<GridFunction> {
        let odd = 2 * j + 1;
        if odd > self.max_index() {
            return Err(Error::IndexOutOfRange { index: odd, max: self.max_index() });
        }
        let factor = self.ps.alpha() / Complex64::new(odd as f64, 0.0);
        Ok(self.phi[2 * j].sub(&self.phi[odd].scale(factor)))
    }

    /// Formats the samples of `phi_k` as CSV (`x,re_phi,im_phi`) for
    /// debugging.
    pub fn phi_csv(&self, k: usize) -> Result<String> {
        if k > self.max_index() {
            return Err(Error::IndexOutOfRange { index: k, max: self.max_index() });
        }
        let mut out = String::from("x,re_phi,im_phi\n");
        let phi = &self.phi[k];
        for (j, &x) in self.grid().nodes().iter().enumerate() {
            let v = phi.value_at_node(j);
            out.push_str(&format!("{},{:.15e},{:.15e}\n", x, v.re, v.im));
        }
        Ok(out)
    }
}
