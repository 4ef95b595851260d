//! Special functions on (0, 1): log-gamma, shifted Jacobi polynomials
//! `G_n^(a,b)(x) = P_n^(a,b)(2x - 1)` and Gauss-Jacobi quadrature.

mod gamma;
mod jacobi;
mod quadrature;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use gamma::{gamma, log_gamma};
pub(crate) use gamma::{lgamma_pos, pochhammer};
pub(crate) use jacobi::log_norm_sq;
pub use jacobi::{
    jacobi_deriv_coeff, jacobi_eval, jacobi_norm, weighted_deriv_identity_coeff, JacobiBasis,
};
pub use quadrature::{gauss_jacobi_rule, nodes_for_degree, QuadratureRule};

/// Exponents of the weight `ρ^(a,b)(x) = (1 - x)^a x^b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "(f64, f64)", into = "(f64, f64)")]
pub struct WeightPair {
    a: f64,
    b: f64,
}

impl WeightPair {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > -1.0 && b > -1.0) || !a.is_finite() || !b.is_finite() {
            return Err(Error::domain(format!(
                "weight exponents must satisfy a, b > -1, got ({a}, {b})"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// `(a + k, b + k)`, the basis of the k-th derivative.
    pub fn shifted(&self, k: usize) -> Self {
        Self { a: self.a + k as f64, b: self.b + k as f64 }
    }

    /// `(b, a)`.
    pub fn swapped(&self) -> Self {
        Self { a: self.b, b: self.a }
    }

    /// `ρ^(a,b)(x)`.
    pub fn weight(&self, x: f64) -> f64 {
        rho(self.a, self.b, x)
    }

    /// `∫_0^1 ρ^(a,b) = Γ(a+1)Γ(b+1)/Γ(a+b+2)`.
    pub fn total_mass(&self) -> f64 {
        (lgamma_pos(self.a + 1.0) + lgamma_pos(self.b + 1.0) - lgamma_pos(self.a + self.b + 2.0)).exp()
    }
}

impl TryFrom<(f64, f64)> for WeightPair {
    type Error = Error;
    fn try_from((a, b): (f64, f64)) -> Result<Self> {
        Self::new(a, b)
    }
}

impl From<WeightPair> for (f64, f64) {
    fn from(w: WeightPair) -> Self {
        (w.a, w.b)
    }
}

impl std::fmt::Display for WeightPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

/// `(1 - x)^a x^b` for arbitrary real exponents, with `0^0 = 1`.
pub(crate) fn rho(a: f64, b: f64, x: f64) -> f64 {
    let left = if a == 0.0 { 1.0 } else { (1.0 - x).powf(a) };
    let right = if b == 0.0 { 1.0 } else { x.powf(b) };
    left * right
}
