//! Jacobi coefficients of functions on (0, 1) and the weighted Sobolev
//! norms built from them.

mod function;
mod kfunctional;
mod slobodeckij;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::specfun::{gauss_jacobi_rule, log_norm_sq, pochhammer, JacobiBasis, WeightPair};

pub use function::{power_function, RealFunction, WithDerivatives};
pub use kfunctional::{c_theta, k_functional_norm};
pub use slobodeckij::{
    full_weighted_norm, full_weighted_norm_with, slobodeckij_seminorm, slobodeckij_seminorm_with,
    weighted_l2_norm, weighted_norm_is_finite, GradedRule,
};

/// `v(x) = sum_j coeffs[j] G̃_j^(a,b)(x)`, truncated at `N = coeffs.len() - 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralFunction {
    basis: WeightPair,
    coeffs: Vec<f64>,
}

impl SpectralFunction {
    pub fn new(basis: WeightPair, coeffs: Vec<f64>) -> Result<Self> {
        if let Some(j) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::domain(format!("coefficient {j} is not finite")));
        }
        Ok(Self { basis, coeffs })
    }

    /// The zero function with `len` coefficients.
    pub fn zeros(basis: WeightPair, len: usize) -> Self {
        Self { basis, coeffs: vec![0.0; len] }
    }

    /// The single mode `G̃_m` in a vector of length `len`.
    pub fn unit(basis: WeightPair, m: usize, len: usize) -> Self {
        let mut coeffs = vec![0.0; len.max(m + 1)];
        coeffs[m] = 1.0;
        Self { basis, coeffs }
    }

    pub fn basis(&self) -> WeightPair {
        self.basis
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Evaluator that reuses the recurrence tables across many points.
    pub fn evaluator(&self) -> Synthesizer<'_> {
        Synthesizer { basis: JacobiBasis::new(self.basis, self.coeffs.len()), coeffs: &self.coeffs }
    }
}

/// Repeated point evaluation of a [`SpectralFunction`].
pub struct Synthesizer<'a> {
    basis: JacobiBasis,
    coeffs: &'a [f64],
}

impl Synthesizer<'_> {
    pub fn eval(&self, x: f64) -> f64 {
        self.basis.clenshaw(self.coeffs, x)
    }
}

impl RealFunction for SpectralFunction {
    fn eval(&self, x: f64) -> Result<f64> {
        synthesize(self, x)
    }

    fn eval_derivative(&self, order: usize, x: f64) -> Result<f64> {
        synthesize(&derived_coeffs(self, order), x)
    }
}

/// Coefficients `v_j = ∫ ρ^(a,b) f G̃_j`, j = 0..=n, by a `q`-point
/// Gauss-Jacobi rule.
pub fn analyze<F: RealFunction + ?Sized>(f: &F, w: WeightPair, n: usize, q: usize) -> Result<SpectralFunction> {
    if q < n + 9 {
        return Err(Error::domain(format!("quadrature order {q} too small for N = {n}; need at least N + 9")));
    }
    let rule = gauss_jacobi_rule(q, w)?;
    let basis = JacobiBasis::new(w, n);
    let mut acc = vec![CompensatedSum::new(); n + 1];
    let mut vals = vec![0.0; n + 1];
    for (&x, &wt) in rule.nodes().iter().zip(rule.weights()) {
        let fx = f.eval(x)?;
        basis.orthonormal_values(x, &mut vals);
        for (a, p) in acc.iter_mut().zip(&vals) {
            a.add(wt * fx * p);
        }
    }
    SpectralFunction::new(w, acc.iter().map(CompensatedSum::value).collect())
}

/// `sum_j v_j G̃_j(x)` by Clenshaw's recurrence.
pub fn synthesize(v: &SpectralFunction, x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("synthesize needs x in [0, 1], got {x}")));
    }
    Ok(v.evaluator().eval(x))
}

/// `(sum_j (1 + j²)^s v_j²)^(1/2)`; for `s < 0` this is the dual norm.
pub fn sobolev_norm(v: &SpectralFunction, s: f64) -> f64 {
    let mut acc = CompensatedSum::new();
    for (j, c) in v.coeffs.iter().enumerate() {
        let j = j as f64;
        acc.add((1.0 + j * j).powf(s) * c * c);
    }
    acc.value().sqrt()
}

/// `Dv` expressed in the basis `(a+1, b+1)`.
pub fn derivative_map(v: &SpectralFunction) -> SpectralFunction {
    derived_coeffs(v, 1)
}

/// Coefficients of `D^k v` in the basis `(a+k, b+k)`:
/// `v^(k)_{j-k} = |‖G_{j-k}^(a+k,b+k)‖| / |‖G_j^(a,b)‖| · Γ(j+k+a+b+1)/Γ(j+a+b+1) · v_j`.
pub fn derived_coeffs(v: &SpectralFunction, k: usize) -> SpectralFunction {
    if k == 0 {
        return v.clone();
    }
    let basis = v.basis.shifted(k);
    if v.coeffs.is_empty() {
        return SpectralFunction { basis, coeffs: Vec::new() };
    }
    if k >= v.coeffs.len() {
        return SpectralFunction { basis, coeffs: vec![0.0] };
    }
    let (a, b) = (v.basis.a(), v.basis.b());
    let coeffs = (k..v.coeffs.len())
        .map(|j| {
            let ratio = (0.5 * (log_norm_sq(j - k, a + k as f64, b + k as f64) - log_norm_sq(j, a, b))).exp();
            ratio * pochhammer(j as f64 + a + b + 1.0, k) * v.coeffs[j]
        })
        .collect();
    SpectralFunction { basis, coeffs }
}
