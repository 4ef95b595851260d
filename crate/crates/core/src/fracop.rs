//! The two-sided fractional diffusion operator `L^α_r` in spectral form.
//!
//! With `β` fixed by Condition A, the operator maps
//! `ρ^(α-β,β) G̃_k^(α-β,β)` to `λ_k G̃_k^(β,α-β)`, so forward application and
//! inversion are diagonal in the pair of bases.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{lgamma_pos, WeightPair};
use crate::spectral::SpectralFunction;

const BISECTION_WIDTH: f64 = 1e-14;
const RESIDUAL_TOL: f64 = 1e-12;
const BASIS_TOL: f64 = 1e-12;

/// `(α, r)` together with the derived exponent `β` and constant `c**`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorParams {
    pub alpha: f64,
    pub r: f64,
    pub beta: f64,
    pub c_star_star: f64,
}

impl OperatorParams {
    /// Shorthand for [`condition_a_beta`].
    pub fn new(alpha: f64, r: f64) -> Result<Self> {
        condition_a_beta(alpha, r)
    }

    /// Weight `(α-β, β)` of the trial functions and of `φ`.
    pub fn trial_basis(&self) -> WeightPair {
        WeightPair::new(self.alpha - self.beta, self.beta).expect("α-β and β lie in (0, 1]")
    }

    /// Weight `(β, α-β)` of the test functions and of the data `f`.
    pub fn test_basis(&self) -> WeightPair {
        self.trial_basis().swapped()
    }
}

/// `g(β) = sin πβ / (sin π(α-β) + sin πβ)`.
fn condition_a_ratio(alpha: f64, beta: f64) -> f64 {
    let sb = (PI * beta).sin();
    sb / ((PI * (alpha - beta)).sin() + sb)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::domain(format!("alpha must lie in (1, 2), got {alpha}")));
    }
    Ok(())
}

/// Solve Condition A, `g(β) = r` on `[α-1, 1]`, by bisection.
///
/// `g` falls from 1 at `β = α-1` to 0 at `β = 1`. The endpoints are
/// returned exactly for `r ∈ {0, 1}`, and `r = 1/2` gives `α/2` exactly.
pub fn condition_a_beta(alpha: f64, r: f64) -> Result<OperatorParams> {
    check_alpha(alpha)?;
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::domain(format!("r must lie in [0, 1], got {r}")));
    }
    let beta = if r == 0.0 {
        1.0
    } else if r == 1.0 {
        alpha - 1.0
    } else if r == 0.5 {
        0.5 * alpha
    } else {
        let (mut lo, mut hi) = (alpha - 1.0, 1.0);
        while hi - lo > BISECTION_WIDTH {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if condition_a_ratio(alpha, mid) > r {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let residual = (condition_a_ratio(alpha, beta) - r).abs();
    if residual > RESIDUAL_TOL {
        return Err(Error::Numeric(format!(
            "Condition A residual {residual:e} at alpha = {alpha}, r = {r}"
        )));
    }
    Ok(OperatorParams { alpha, r, beta, c_star_star: c_star_star(alpha, beta)? })
}

/// `c** = sin πα / (sin π(α-β) + sin πβ)`.
pub fn c_star_star(alpha: f64, beta: f64) -> Result<f64> {
    let den = (PI * (alpha - beta)).sin() + (PI * beta).sin();
    if den.abs() < 1e-15 {
        return Err(Error::domain(format!(
            "degenerate parameters: sin(pi(alpha-beta)) + sin(pi beta) = {den:e} at alpha = {alpha}, beta = {beta}"
        )));
    }
    Ok((PI * alpha).sin() / den)
}

/// `λ_0, ..., λ_N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSequence {
    pub lambdas: Vec<f64>,
}

impl EigenSequence {
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn get(&self, k: usize) -> f64 {
        self.lambdas[k]
    }
}

/// `λ_k = -c** Γ(k+1+α)/Γ(k+1)` for `k = 0..=n`.
pub fn eigenvalues(p: &OperatorParams, n: usize) -> EigenSequence {
    let lambdas = (0..=n)
        .map(|k| {
            let k = k as f64;
            -p.c_star_star * (lgamma_pos(k + 1.0 + p.alpha) - lgamma_pos(k + 1.0)).exp()
        })
        .collect();
    EigenSequence { lambdas }
}

fn same_basis(got: WeightPair, want: WeightPair) -> bool {
    (got.a() - want.a()).abs() <= BASIS_TOL && (got.b() - want.b()).abs() <= BASIS_TOL
}

fn expect_basis(what: &str, got: WeightPair, want: WeightPair) -> Result<()> {
    if !same_basis(got, want) {
        return Err(Error::Contract(format!("{what} must be in basis {want}, got {got}")));
    }
    Ok(())
}

/// Coefficients of `L^α_r(ρ^(α-β,β) φ)` in the basis `(β, α-β)`.
pub fn apply_operator(p: &OperatorParams, phi: &SpectralFunction) -> Result<SpectralFunction> {
    expect_basis("phi", phi.basis(), p.trial_basis())?;
    let lam = eigenvalues(p, phi.len().saturating_sub(1));
    let coeffs = phi.coeffs().iter().zip(&lam.lambdas).map(|(c, l)| l * c).collect();
    SpectralFunction::new(p.test_basis(), coeffs)
}

/// `φ` with `L^α_r(ρ^(α-β,β) φ) = f`, i.e. `φ_k = f_k / λ_k`.
pub fn diffusion_solve(p: &OperatorParams, f: &SpectralFunction) -> Result<SpectralFunction> {
    expect_basis("f", f.basis(), p.test_basis())?;
    let lam = eigenvalues(p, f.len().saturating_sub(1));
    let coeffs = f.coeffs().iter().zip(&lam.lambdas).map(|(c, l)| c / l).collect();
    SpectralFunction::new(p.trial_basis(), coeffs)
}
