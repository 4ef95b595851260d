use super::SpectralFunction;
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::specfun::{gauss_jacobi_rule, WeightPair};

const T_MIN: f64 = 1e-8;
const T_MAX: f64 = 1e8;
const PANELS: usize = 400;
const PANEL_POINTS: usize = 8;

/// `C_θ = (∫_0^∞ τ^(1-2θ)/(1+τ²) dτ)^(1/2) = (π / (2 sin πθ))^(1/2)`.
pub fn c_theta(theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::domain(format!("theta must lie in (0, 1), got {theta}")));
    }
    Ok((std::f64::consts::PI / (2.0 * (std::f64::consts::PI * theta).sin())).sqrt())
}

/// Interpolation norm between `H^(n-1)` and `H^n` at `s = n - 1 + θ`:
/// `(∫_0^∞ t^(-2θ) K̃(t, v)² dt/t)^(1/2)` with
/// `K̃(t, v)² = sum_k t²(1+k²)^n v_k² / (1 + t²(1+k²))`.
///
/// The integral over `[1e-8, 1e8]` uses 400 Gauss panels in `ln t`. The
/// two tails are added in closed form from the leading behaviour of `K̃²`
/// (`t² sum (1+k²)^n v_k²` below, `sum (1+k²)^(n-1) v_k²` above).
pub fn k_functional_norm(v: &SpectralFunction, s: f64, n: usize) -> Result<f64> {
    let theta = s - (n as f64 - 1.0);
    if n == 0 || !(theta > 0.0 && theta < 1.0) {
        return Err(Error::domain(format!("need n - 1 < s < n with n >= 1, got s = {s}, n = {n}")));
    }
    let nf = n as f64;
    let terms: Vec<(f64, f64)> = v
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(k, c)| {
            let m = 1.0 + (k as f64) * (k as f64);
            (m, m.powf(nf) * c * c)
        })
        .collect();

    let k_sq = |t: f64| {
        let t2 = t * t;
        let mut acc = CompensatedSum::new();
        for &(m, wk) in &terms {
            acc.add(t2 * wk / (1.0 + t2 * m));
        }
        acc.value()
    };

    let rule = gauss_jacobi_rule(PANEL_POINTS, WeightPair::new(0.0, 0.0)?)?;
    let (lo, hi) = (T_MIN.ln(), T_MAX.ln());
    let width = (hi - lo) / PANELS as f64;
    let mut total = CompensatedSum::new();
    for p in 0..PANELS {
        let start = lo + p as f64 * width;
        for (&u, &wt) in rule.nodes().iter().zip(rule.weights()) {
            let l = start + u * width;
            let t = l.exp();
            total.add(width * wt * (-2.0 * theta * l).exp() * k_sq(t));
        }
    }

    let head: f64 = terms.iter().map(|&(_, wk)| wk).sum();
    let tail: f64 = terms.iter().map(|&(m, wk)| wk / m).sum();
    total.add(head * T_MIN.powf(2.0 - 2.0 * theta) / (2.0 - 2.0 * theta));
    total.add(tail * T_MAX.powf(-2.0 * theta) / (2.0 * theta));
    Ok(total.value().sqrt())
}
