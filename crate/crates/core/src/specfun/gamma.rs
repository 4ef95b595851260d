//! Log-gamma on the positive real axis.
//!
//! Three regimes:
//! - `z >= 10`: Stirling's asymptotic series, 7 correction terms.
//! - `z` within 1/2 of 1 or 2: the Taylor series of `ln Γ(1 + x)`
//!   written in terms of `ζ(k) - 1`, which converges like `(x/2)^k`.
//! - everything else is moved into one of those windows with the
//!   recurrence `Γ(z + 1) = z Γ(z)`.

use std::sync::OnceLock;

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_7;
const SERIES_TERMS: usize = 40;

// B_2, B_4, ..., B_14
const BERNOULLI: [f64; 7] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
];

/// `ζ(k) - 1` for `k = 0..=SERIES_TERMS` (entries 0 and 1 unused).
fn zeta_minus_one() -> &'static [f64; SERIES_TERMS + 1] {
    static TABLE: OnceLock<[f64; SERIES_TERMS + 1]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = [0.0; SERIES_TERMS + 1];
        for (k, slot) in table.iter_mut().enumerate().skip(2) {
            *slot = zeta_tail(k as f64);
        }
        table
    })
}

/// Euler-Maclaurin evaluation of `sum_{n >= 2} n^-s` with cut-off 20.
fn zeta_tail(s: f64) -> f64 {
    const M: f64 = 20.0;
    // Correction terms first: they are the smallest.
    let mut corr = 0.0;
    let mut rising = s; // s (s+1) ... (s + 2j - 2)
    let mut fact = 2.0; // (2j)!
    let mut terms = Vec::with_capacity(BERNOULLI.len());
    for (j, b) in BERNOULLI.iter().enumerate() {
        let two_j = 2.0 * (j as f64 + 1.0);
        terms.push(b / fact * rising * M.powf(-s - two_j + 1.0));
        rising *= (s + two_j - 1.0) * (s + two_j);
        fact *= (two_j + 1.0) * (two_j + 2.0);
    }
    for t in terms.iter().rev() {
        corr += t;
    }
    let mut sum = corr + 0.5 * M.powf(-s) + M.powf(1.0 - s) / (s - 1.0);
    for n in (2..20).rev() {
        sum += (n as f64).powf(-s);
    }
    sum
}

/// `sum_{k >= 2} (-1)^k (ζ(k) - 1) x^k / k` for `|x| <= 1/2`.
fn zeta_series(x: f64) -> f64 {
    let table = zeta_minus_one();
    let mut acc = 0.0;
    for k in (2..=SERIES_TERMS).rev() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        acc = acc * x + sign * table[k] / k as f64;
    }
    acc * x * x
}

fn stirling(z: f64) -> f64 {
    const C: [f64; 7] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
    ];
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut series = 0.0;
    for c in C.iter().rev() {
        series = series * inv2 + c;
    }
    (z - 0.5) * z.ln() - z + HALF_LN_2PI + series * inv
}

/// Natural logarithm of the gamma function for `z > 0`.
pub fn log_gamma(z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::domain(format!("log_gamma requires finite z > 0, got {z}")));
    }
    Ok(lgamma_pos(z))
}

/// `ln Γ(z)` with no argument check; `z` must be positive and finite.
pub(crate) fn lgamma_pos(z: f64) -> f64 {
    if z >= 10.0 {
        return stirling(z);
    }
    if z < 0.5 {
        return lgamma_pos(z + 1.0) - z.ln();
    }
    if z <= 1.5 {
        let x = z - 1.0;
        return x * (1.0 - EULER_GAMMA) + zeta_series(x) - x.ln_1p();
    }
    if z <= 2.5 {
        let x = z - 2.0;
        return x * (1.0 - EULER_GAMMA) + zeta_series(x);
    }
    let mut w = z;
    let mut prod = 1.0;
    while w > 2.5 {
        w -= 1.0;
        prod *= w;
    }
    lgamma_pos(w) + prod.ln()
}

/// Γ(z) for `z > 0`.
pub fn gamma(z: f64) -> Result<f64> {
    log_gamma(z).map(f64::exp)
}

/// `Γ(x + k) / Γ(x)`: an exact product for small `k`, log differences
/// otherwise. Requires `x > 0`.
pub(crate) fn pochhammer(x: f64, k: usize) -> f64 {
    if k <= 32 {
        let mut p = 1.0;
        for i in 0..k {
            p *= x + i as f64;
        }
        p
    } else {
        (lgamma_pos(x + k as f64) - lgamma_pos(x)).exp()
    }
}
