use super::{lgamma_pos, pochhammer, WeightPair};
use crate::error::{Error, Result};

/// `G_n^(a,b)(x)` by the classical three-term recurrence in `t = 2x - 1`.
pub fn jacobi_eval(n: usize, w: WeightPair, x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("jacobi_eval needs x in [0, 1], got {x}")));
    }
    Ok(jacobi_eval_unchecked(n, w.a(), w.b(), x))
}

pub(crate) fn jacobi_eval_unchecked(n: usize, a: f64, b: f64, x: f64) -> f64 {
    let t = 2.0 * x - 1.0;
    if n == 0 {
        return 1.0;
    }
    let ab = a + b;
    let mut prev = 1.0;
    let mut cur = 0.5 * ((a - b) + (ab + 2.0) * t);
    for m in 2..=n {
        let m = m as f64;
        let s = 2.0 * m + ab;
        let c1 = 2.0 * m * (m + ab) * (s - 2.0);
        let c2 = (s - 1.0) * (a * a - b * b);
        let c3 = (s - 2.0) * (s - 1.0) * s;
        let c4 = 2.0 * (m + a - 1.0) * (m + b - 1.0) * s;
        let next = ((c2 + c3 * t) * cur - c4 * prev) / c1;
        prev = cur;
        cur = next;
    }
    cur
}

/// `ln |‖G_n^(a,b)‖|²`.
pub(crate) fn log_norm_sq(n: usize, a: f64, b: f64) -> f64 {
    if n == 0 {
        // the general formula contains Γ(a+b+1)/(a+b+1), singular at a+b = -1
        return lgamma_pos(a + 1.0) + lgamma_pos(b + 1.0) - lgamma_pos(a + b + 2.0);
    }
    let j = n as f64;
    lgamma_pos(j + a + 1.0) + lgamma_pos(j + b + 1.0)
        - (2.0 * j + a + b + 1.0).ln()
        - lgamma_pos(j + 1.0)
        - lgamma_pos(j + a + b + 1.0)
}

/// `|‖G_n^(a,b)‖|`, the L² norm of `G_n^(a,b)` against `ρ^(a,b)` on (0, 1).
pub fn jacobi_norm(n: usize, w: WeightPair) -> f64 {
    (0.5 * log_norm_sq(n, w.a(), w.b())).exp()
}

/// `Γ(n+k+a+b+1)/Γ(n+a+b+1)`: `D^k G_n^(a,b)` is this factor times
/// `G_{n-k}^(a+k,b+k)`. Zero when `k > n`.
pub fn jacobi_deriv_coeff(n: usize, k: usize, w: WeightPair) -> f64 {
    if k > n {
        return 0.0;
    }
    if k == 0 {
        return 1.0;
    }
    pochhammer(n as f64 + w.a() + w.b() + 1.0, k)
}

/// `(-1)^k n!/(n-k)!`, the factor in
/// `D^k {ρ^(a+k,b+k) G_{n-k}^(a+k,b+k)} = factor · ρ^(a,b) G_n^(a,b)`.
pub fn weighted_deriv_identity_coeff(n: usize, k: usize) -> Result<f64> {
    if k > n {
        return Err(Error::domain(format!("need k <= n, got n={n}, k={k}")));
    }
    let mag = pochhammer((n - k) as f64 + 1.0, k);
    Ok(if k % 2 == 0 { mag } else { -mag })
}

/// Recurrence data for the orthonormal family `G̃_n = G_n/|‖G_n‖|` in `x`:
///
/// `x G̃_n = off[n+1] G̃_{n+1} + diag[n] G̃_n + off[n] G̃_{n-1}`
///
/// `off[0]` is unused.
#[derive(Debug, Clone)]
pub struct JacobiBasis {
    weight: WeightPair,
    diag: Vec<f64>,
    off: Vec<f64>,
    g0: f64,
}

impl JacobiBasis {
    /// Recurrence coefficients sufficient for degrees `0..=max_degree`
    /// (and for Clenshaw sums of `max_degree + 1` terms).
    pub fn new(weight: WeightPair, max_degree: usize) -> Self {
        let (a, b) = (weight.a(), weight.b());
        let ab = a + b;
        let len = max_degree + 3;
        let mut diag = Vec::with_capacity(len);
        let mut off = Vec::with_capacity(len);
        off.push(0.0);
        for n in 0..len {
            let alpha = if n == 0 {
                (b - a) / (ab + 2.0)
            } else {
                let s = 2.0 * n as f64 + ab;
                (b * b - a * a) / (s * (s + 2.0))
            };
            diag.push(0.5 * (1.0 + alpha));
        }
        for n in 1..len {
            let m = n as f64;
            let beta = if n == 1 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab))
            } else {
                let s = 2.0 * m + ab;
                4.0 * m * (m + a) * (m + b) * (m + ab) / (s * s * (s + 1.0) * (s - 1.0))
            };
            off.push(0.5 * beta.sqrt());
        }
        let g0 = (-0.5 * log_norm_sq(0, a, b)).exp();
        Self { weight, diag, off, g0 }
    }

    pub fn weight(&self) -> WeightPair {
        self.weight
    }

    pub fn max_degree(&self) -> usize {
        self.diag.len() - 3
    }

    /// Diagonal and off-diagonal of the `n × n` Jacobi matrix.
    pub fn jacobi_matrix(&self, n: usize) -> (Vec<f64>, Vec<f64>) {
        assert!(n <= self.diag.len(), "basis built for too few degrees");
        (self.diag[..n].to_vec(), self.off[1..n].to_vec())
    }

    /// `G̃_0, ..., G̃_{out.len()-1}` at `x`.
    pub fn orthonormal_values(&self, x: f64, out: &mut [f64]) {
        if out.is_empty() {
            return;
        }
        assert!(out.len() <= self.diag.len(), "basis built for too few degrees");
        out[0] = self.g0;
        if out.len() > 1 {
            out[1] = (x - self.diag[0]) * self.g0 / self.off[1];
        }
        for n in 1..out.len() - 1 {
            out[n + 1] = ((x - self.diag[n]) * out[n] - self.off[n] * out[n - 1]) / self.off[n + 1];
        }
    }

    /// `G̃_n(x)`.
    pub fn orthonormal(&self, n: usize, x: f64) -> f64 {
        let mut buf = vec![0.0; n + 1];
        self.orthonormal_values(x, &mut buf);
        buf[n]
    }

    /// `sum_j coeffs[j] G̃_j(x)` by Clenshaw's backward recurrence.
    pub fn clenshaw(&self, coeffs: &[f64], x: f64) -> f64 {
        if coeffs.is_empty() {
            return 0.0;
        }
        assert!(coeffs.len() <= self.diag.len() - 2, "basis built for too few degrees");
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for k in (0..coeffs.len()).rev() {
            let a_k = (x - self.diag[k]) / self.off[k + 1];
            let b_k1 = self.off[k + 1] / self.off[k + 2];
            let bk = coeffs[k] + a_k * b1 - b_k1 * b2;
            b2 = b1;
            b1 = bk;
        }
        self.g0 * b1
    }
}
