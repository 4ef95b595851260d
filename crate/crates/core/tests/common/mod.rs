//! Independent reference computations shared by the integration tests and
//! the acceptance suite. Nothing here goes through the library's
//! recurrences, Gauss rules or LU code.

#![allow(dead_code)]

use fracspec::specfun::{JacobiBasis, WeightPair};

/// Generalised binomial coefficient `C(top, k)` as a finite product.
pub fn gen_binom(top: f64, k: usize) -> f64 {
    (1..=k).map(|i| (top - k as f64 + i as f64) / i as f64).product()
}

/// `G_n^(a,b)(x) = sum_s C(n+a, n-s) C(n+b, s) (x-1)^s x^(n-s)`.
pub fn jacobi_binomial(n: usize, a: f64, b: f64, x: f64) -> f64 {
    (0..=n)
        .map(|s| {
            gen_binom(n as f64 + a, n - s) * gen_binom(n as f64 + b, s) * (x - 1.0).powi(s as i32) * x.powi((n - s) as i32)
        })
        .sum()
}

/// Derivative of [`jacobi_binomial`] term by term.
pub fn jacobi_binomial_derivative(n: usize, a: f64, b: f64, x: f64) -> f64 {
    (0..=n)
        .map(|s| {
            let c = gen_binom(n as f64 + a, n - s) * gen_binom(n as f64 + b, s);
            let left = if s > 0 { s as f64 * (x - 1.0).powi(s as i32 - 1) * x.powi((n - s) as i32) } else { 0.0 };
            let right = if n > s { (n - s) as f64 * (x - 1.0).powi(s as i32) * x.powi((n - s) as i32 - 1) } else { 0.0 };
            c * (left + right)
        })
        .sum()
}

/// `(1-x)^a x^b`.
pub fn rho(a: f64, b: f64, x: f64) -> f64 {
    (1.0 - x).powf(a) * x.powf(b)
}

/// Composite midpoint rule on (0, 1) with `cells` cells.
pub fn midpoint(cells: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = 1.0 / cells as f64;
    let mut s = 0.0;
    let mut comp = 0.0;
    for i in 0..cells {
        let y = f((i as f64 + 0.5) * h) - comp;
        let t = s + y;
        comp = (t - s) - y;
        s = t;
    }
    s * h
}

/// Gaussian elimination with partial pivoting on a copy of `a`.
pub fn gauss_solve(a: &[Vec<f64>], rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    let mut m: Vec<Vec<f64>> = a.iter().zip(rhs).map(|(row, r)| {
        let mut row = row.clone();
        row.push(*r);
        row
    }).collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap()).unwrap();
        m.swap(col, piv);
        for row in col + 1..n {
            let factor = m[row][col] / m[col][col];
            for k in col..=n {
                m[row][k] -= factor * m[col][k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| m[row][k] * x[k]).sum();
        x[row] = (m[row][n] - s) / m[row][row];
    }
    x
}

/// `Γ(k+1+α)/Γ(k+1) = Γ(1+α) · prod_{i=1..k} (i+α)/i`.
pub fn gamma_ratio(k: usize, alpha: f64, gamma_one_plus_alpha: f64) -> f64 {
    (1..=k).fold(gamma_one_plus_alpha, |acc, i| acc * (i as f64 + alpha) / i as f64)
}

/// Brute-force Petrov-Galerkin solve for `α = 3/2`, `r = 1/2` (so
/// `β = 3/4` and both bases carry the weight `(3/4, 3/4)`).
///
/// Entries are computed with a `cells`-point midpoint rule from the
/// binomial form of the polynomials and the product rule for the
/// derivative of the trial functions, then solved by Gaussian elimination.
pub fn brute_force_solution(
    b: impl Fn(f64) -> f64,
    c: impl Fn(f64) -> f64,
    f: impl Fn(f64) -> f64,
    n: usize,
    cells: usize,
) -> Vec<f64> {
    let (alpha, beta) = (1.5, 0.75);
    let (p, q) = (alpha - beta, beta);
    let size = n + 1;
    let h = 1.0 / cells as f64;

    let mut norm_sq = vec![0.0; size];
    let mut mat = vec![vec![0.0; size]; size];
    let mut load = vec![0.0; size];
    let mut g = vec![0.0; size];
    let mut dg = vec![0.0; size];
    for i in 0..cells {
        let x = (i as f64 + 0.5) * h;
        let w_test = rho(q, p, x);
        let w_trial = rho(p, q, x);
        let dw_trial = w_trial * (-p / (1.0 - x) + q / x);
        for j in 0..size {
            g[j] = jacobi_binomial(j, p, q, x);
            dg[j] = jacobi_binomial_derivative(j, p, q, x);
        }
        let (bx, cx, fx) = (b(x), c(x), f(x));
        for j in 0..size {
            norm_sq[j] += w_trial * g[j] * g[j];
            load[j] += w_test * fx * g[j];
            for k in 0..size {
                let u = w_trial * g[k];
                let du = dw_trial * g[k] + w_trial * dg[k];
                mat[j][k] += w_test * g[j] * (cx * u + bx * du);
            }
        }
    }
    let norms: Vec<f64> = norm_sq.iter().map(|s| (s * h).sqrt()).collect();
    let c_star_star = -std::f64::consts::FRAC_1_SQRT_2;
    let gamma_2_5 = 0.75 * std::f64::consts::PI.sqrt();
    let mut system = vec![vec![0.0; size]; size];
    for j in 0..size {
        for k in 0..size {
            system[j][k] = mat[j][k] * h / (norms[j] * norms[k]);
        }
        system[j][j] += -c_star_star * gamma_ratio(j, alpha, gamma_2_5);
    }
    let rhs: Vec<f64> = (0..size).map(|j| load[j] * h / norms[j]).collect();
    gauss_solve(&system, &rhs)
}

/// Exact-enough Jacobi coefficients of `x^μ` in the basis `(0, b)`,
/// `v_j = ∫ x^(b+μ) G̃_j(x) dx`, from a graded composite Gauss-Legendre
/// rule: 313 cells on (0, 1/2) graded as `(i/313)^3` toward 0 and 312 cells
/// on (1/2, 1) graded quadratically toward 1, 8 points each (5000 nodes).
pub fn xmu_coefficients(mu: f64, b: f64, n: usize) -> Vec<f64> {
    // 8-point Gauss-Legendre on (0, 1)
    const GL_X: [f64; 8] = [
        0.019_855_071_751_231_856,
        0.101_666_761_293_186_63,
        0.237_233_795_041_835_5,
        0.408_282_678_752_175_1,
        0.591_717_321_247_824_9,
        0.762_766_204_958_164_5,
        0.898_333_238_706_813_4,
        0.980_144_928_248_768_1,
    ];
    const GL_W: [f64; 8] = [
        0.050_614_268_145_188_13,
        0.111_190_517_226_687_24,
        0.156_853_322_938_943_64,
        0.181_341_891_689_180_99,
        0.181_341_891_689_180_99,
        0.156_853_322_938_943_64,
        0.111_190_517_226_687_24,
        0.050_614_268_145_188_13,
    ];
    let mut edges = Vec::new();
    let (left, right) = (313, 312);
    for i in 0..=left {
        edges.push(0.5 * (i as f64 / left as f64).powi(3));
    }
    for i in 1..=right {
        let t = 1.0 - i as f64 / right as f64;
        edges.push(1.0 - 0.5 * t * t);
    }
    let basis = JacobiBasis::new(WeightPair::new(0.0, b).unwrap(), n);
    let mut vals = vec![0.0; n + 1];
    let mut acc = vec![0.0; n + 1];
    for e in edges.windows(2) {
        let (lo, hi) = (e[0], e[1]);
        for (gx, gw) in GL_X.iter().zip(GL_W) {
            let x = lo + (hi - lo) * gx;
            let wt = (hi - lo) * gw * x.powf(b + mu);
            basis.orthonormal_values(x, &mut vals);
            for (a, v) in acc.iter_mut().zip(&vals) {
                *a += wt * v;
            }
        }
    }
    acc
}

/// Brute-force weighted Slobodeckij seminorm squared over the
/// near-diagonal region, `m × m` midpoint cells on the unit square with
/// the cells on the diagonal dropped (their contribution vanishes as
/// `m → ∞` for `θ < 1`).
pub fn slobodeckij_brute_force_sq(f: impl Fn(f64) -> f64, a: f64, b: f64, s: f64, m: usize) -> f64 {
    let h = 1.0 / m as f64;
    let fx: Vec<f64> = (0..m).map(|i| f((i as f64 + 0.5) * h)).collect();
    let mut total = 0.0;
    for i in 0..m {
        let x = (i as f64 + 0.5) * h;
        let w = (1.0 - x).powf(a + s) * x.powf(b + s);
        for j in 0..m {
            if i == j {
                continue;
            }
            let y = (j as f64 + 0.5) * h;
            let inside = if x < 0.5 {
                y > 2.0 * x / 3.0 && y < 1.5 * x
            } else {
                y > 1.5 * x - 0.5 && y < 2.0 * x / 3.0 + 1.0 / 3.0
            };
            if inside {
                let d = fx[i] - fx[j];
                total += w * d * d / (x - y).abs().powf(1.0 + 2.0 * s);
            }
        }
    }
    total * h * h
}
