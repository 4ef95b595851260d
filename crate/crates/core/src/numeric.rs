//! Small numerical kernels shared by the other modules: compensated
//! summation and finite-difference derivatives on [0, 1].

use crate::error::Result;

/// Neumaier-compensated running sum. Terms are accumulated strictly in the
/// order they are added, so the result depends only on that order.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.comp += (self.sum - t) + value;
        } else {
            self.comp += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Left-to-right compensated sum of an iterator.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = CompensatedSum::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// Fornberg's algorithm: weights `w` such that `sum_i w[i] f(nodes[i])`
/// approximates the `order`-th derivative of `f` at `x0`.
pub fn fd_weights(x0: f64, nodes: &[f64], order: usize) -> Vec<f64> {
    let n = nodes.len();
    assert!(n > order, "stencil too small for derivative order");
    // c[j][k]: weight of node j for derivative k
    let mut c = vec![vec![0.0; order + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[order]).collect()
}

/// Fourth-order finite-difference derivative of `f` at `x`, using only
/// sample points inside [0, 1]. The stencil is centred when it fits and
/// shifted inward near the endpoints.
pub fn finite_difference<F>(f: F, order: usize, x: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if order == 0 {
        return f(x);
    }
    let points = order + 4 + usize::from((order + 4) % 2 == 0);
    let h = match order {
        1 => 1e-3,
        2 => 4e-3,
        3 => 1e-2,
        _ => 2e-2,
    };
    let half = (points / 2) as f64;
    let mut lo = x - half * h;
    if lo < 0.0 {
        lo = 0.0;
    }
    if lo + 2.0 * half * h > 1.0 {
        lo = 1.0 - 2.0 * half * h;
    }
    let nodes: Vec<f64> = (0..points).map(|i| lo + i as f64 * h).collect();
    let weights = fd_weights(x, &nodes, order);
    let mut acc = CompensatedSum::new();
    for (node, w) in nodes.iter().zip(&weights) {
        acc.add(w * f(*node)?);
    }
    Ok(acc.value())
}

/// Least-squares line through `(x, y)`: returns (slope, intercept, r^2).
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = compensated_sum(xs.iter().copied()) / n;
    let my = compensated_sum(ys.iter().copied()) / n;
    let sxy = compensated_sum(xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)));
    let sxx = compensated_sum(xs.iter().map(|x| (x - mx) * (x - mx)));
    let syy = compensated_sum(ys.iter().map(|y| (y - my) * (y - my)));
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, intercept, r2)
}
