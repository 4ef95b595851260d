use super::{JacobiBasis, WeightPair};
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

const MAX_QL_ITERATIONS: usize = 50;

/// Gauss rule for `∫_0^1 ρ^(a,b)(x) f(x) dx`.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    weight_pair: WeightPair,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight_pair(&self) -> WeightPair {
        self.weight_pair
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let mut acc = CompensatedSum::new();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * f(*x));
        }
        acc.value()
    }

    pub fn try_integrate<F: Fn(f64) -> Result<f64>>(&self, f: F) -> Result<f64> {
        let mut acc = CompensatedSum::new();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * f(*x)?);
        }
        Ok(acc.value())
    }
}

/// Number of Gauss nodes used for integrands of polynomial degree `d`:
/// the exact count plus a margin of 8.
pub fn nodes_for_degree(d: usize) -> usize {
    (d + 2) / 2 + 8
}

/// The `n`-point Gauss-Jacobi rule on (0, 1) by the Golub-Welsch method.
pub fn gauss_jacobi_rule(n: usize, w: WeightPair) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::domain("quadrature order must be at least 1"));
    }
    let basis = JacobiBasis::new(w, n);
    let (mut d, off) = basis.jacobi_matrix(n);
    let mut e = off;
    e.push(0.0);
    let mut z = vec![0.0; n];
    z[0] = 1.0;
    tridiagonal_ql(&mut d, &mut e, &mut z)?;

    let mass = w.total_mass();
    let mut pairs: Vec<(f64, f64)> = d.into_iter().zip(z.into_iter().map(|v| mass * v * v)).collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    let (nodes, weights): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();

    let ordered = nodes.windows(2).all(|p| p[0] < p[1]);
    let inside = nodes.iter().all(|&x| x > 0.0 && x < 1.0);
    let positive = weights.iter().all(|&v| v > 0.0);
    if !(ordered && inside && positive) {
        return Err(Error::Numeric(format!(
            "Gauss-Jacobi rule n={n}, w={w} lost accuracy: ordered={ordered}, interior={inside}, positive weights={positive}"
        )));
    }
    Ok(QuadratureRule { nodes, weights, weight_pair: w })
}

/// Implicit QL with Wilkinson shifts on the symmetric tridiagonal matrix
/// with diagonal `d` and sub-diagonal `e` (`e[i]` couples `i` and `i+1`,
/// last entry ignored). On return `d` holds the eigenvalues and `z` the
/// first components of the corresponding normalised eigenvectors.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITERATIONS {
                return Err(Error::Numeric(format!(
                    "tridiagonal QL did not converge for eigenvalue {l} of {n} after {MAX_QL_ITERATIONS} iterations (residual off-diagonal {:e})",
                    e[l]
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
