use super::RealFunction;
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::specfun::{gauss_jacobi_rule, QuadratureRule, WeightPair};

const L2_POINTS: usize = 64;

/// Partition used for the double integral over the near-diagonal region.
///
/// In coordinates `(x, z)` with `y = x z`, the `x` interval `(0, 1/2)` is
/// split at `r^l / 2` and each side of `z = 1` at `1 ∓ c r^l`, for
/// `l = 0..=levels`. Every cell gets a `points × points` tensor Gauss rule;
/// the two cells touching `z = 1` use Gauss-Jacobi rules that absorb the
/// factor `|1 - z|^(1 - 2θ)` left over after cancelling `|x - y|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradedRule {
    pub levels: usize,
    pub ratio: f64,
    pub points: usize,
}

impl Default for GradedRule {
    fn default() -> Self {
        Self { levels: 12, ratio: 0.5, points: 8 }
    }
}

struct Cells {
    regular: QuadratureRule,
    below: QuadratureRule,
    above: QuadratureRule,
}

/// Weighted Sobolev-Slobodeckij seminorm with the default partition.
pub fn slobodeckij_seminorm<F: RealFunction + ?Sized>(f: &F, w: WeightPair, s: f64) -> Result<f64> {
    slobodeckij_seminorm_with(f, w, s, &GradedRule::default())
}

/// `(∬_Λ̃ (1-x)^(a+s) x^(b+s) |D^k f(x) - D^k f(y)|² / |x-y|^(1+2θ) dy dx)^(1/2)`
/// with `k = ⌊s⌋`, `θ = s - k`, over
/// `Λ̃ = {0 < x < 1/2, 2x/3 < y < 3x/2} ∪ {1/2 ≤ x < 1, 3x/2 - 1/2 < y < 2x/3 + 1/3}`.
pub fn slobodeckij_seminorm_with<F: RealFunction + ?Sized>(
    f: &F,
    w: WeightPair,
    s: f64,
    rule: &GradedRule,
) -> Result<f64> {
    if !(s > 0.0) || s.fract() == 0.0 || !s.is_finite() {
        return Err(Error::domain(format!("seminorm order must be a positive non-integer, got {s}")));
    }
    if rule.levels == 0 || rule.points == 0 || !(rule.ratio > 0.0 && rule.ratio < 1.0) {
        return Err(Error::domain("graded rule needs levels >= 1, points >= 1 and ratio in (0, 1)"));
    }
    let k = s.floor() as usize;
    let theta = s - k as f64;
    let cells = Cells {
        regular: gauss_jacobi_rule(rule.points, WeightPair::new(0.0, 0.0)?)?,
        below: gauss_jacobi_rule(rule.points, WeightPair::new(1.0 - 2.0 * theta, 0.0)?)?,
        above: gauss_jacobi_rule(rule.points, WeightPair::new(0.0, 1.0 - 2.0 * theta)?)?,
    };
    let (ea, eb) = (w.a() + s, w.b() + s);
    let left = piece(&|x| f.eval_derivative(k, x), ea, eb, theta, rule, &cells)?;
    // the right half is the mirror image x -> 1 - x
    let right = piece(&|x| f.eval_derivative(k, 1.0 - x), eb, ea, theta, rule, &cells)?;
    Ok((left + right).sqrt())
}

/// `∫_0^{1/2} ∫_{2/3}^{3/2} (1-x)^ea x^eb (g(x) - g(xz))² / (x |1-z|)^(1+2θ) · x dz dx`.
fn piece(
    g: &dyn Fn(f64) -> Result<f64>,
    ea: f64,
    eb: f64,
    theta: f64,
    rule: &GradedRule,
    cells: &Cells,
) -> Result<f64> {
    let r = rule.ratio;
    let lv = rule.levels;
    let mut x_cells: Vec<(f64, f64)> = (0..lv).map(|l| (0.5 * r.powi(l as i32 + 1), 0.5 * r.powi(l as i32))).collect();
    x_cells.push((0.0, 0.5 * r.powi(lv as i32)));

    let below_edge = |l: usize| 1.0 - r.powi(l as i32) / 3.0;
    let above_edge = |l: usize| 1.0 + 0.5 * r.powi(l as i32);
    let p = 1.0 - 2.0 * theta;

    let mut total = CompensatedSum::new();
    for &(x0, x1) in &x_cells {
        let hx = x1 - x0;
        for (&u, &wu) in cells.regular.nodes().iter().zip(cells.regular.weights()) {
            let x = x0 + hx * u;
            let gx = g(x)?;
            let weight = (1.0 - x).powf(ea) * x.powf(eb) * x.powf(-2.0 * theta);
            let mut inner = CompensatedSum::new();
            for l in 0..lv {
                for (z0, z1) in [(below_edge(l), below_edge(l + 1)), (above_edge(l + 1), above_edge(l))] {
                    let hz = z1 - z0;
                    for (&v, &wv) in cells.regular.nodes().iter().zip(cells.regular.weights()) {
                        let z = z0 + hz * v;
                        let d = gx - g(x * z)?;
                        inner.add(hz * wv * d * d / (1.0 - z).abs().powf(1.0 + 2.0 * theta));
                    }
                }
            }
            // cells touching z = 1: the rule carries |1 - z|^(1-2θ)
            let hb = 1.0 - below_edge(lv);
            for (&v, &wv) in cells.below.nodes().iter().zip(cells.below.weights()) {
                let z = 1.0 - hb * (1.0 - v);
                let d = gx - g(x * z)?;
                inner.add(hb * hb.powf(p) * wv * d * d / ((1.0 - z) * (1.0 - z)));
            }
            let ha = above_edge(lv) - 1.0;
            for (&v, &wv) in cells.above.nodes().iter().zip(cells.above.weights()) {
                let z = 1.0 + ha * v;
                let d = gx - g(x * z)?;
                inner.add(ha * ha.powf(p) * wv * d * d / ((z - 1.0) * (z - 1.0)));
            }
            total.add(hx * wu * weight * inner.value());
        }
    }
    Ok(total.value())
}

/// `‖f‖_{L²_ρ^(a,b)}` by a 64-point Gauss-Jacobi rule.
pub fn weighted_l2_norm<F: RealFunction + ?Sized>(f: &F, w: WeightPair) -> Result<f64> {
    let rule = gauss_jacobi_rule(L2_POINTS, w)?;
    Ok(rule.try_integrate(|x| f.eval(x).map(|v| v * v))?.sqrt())
}

/// Full norm with the default partition.
pub fn full_weighted_norm<F: RealFunction + ?Sized>(f: &F, w: WeightPair, s: f64) -> Result<f64> {
    full_weighted_norm_with(f, w, s, &GradedRule::default())
}

/// `(sum_{j <= ⌊s⌋} ‖D^j f‖²_{L²(a+j, b+j)} + |f|²_s)^(1/2)`; the seminorm
/// term is absent for integer `s`.
pub fn full_weighted_norm_with<F: RealFunction + ?Sized>(
    f: &F,
    w: WeightPair,
    s: f64,
    rule: &GradedRule,
) -> Result<f64> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::domain(format!("norm order must be finite and >= 0, got {s}")));
    }
    let k = s.floor() as usize;
    let mut acc = CompensatedSum::new();
    for j in 0..=k {
        let quad = gauss_jacobi_rule(L2_POINTS, w.shifted(j))?;
        let part = quad.try_integrate(|x| f.eval_derivative(j, x).map(|v| v * v))?;
        acc.add(part);
    }
    if s.fract() != 0.0 {
        let semi = slobodeckij_seminorm_with(f, w, s, rule)?;
        acc.add(semi * semi);
    }
    Ok(acc.value().sqrt())
}

/// Finiteness verdict for the full norm: refining the partition from 12 to
/// 36 levels must not grow the computed norm by a factor 2 or more.
pub fn weighted_norm_is_finite<F: RealFunction + ?Sized>(f: &F, w: WeightPair, s: f64) -> Result<bool> {
    let coarse = full_weighted_norm_with(f, w, s, &GradedRule::default())?;
    let fine = full_weighted_norm_with(f, w, s, &GradedRule { levels: 36, ..GradedRule::default() })?;
    Ok(fine.is_finite() && fine < 2.0 * coarse)
}
