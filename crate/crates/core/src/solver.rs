//! Truncated Petrov-Galerkin solver for
//! `L^α_r u + b Du + c u = f` on (0, 1) with `u(0) = u(1) = 0`.
//!
//! The ansatz is `u = ρ^(α-β,β) φ` with `φ = sum_k φ_k G̃_k^(α-β,β)`, tested
//! against `G̃_j^(β,α-β)` under the weight `ρ^(β,α-β)`. The diffusion part is
//! then `diag(λ_k)` and the discrete system reads `(Λ + A + M) φ = f⃗`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expression;
use crate::fracop::{eigenvalues, OperatorParams};
use crate::linalg::{norm_2, Lu, Matrix};
use crate::numeric::{finite_difference, CompensatedSum};
use crate::specfun::{gauss_jacobi_rule, jacobi_norm, JacobiBasis, WeightPair};
use crate::spectral::{analyze, synthesize, SpectralFunction};

const WELL_POSED_TOL: f64 = -1e-10;
const WELL_POSED_SAMPLES: usize = 1000;
const RESIDUAL_TOL: f64 = 1e-10;
const CONDITION_LIMIT: f64 = 1e14;

/// Default quadrature order for truncation `n`.
pub fn default_quadrature(n: usize) -> usize {
    2 * n + 16
}

/// Data `f`, either as coefficients in the basis `(β, α-β)` or as a formula.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RightHandSide {
    Coefficients(SpectralFunction),
    Expression(Expression),
}

/// A fully specified problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub params: OperatorParams,
    pub b: Option<Expression>,
    pub c: Option<Expression>,
    pub f: RightHandSide,
    pub n: usize,
    pub q: usize,
}

impl ProblemSpec {
    /// Pure diffusion problem with `Q = 2N + 16`.
    pub fn new(params: OperatorParams, f: RightHandSide, n: usize) -> Self {
        Self { params, b: None, c: None, f, n, q: default_quadrature(n) }
    }

    pub fn with_advection(mut self, b: Expression) -> Self {
        self.b = Some(b);
        self
    }

    pub fn with_reaction(mut self, c: Expression) -> Self {
        self.c = Some(c);
        self
    }

    pub fn with_quadrature(mut self, q: usize) -> Self {
        self.q = q;
        self
    }

    pub fn has_advection(&self) -> bool {
        self.b.as_ref().is_some_and(|b| !b.is_constant(0.0))
    }

    pub fn has_reaction(&self) -> bool {
        self.c.as_ref().is_some_and(|c| !c.is_constant(0.0))
    }

    /// Sampled check of `c - Db/2 >= 0` on 1000 midpoints of (0, 1).
    ///
    /// Returns warnings on success; a violation below `-1e-10` is a
    /// precondition error.
    pub fn check_well_posedness(&self) -> Result<Vec<String>> {
        let mut warnings = Vec::new();
        let b = self.b.as_ref().filter(|b| !b.is_x_free());
        if b.is_some() {
            warnings.push("Db estimated by finite differences in the well-posedness check".to_string());
        }
        for i in 0..WELL_POSED_SAMPLES {
            let x = (i as f64 + 0.5) / WELL_POSED_SAMPLES as f64;
            let c = match &self.c {
                Some(c) => c.eval(x)?,
                None => 0.0,
            };
            let db = match b {
                Some(b) => finite_difference(|y| b.eval(y), 1, x)?,
                None => 0.0,
            };
            let v = c - 0.5 * db;
            if v < WELL_POSED_TOL {
                return Err(Error::Precondition(format!(
                    "c(x) - Db(x)/2 = {v:.6e} < 0 at x = {x}"
                )));
            }
        }
        Ok(warnings)
    }

    /// `f⃗_j = ∫ ρ^(β,α-β) f G̃_j^(β,α-β)`, j = 0..=N.
    pub fn load_vector(&self) -> Result<Vec<f64>> {
        let w = self.params.test_basis();
        match &self.f {
            RightHandSide::Coefficients(v) => {
                let got = v.basis();
                if (got.a() - w.a()).abs() > 1e-12 || (got.b() - w.b()).abs() > 1e-12 {
                    return Err(Error::Contract(format!("f must be in basis {w}, got {got}")));
                }
                let mut out = v.coeffs().to_vec();
                out.resize(self.n + 1, 0.0);
                Ok(out)
            }
            RightHandSide::Expression(e) => Ok(analyze(e, w, self.n, self.q)?.into_coeffs()),
        }
    }
}

fn check_quadrature(n: usize, q: usize) -> Result<()> {
    if q < default_quadrature(n) {
        return Err(Error::domain(format!("quadrature order {q} below 2N + 16 = {}", default_quadrature(n))));
    }
    Ok(())
}

/// `M[j][k] = ∫ ρ^(α,α) c G̃_j^(β,α-β) G̃_k^(α-β,β)`.
pub fn reaction_matrix(p: &OperatorParams, c: &Expression, n: usize, q: usize) -> Result<Matrix> {
    check_quadrature(n, q)?;
    let mut m = Matrix::zeros(n + 1);
    if c.is_constant(0.0) {
        return Ok(m);
    }
    let rule = gauss_jacobi_rule(q, WeightPair::new(p.alpha, p.alpha)?)?;
    let test = JacobiBasis::new(p.test_basis(), n);
    let trial = JacobiBasis::new(p.trial_basis(), n);
    let trial_at: Vec<Vec<f64>> = rule
        .nodes()
        .iter()
        .map(|&x| {
            let mut v = vec![0.0; n + 1];
            trial.orthonormal_values(x, &mut v);
            v
        })
        .collect();
    project(&rule, c, &test, &trial_at, &mut m)?;
    Ok(m)
}

/// `A[j][k] = -(k+1)/|‖G_k^(α-β,β)‖| ∫ ρ^(α-1,α-1) b G̃_j^(β,α-β) G_{k+1}^(α-β-1,β-1)`,
/// the projection of `b D(ρ^(α-β,β) G̃_k^(α-β,β))`.
pub fn advection_matrix(p: &OperatorParams, b: &Expression, n: usize, q: usize) -> Result<Matrix> {
    check_quadrature(n, q)?;
    let mut m = Matrix::zeros(n + 1);
    if b.is_constant(0.0) {
        return Ok(m);
    }
    let rule = gauss_jacobi_rule(q, WeightPair::new(p.alpha - 1.0, p.alpha - 1.0)?)?;
    let test = JacobiBasis::new(p.test_basis(), n);
    let lowered = WeightPair::new(p.alpha - p.beta - 1.0, p.beta - 1.0)?;
    let low = JacobiBasis::new(lowered, n + 1);
    // G_{k+1}^lowered = |‖G_{k+1}^lowered‖| G̃_{k+1}^lowered
    let scale: Vec<f64> = (0..=n)
        .map(|k| -((k + 1) as f64) * jacobi_norm(k + 1, lowered) / jacobi_norm(k, p.trial_basis()))
        .collect();
    let mut buf = vec![0.0; n + 2];
    let trial_at: Vec<Vec<f64>> = rule
        .nodes()
        .iter()
        .map(|&x| {
            low.orthonormal_values(x, &mut buf);
            (0..=n).map(|k| scale[k] * buf[k + 1]).collect()
        })
        .collect();
    project(&rule, b, &test, &trial_at, &mut m)?;
    Ok(m)
}

/// `out[j][k] = sum_i w_i g(x_i) G̃_j^test(x_i) trial_at[i][k]`.
fn project(
    rule: &crate::specfun::QuadratureRule,
    g: &Expression,
    test: &JacobiBasis,
    trial_at: &[Vec<f64>],
    out: &mut Matrix,
) -> Result<()> {
    let n = out.size();
    let mut acc = vec![CompensatedSum::new(); n * n];
    let mut tv = vec![0.0; n];
    for ((&x, &w), tr) in rule.nodes().iter().zip(rule.weights()).zip(trial_at) {
        let gw = w * g.eval(x)?;
        test.orthonormal_values(x, &mut tv);
        for j in 0..n {
            let row = gw * tv[j];
            for k in 0..n {
                acc[j * n + k].add(row * tr[k]);
            }
        }
    }
    for j in 0..n {
        for k in 0..n {
            out[(j, k)] = acc[j * n + k].value();
        }
    }
    Ok(())
}

/// `Λ + A + M` for the given problem.
pub fn system_matrix(spec: &ProblemSpec) -> Result<Matrix> {
    let n = spec.n;
    let lam = eigenvalues(&spec.params, n);
    let mut s = Matrix::from_fn(n + 1, |j, k| if j == k { lam.get(k) } else { 0.0 });
    if let Some(b) = &spec.b {
        s = s.add(&advection_matrix(&spec.params, b, n, spec.q)?);
    }
    if let Some(c) = &spec.c {
        s = s.add(&reaction_matrix(&spec.params, c, n, spec.q)?);
    }
    Ok(s)
}

/// Computed `φ` together with solve diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub phi: SpectralFunction,
    /// `‖(Λ + A + M) φ - f⃗‖₂`.
    pub residual_spectral: f64,
    /// `‖f⃗‖₂`.
    pub load_norm: f64,
    /// `(α-β, β)`: `u = ρ^(α-β,β) φ`.
    pub factored_weights: (f64, f64),
    pub condition_estimate: f64,
    pub load: Vec<f64>,
    pub warnings: Vec<String>,
}

impl Solution {
    pub fn relative_residual(&self) -> f64 {
        if self.load_norm == 0.0 {
            self.residual_spectral
        } else {
            self.residual_spectral / self.load_norm
        }
    }
}

/// Assemble and solve `(Λ + A + M) φ = f⃗` by LU with partial pivoting.
pub fn solve_fdar(spec: &ProblemSpec) -> Result<Solution> {
    let warnings = spec.check_well_posedness()?;
    let load = spec.load_vector()?;
    let s = system_matrix(spec)?;
    let lu = Lu::factor(&s)?;
    let cond = lu.condition_estimate();
    if !(cond <= CONDITION_LIMIT) {
        return Err(Error::Singular(format!("condition estimate {cond:.3e} exceeds {CONDITION_LIMIT:e}")));
    }
    let mut phi = lu.solve(&load);
    let load_norm = norm_2(&load);
    let residual_of = |phi: &[f64]| {
        let r: Vec<f64> = s.mul_vec(phi).iter().zip(&load).map(|(a, b)| a - b).collect();
        (norm_2(&r), r)
    };
    let (mut residual, r) = residual_of(&phi);
    if residual > RESIDUAL_TOL * load_norm {
        // one step of iterative refinement
        let d = lu.solve(&r);
        for (p, d) in phi.iter_mut().zip(&d) {
            *p -= d;
        }
        residual = residual_of(&phi).0;
    }
    if residual > RESIDUAL_TOL * load_norm {
        return Err(Error::Numeric(format!(
            "spectral residual {residual:.3e} above {RESIDUAL_TOL:e} * |f| = {:.3e} (condition estimate {cond:.3e})",
            RESIDUAL_TOL * load_norm
        )));
    }
    let trial = spec.params.trial_basis();
    Ok(Solution {
        phi: SpectralFunction::new(trial, phi)?,
        residual_spectral: residual,
        load_norm,
        factored_weights: (trial.a(), trial.b()),
        condition_estimate: cond,
        load,
        warnings,
    })
}

/// `u(x) = ρ^(α-β,β)(x) φ(x)`, exactly 0 at both endpoints.
pub fn evaluate_solution(sol: &Solution, x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("x must lie in [0, 1], got {x}")));
    }
    if x == 0.0 || x == 1.0 {
        return Ok(0.0);
    }
    let (a, b) = sol.factored_weights;
    Ok((1.0 - x).powf(a) * x.powf(b) * synthesize(&sol.phi, x)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fracop::condition_a_beta;
    use crate::specfun::jacobi_eval;

    fn expr(s: &str) -> Expression {
        Expression::parse(s).unwrap()
    }

    fn composite_simpson(f: impl Fn(f64) -> f64, n: usize) -> f64 {
        let h = 1.0 / n as f64;
        let mut s = f(0.0) + f(1.0);
        for i in 1..n {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn zero_coefficients_give_zero_matrices() {
        let p = condition_a_beta(1.5, 0.5).unwrap();
        assert!(reaction_matrix(&p, &expr("0"), 4, 24).unwrap().norm_1() == 0.0);
        assert!(advection_matrix(&p, &expr("0"), 4, 24).unwrap().norm_1() == 0.0);
        assert!(matches!(reaction_matrix(&p, &expr("1"), 4, 23), Err(Error::Domain(_))));
    }

    #[test]
    fn reaction_leading_entry_is_beta_function() {
        let p = condition_a_beta(1.5, 0.5).unwrap();
        let m = reaction_matrix(&p, &expr("1"), 4, 24).unwrap();
        let mass = WeightPair::new(p.alpha, p.alpha).unwrap().total_mass();
        let expect = mass / (jacobi_norm(0, p.test_basis()) * jacobi_norm(0, p.trial_basis()));
        assert!((m[(0, 0)] - expect).abs() < 1e-14);
    }

    #[test]
    fn reaction_matches_simpson_oracle() {
        let p = condition_a_beta(1.5, 0.3).unwrap();
        let m = reaction_matrix(&p, &expr("1"), 4, 24).unwrap();
        let (te, tr) = (p.test_basis(), p.trial_basis());
        for j in 0..=4 {
            for k in 0..=4 {
                let f = |x: f64| {
                    te.weight(x) * tr.weight(x) * jacobi_eval(j, te, x).unwrap() * jacobi_eval(k, tr, x).unwrap()
                        / (jacobi_norm(j, te) * jacobi_norm(k, tr))
                };
                let oracle = composite_simpson(f, 200_000);
                assert!((m[(j, k)] - oracle).abs() < 1e-8, "j={j} k={k}");
            }
        }
    }

    #[test]
    fn weighted_derivative_identity_pointwise() {
        let p = condition_a_beta(1.5, 0.3).unwrap();
        let tr = p.trial_basis();
        let low = WeightPair::new(p.alpha - p.beta - 1.0, p.beta - 1.0).unwrap();
        for k in 0..4 {
            let u = |x: f64| tr.weight(x) * jacobi_eval(k, tr, x).unwrap();
            for i in 1..=50 {
                let x = 0.02 + 0.96 * (i as f64 - 0.5) / 50.0;
                let h = 1e-5;
                let fd = (u(x + h) - u(x - h)) / (2.0 * h);
                let exact = -((k + 1) as f64) * low.weight(x) * jacobi_eval(k + 1, low, x).unwrap();
                assert!((fd - exact).abs() < 1e-6 * exact.abs().max(1.0), "k={k} x={x}");
            }
        }
    }

    #[test]
    fn advection_columns_match_projected_derivative() {
        let p = condition_a_beta(1.5, 0.5).unwrap();
        let a = advection_matrix(&p, &expr("1"), 3, 22).unwrap();
        let (te, tr) = (p.test_basis(), p.trial_basis());
        for k in 0..=3 {
            let u = |x: f64| tr.weight(x) * jacobi_eval(k, tr, x).unwrap() / jacobi_norm(k, tr);
            for j in 0..=3 {
                // D u by central differences, projected with a midpoint rule
                let n = 200_000;
                let h = 1e-6;
                let mut s = 0.0;
                for i in 0..n {
                    let x = (i as f64 + 0.5) / n as f64;
                    let (lo, hi) = ((x - h).max(0.0), (x + h).min(1.0));
                    let du = (u(hi) - u(lo)) / (hi - lo);
                    s += te.weight(x) * jacobi_eval(j, te, x).unwrap() / jacobi_norm(j, te) * du;
                }
                let oracle = s / n as f64;
                assert!((a[(j, k)] - oracle).abs() < 1e-6, "j={j} k={k} {} {oracle}", a[(j, k)]);
            }
        }
    }

    #[test]
    fn manufactured_diagonal_solve() {
        let p = condition_a_beta(1.5, 0.5).unwrap();
        let lam = eigenvalues(&p, 2).get(2);
        let mut fc = vec![0.0; 3];
        fc[2] = lam;
        let f = SpectralFunction::new(p.test_basis(), fc).unwrap();
        let sol = solve_fdar(&ProblemSpec::new(p, RightHandSide::Coefficients(f), 8)).unwrap();
        for (k, c) in sol.phi.coeffs().iter().enumerate() {
            let want = if k == 2 { 1.0 } else { 0.0 };
            assert!((c - want).abs() < 1e-14);
        }
        assert_eq!(evaluate_solution(&sol, 0.0).unwrap(), 0.0);
        assert_eq!(evaluate_solution(&sol, 1.0).unwrap(), 0.0);
        let tr = p.trial_basis();
        let expect = tr.weight(0.5) * jacobi_eval(2, tr, 0.5).unwrap() / jacobi_norm(2, tr);
        assert!((evaluate_solution(&sol, 0.5).unwrap() - expect).abs() < 1e-14);
    }

    #[test]
    fn well_posedness_violation() {
        let p = condition_a_beta(1.5, 0.5).unwrap();
        let f = RightHandSide::Expression(expr("1"));
        let bad = ProblemSpec::new(p, f.clone(), 8).with_advection(expr("4*x"));
        assert!(matches!(solve_fdar(&bad), Err(Error::Precondition(_))));
        let good = ProblemSpec::new(p, f, 8).with_advection(expr("-4*x"));
        let sol = solve_fdar(&good).unwrap();
        assert_eq!(sol.warnings.len(), 1);
    }

    #[test]
    fn assembly_consistency_with_constant_reaction() {
        let p = condition_a_beta(1.3, 0.7).unwrap();
        let spec = ProblemSpec::new(p, RightHandSide::Expression(expr("exp(x)")), 12).with_reaction(expr("2.5"));
        let s = system_matrix(&spec).unwrap();
        let m = reaction_matrix(&p, &expr("1"), 12, spec.q).unwrap();
        let lam = eigenvalues(&p, 12);
        let expect = Matrix::from_fn(13, |j, k| 2.5 * m[(j, k)] + if j == k { lam.get(k) } else { 0.0 });
        assert!(s.max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn self_convergence() {
        let p = condition_a_beta(1.5, 0.5).unwrap();
        let make = |n| {
            ProblemSpec::new(p, RightHandSide::Expression(expr("exp(x)")), n)
                .with_reaction(expr("1"))
                .with_advection(expr("0.1*x"))
        };
        let coarse = solve_fdar(&make(24)).unwrap();
        let fine = solve_fdar(&make(48)).unwrap();
        for k in 0..12 {
            assert!((coarse.phi.coeffs()[k] - fine.phi.coeffs()[k]).abs() < 1e-8, "k={k}");
        }
        assert!(coarse.relative_residual() <= 1e-10 && fine.relative_residual() <= 1e-10);
    }

    #[test]
    fn coefficient_rhs_must_match_test_basis() {
        let p = condition_a_beta(1.5, 0.2).unwrap();
        let f = SpectralFunction::unit(p.trial_basis(), 0, 3);
        let spec = ProblemSpec::new(p, RightHandSide::Coefficients(f), 4);
        assert!(matches!(solve_fdar(&spec), Err(Error::Contract(_))));
    }
}
