//! Command-line front end.
//!
//! Every subcommand reads an optional JSON config (`--config`), applies
//! command-line flags on top, and writes CSV tables plus `result.json` into
//! the output directory. Exit codes: 0 success, 2 config or domain error,
//! 3 numeric or solver failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::expr::Expression;
use crate::fracop::{condition_a_beta, eigenvalues, OperatorParams};
use crate::regularity::{
    continuity_threshold, embedding_ck, measure_decay, predicted_regularity, regularity_report,
};
use crate::solver::{default_quadrature, evaluate_solution, solve_fdar, ProblemSpec, RightHandSide, Solution};
use crate::specfun::WeightPair;
use crate::spectral::{
    analyze, full_weighted_norm, k_functional_norm, slobodeckij_seminorm, sobolev_norm, synthesize,
};

const DEFAULT_N: usize = 64;
const DEFAULT_S: f64 = 10.0;
const DEFAULT_OUTPUT: &str = "fracspec_out";
const U_GRID: usize = 1001;
const NORM_ORDERS: [f64; 6] = [0.25, 0.5, 0.75, 1.25, 1.5, 1.75];

/// Run configuration. All fields are optional in the JSON document; each
/// command checks for the ones it needs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, rename = "N", alias = "n", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, rename = "Q", alias = "q", skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    /// Weight `(a, b)` for `norm` and `equiv`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<(f64, f64)>,
    /// Orders `s` for `norm` and `equiv`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orders: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Fields set in `other` replace those in `self`.
    pub fn overlay(mut self, other: RunConfig) -> Self {
        macro_rules! take {
            ($($field:ident),*) => { $( if other.$field.is_some() { self.$field = other.$field; } )* };
        }
        take!(alpha, r, n, q, f, b, c, s, weight, orders, output);
        self
    }

    fn require<T: Clone>(value: &Option<T>, name: &str) -> Result<T> {
        value.clone().ok_or_else(|| Error::Config(format!("missing required setting `{name}`")))
    }

    fn n(&self) -> usize {
        self.n.unwrap_or(DEFAULT_N)
    }

    fn q(&self) -> usize {
        self.q.unwrap_or_else(|| default_quadrature(self.n()))
    }

    fn s(&self) -> f64 {
        self.s.unwrap_or(DEFAULT_S)
    }

    fn output_dir(&self) -> PathBuf {
        self.output.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT))
    }

    fn params(&self) -> Result<OperatorParams> {
        condition_a_beta(Self::require(&self.alpha, "alpha")?, Self::require(&self.r, "r")?)
    }

    fn weight(&self) -> Result<WeightPair> {
        let (a, b) = self.weight.unwrap_or((0.0, 0.0));
        WeightPair::new(a, b)
    }

    fn optional_expr(text: &Option<String>) -> Result<Option<Expression>> {
        text.as_deref().map(Expression::parse).transpose()
    }

    fn problem(&self, n: usize) -> Result<ProblemSpec> {
        let params = self.params()?;
        let f = Expression::parse(&Self::require(&self.f, "f")?)?;
        let q = if n == self.n() { self.q() } else { default_quadrature(n).max(self.q()) };
        let mut spec = ProblemSpec::new(params, RightHandSide::Expression(f), n).with_quadrature(q);
        spec.b = Self::optional_expr(&self.b)?;
        spec.c = Self::optional_expr(&self.c)?;
        Ok(spec)
    }

    /// The config with defaults made explicit, as echoed in `result.json`.
    fn resolved(&self) -> RunConfig {
        RunConfig {
            n: Some(self.n()),
            q: Some(self.q()),
            s: Some(self.s()),
            output: Some(self.output_dir()),
            ..self.clone()
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "fracspec", version, about = "Jacobi spectral solver for two-sided fractional diffusion-advection-reaction problems on (0,1)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print β, c** and λ_0..λ_9 for (α, r).
    Beta(CommonArgs),
    /// Solve the problem; write phi.csv, u.csv and result.json.
    Solve(CommonArgs),
    /// Coefficient, K-functional and Slobodeckij norms of f.
    Norm(CommonArgs),
    /// Closed-form regularity predictions.
    Predict(CommonArgs),
    /// Solve and compare the coefficient decay with the prediction.
    Decay(CommonArgs),
    /// Solve at N, 2N, 4N and tabulate agreement.
    Converge(CommonArgs),
    /// Norm-equivalence sweep over a grid of orders.
    Equiv(CommonArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// JSON config file; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Fractional order α in (1, 2).
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Left/right weighting r in [0, 1].
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<f64>,
    /// Truncation order N.
    #[arg(short = 'N', long = "n")]
    pub n: Option<usize>,
    /// Quadrature order Q (default 2N + 16).
    #[arg(short = 'Q', long = "q")]
    pub q: Option<usize>,
    /// Right-hand side f(x).
    #[arg(long, allow_hyphen_values = true)]
    pub f: Option<String>,
    /// Advection coefficient b(x).
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    /// Reaction coefficient c(x).
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
    /// Data-space order used for predictions.
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<f64>,
    /// Weight exponents a,b for norm and equiv.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub weight: Option<Vec<f64>>,
    /// Comma-separated orders for norm and equiv.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub orders: Option<Vec<f64>>,
    /// Output directory.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

impl CommonArgs {
    /// Config file (if any) with flags applied on top.
    pub fn config(&self) -> Result<RunConfig> {
        let base = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let flags = RunConfig {
            alpha: self.alpha,
            r: self.r,
            n: self.n,
            q: self.q,
            f: self.f.clone(),
            b: self.b.clone(),
            c: self.c.clone(),
            s: self.s,
            weight: match self.weight.as_deref() {
                None => None,
                Some(&[a, b]) => Some((a, b)),
                Some(w) => return Err(Error::Config(format!("--weight needs two values a,b, got {}", w.len()))),
            },
            orders: self.orders.clone(),
            output: self.output.clone(),
        };
        Ok(base.overlay(flags))
    }
}

/// Machine-readable record written to `result.json`.
#[derive(Debug, Clone, Serialize)]
pub struct ResultRecord {
    pub command: String,
    pub inputs: RunConfig,
    pub outputs: Value,
    pub provenance: Value,
    pub timing: Timing,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub elapsed_seconds: f64,
}

/// Fixed-width scientific notation with 17 significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))
}

struct Output {
    outputs: Value,
    provenance: Value,
    summary: String,
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli.command) {
        Ok(summary) => {
            print!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("fracspec: {e}");
            e.exit_code()
        }
    }
}

/// Run one subcommand, writing its files; returns the text for stdout.
pub fn execute(command: &Command) -> Result<String> {
    let start = Instant::now();
    let (name, args) = match command {
        Command::Beta(a) => ("beta", a),
        Command::Solve(a) => ("solve", a),
        Command::Norm(a) => ("norm", a),
        Command::Predict(a) => ("predict", a),
        Command::Decay(a) => ("decay", a),
        Command::Converge(a) => ("converge", a),
        Command::Equiv(a) => ("equiv", a),
    };
    let cfg = args.config()?;
    let dir = cfg.output_dir();
    let out = match command {
        Command::Beta(_) => cmd_beta(&cfg)?,
        Command::Solve(_) => cmd_solve(&cfg, &dir)?,
        Command::Norm(_) => cmd_norm(&cfg, &dir, &cfg.orders.clone().unwrap_or_else(|| NORM_ORDERS.to_vec()), "norm.csv")?,
        Command::Predict(_) => cmd_predict(&cfg)?,
        Command::Decay(_) => cmd_decay(&cfg, &dir)?,
        Command::Converge(_) => cmd_converge(&cfg, &dir)?,
        Command::Equiv(_) => {
            let grid: Vec<f64> = (1..20).filter(|i| *i != 10).map(|i| i as f64 / 10.0).collect();
            cmd_norm(&cfg, &dir, &cfg.orders.clone().unwrap_or(grid), "equiv.csv")?
        }
    };
    if name != "beta" && name != "predict" || cfg.output.is_some() {
        let record = ResultRecord {
            command: name.to_string(),
            inputs: cfg.resolved(),
            outputs: out.outputs,
            provenance: out.provenance,
            timing: Timing { elapsed_seconds: start.elapsed().as_secs_f64() },
        };
        let text = serde_json::to_string_pretty(&record).map_err(|e| Error::Io(e.to_string()))?;
        write_file(&dir, "result.json", &(text + "\n"))?;
    }
    Ok(out.summary)
}

fn provenance(cfg: &RunConfig, extra: Value) -> Value {
    let mut p = json!({
        "program": "fracspec",
        "version": env!("CARGO_PKG_VERSION"),
        "truncation_order": cfg.n(),
        "quadrature_order": cfg.q(),
    });
    if let (Value::Object(m), Value::Object(e)) = (&mut p, extra) {
        m.extend(e);
    }
    p
}

fn cmd_beta(cfg: &RunConfig) -> Result<Output> {
    let p = cfg.params()?;
    let lam = eigenvalues(&p, 9);
    let mut summary = format!("beta = {}\nc_star_star = {}\n", fmt_num(p.beta), fmt_num(p.c_star_star));
    for (k, l) in lam.lambdas.iter().enumerate() {
        summary.push_str(&format!("lambda_{k} = {}\n", fmt_num(*l)));
    }
    Ok(Output {
        outputs: json!({ "beta": p.beta, "c_star_star": p.c_star_star, "lambda": lam.lambdas }),
        provenance: provenance(cfg, json!({})),
        summary,
    })
}

fn solution_outputs(spec: &ProblemSpec, sol: &Solution) -> Value {
    json!({
        "beta": spec.params.beta,
        "c_star_star": spec.params.c_star_star,
        "trial_weight": sol.factored_weights,
        "phi": sol.phi.coeffs(),
        "f": sol.load,
        "residual": sol.residual_spectral,
        "relative_residual": sol.relative_residual(),
        "condition_estimate": sol.condition_estimate,
        "warnings": sol.warnings,
    })
}

fn solve_with_warnings(spec: &ProblemSpec) -> Result<Solution> {
    let sol = solve_fdar(spec)?;
    for w in &sol.warnings {
        eprintln!("fracspec: warning: {w}");
    }
    Ok(sol)
}

fn phi_csv(spec: &ProblemSpec, sol: &Solution) -> String {
    let lam = eigenvalues(&spec.params, spec.n);
    csv_table(
        &["k", "phi_k", "lambda_k", "f_k"],
        (0..=spec.n).map(|k| {
            vec![k.to_string(), fmt_num(sol.phi.coeffs()[k]), fmt_num(lam.get(k)), fmt_num(sol.load[k])]
        }),
    )
}

fn u_csv(sol: &Solution) -> Result<String> {
    let rows = (0..U_GRID)
        .map(|i| {
            let x = i as f64 / (U_GRID - 1) as f64;
            Ok(vec![fmt_num(x), fmt_num(evaluate_solution(sol, x)?)])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(csv_table(&["x", "u"], rows))
}

fn cmd_solve(cfg: &RunConfig, dir: &Path) -> Result<Output> {
    let spec = cfg.problem(cfg.n())?;
    let sol = solve_with_warnings(&spec)?;
    write_file(dir, "phi.csv", &phi_csv(&spec, &sol))?;
    write_file(dir, "u.csv", &u_csv(&sol)?)?;
    let summary = format!(
        "beta = {}\nrelative_residual = {}\ncondition_estimate = {}\nwrote {}\n",
        fmt_num(spec.params.beta),
        fmt_num(sol.relative_residual()),
        fmt_num(sol.condition_estimate),
        dir.display()
    );
    Ok(Output { outputs: solution_outputs(&spec, &sol), provenance: provenance(cfg, json!({})), summary })
}

fn cmd_norm(cfg: &RunConfig, dir: &Path, orders: &[f64], file: &str) -> Result<Output> {
    let f = Expression::parse(&RunConfig::require(&cfg.f, "f")?)?;
    let w = cfg.weight()?;
    let v = analyze(&f, w, cfg.n(), cfg.q())?;
    let mut rows = Vec::new();
    let mut json_rows = Vec::new();
    for &s in orders {
        if !(s >= 0.0) || !s.is_finite() {
            return Err(Error::domain(format!("norm orders must be finite and >= 0, got {s}")));
        }
        let coef = sobolev_norm(&v, s);
        let kf = if s > 0.0 && s < 2.0 && s != 1.0 {
            Some(k_functional_norm(&v, s, s.ceil() as usize)?)
        } else {
            None
        };
        let (full, semi) = if s.fract() != 0.0 {
            (Some(full_weighted_norm(&f, w, s)?), Some(slobodeckij_seminorm(&f, w, s)?))
        } else {
            (Some(full_weighted_norm(&f, w, s)?), None)
        };
        let ratio = |x: Option<f64>| x.map(|x| x / coef);
        let opt = |x: Option<f64>| x.map(fmt_num).unwrap_or_default();
        rows.push(vec![
            fmt_num(s),
            fmt_num(coef),
            opt(kf),
            opt(full),
            opt(semi),
            opt(ratio(kf)),
            opt(ratio(full)),
        ]);
        json_rows.push(json!({
            "s": s,
            "coefficient_norm": coef,
            "k_functional_norm": kf,
            "slobodeckij_norm": full,
            "slobodeckij_seminorm": semi,
            "k_functional_ratio": ratio(kf),
            "slobodeckij_ratio": ratio(full),
        }));
    }
    let header =
        ["s", "coefficient_norm", "k_functional_norm", "slobodeckij_norm", "slobodeckij_seminorm", "k_functional_ratio", "slobodeckij_ratio"];
    let table = csv_table(&header, rows);
    write_file(dir, file, &table)?;
    Ok(Output {
        outputs: json!({ "weight": (w.a(), w.b()), "rows": json_rows }),
        provenance: provenance(cfg, json!({})),
        summary: table,
    })
}

fn cmd_predict(cfg: &RunConfig) -> Result<Output> {
    let p = cfg.params()?;
    let has_b = RunConfig::optional_expr(&cfg.b)?.is_some_and(|b| !b.is_constant(0.0));
    let has_c = RunConfig::optional_expr(&cfg.c)?.is_some_and(|c| !c.is_constant(0.0));
    let pred = predicted_regularity(&p, cfg.s(), has_b, has_c)?;
    let cont = continuity_threshold(&p);
    let outputs = json!({
        "beta": p.beta,
        "prediction": pred,
        "continuity_threshold": cont,
        "solution_continuous": cfg.s() > cont,
        "phi_in_c0": embedding_ck(pred.phi_order, p.trial_basis(), 0),
    });
    let summary = format!(
        "phi_order = {}{}\nu_unweighted_order = {}{}\n",
        fmt_num(pred.phi_order),
        if pred.phi_open { " (open)" } else { "" },
        fmt_num(pred.u_unweighted_order),
        if pred.u_open { " (open)" } else { "" },
    );
    Ok(Output { outputs, provenance: provenance(cfg, json!({})), summary })
}

fn cmd_decay(cfg: &RunConfig, dir: &Path) -> Result<Output> {
    let spec = cfg.problem(cfg.n())?;
    let sol = solve_with_warnings(&spec)?;
    let report = regularity_report(&spec, &sol, cfg.s())?;
    write_file(dir, "phi.csv", &phi_csv(&spec, &sol))?;
    let table = csv_table(
        &["k", "abs_phi_k"],
        sol.phi.coeffs().iter().enumerate().map(|(k, c)| vec![k.to_string(), fmt_num(c.abs())]),
    );
    write_file(dir, "decay.csv", &table)?;
    let summary = format!(
        "predicted phi_order = {}\nexpected slope = {}\nmeasured slope = {}\nverdict = {}\n",
        fmt_num(report.prediction.phi_order),
        fmt_num(report.expected_slope),
        report.decay.as_ref().map(|d| fmt_num(d.slope)).unwrap_or_else(|| "none".into()),
        serde_json::to_value(report.verdict).map_err(|e| Error::Io(e.to_string()))?.as_str().unwrap_or_default(),
    );
    let mut outputs = solution_outputs(&spec, &sol);
    outputs["report"] = serde_json::to_value(&report).map_err(|e| Error::Io(e.to_string()))?;
    Ok(Output { outputs, provenance: provenance(cfg, json!({})), summary })
}

fn cmd_converge(cfg: &RunConfig, dir: &Path) -> Result<Output> {
    let n = cfg.n();
    let levels = [n, 2 * n, 4 * n];
    let mut sols = Vec::new();
    for &m in &levels {
        sols.push(solve_with_warnings(&cfg.problem(m)?)?);
    }
    let finest = &sols[2];
    let end_value = |sol: &Solution, x: f64| synthesize(&sol.phi, x);
    let mut rows = Vec::new();
    let mut json_rows = Vec::new();
    for i in 0..2 {
        let (a, b) = (&sols[i], &sols[i + 1]);
        let half = levels[i] / 2;
        let agreement = (0..half.max(1))
            .map(|k| (a.phi.coeffs()[k] - b.phi.coeffs()[k]).abs())
            .fold(0.0, f64::max);
        let endpoint = [0.0, 1.0]
            .iter()
            .map(|&x| Ok((end_value(a, x)? - end_value(finest, x)?).abs()))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        rows.push(vec![levels[i].to_string(), levels[i + 1].to_string(), fmt_num(agreement), fmt_num(endpoint)]);
        json_rows.push(json!({
            "n": levels[i],
            "n_next": levels[i + 1],
            "coefficient_agreement": agreement,
            "endpoint_phi_error": endpoint,
            "relative_residual": a.relative_residual(),
        }));
    }
    let decay = measure_decay(&finest.phi, levels[2] / 4..=levels[2] / 2).ok();
    let table = csv_table(&["n", "n_next", "coefficient_agreement", "endpoint_phi_error"], rows);
    write_file(dir, "converge.csv", &table)?;
    Ok(Output {
        outputs: json!({ "levels": levels, "rows": json_rows, "finest_decay": decay }),
        provenance: provenance(cfg, json!({ "levels": levels })),
        summary: table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_rejects_unknown_fields() {
        assert!(matches!(RunConfig::from_json(r#"{"alpha": 1.5, "bogus": 1}"#), Err(Error::Config(_))));
        assert!(matches!(RunConfig::from_json("{not json"), Err(Error::Config(_))));
        let c = RunConfig::from_json(r#"{"alpha": 1.5, "r": 0.5, "N": 12, "f": "exp(x)"}"#).unwrap();
        assert_eq!((c.n(), c.q()), (12, 40));
    }

    #[test]
    fn flags_override_config() {
        let base = RunConfig::from_json(r#"{"alpha": 1.5, "r": 0.5, "N": 12}"#).unwrap();
        let merged = base.overlay(RunConfig { r: Some(0.2), ..Default::default() });
        assert_eq!((merged.alpha, merged.r, merged.n), (Some(1.5), Some(0.2), Some(12)));
    }

    #[test]
    fn number_format_round_trips() {
        for &x in &[0.1, 1.0 / 3.0, -2.5e-300, 6.02e23] {
            let s = fmt_num(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_num(0.75), "7.5000000000000000e-1");
    }

    #[test]
    fn beta_exit_codes() {
        assert_eq!(run(["fracspec", "beta", "--alpha", "1.5", "--r", "0.5"]), 0);
        assert_eq!(run(["fracspec", "beta", "--alpha", "2.5", "--r", "0.5"]), 2);
        assert_eq!(run(["fracspec", "beta", "--alpha", "1.5"]), 2);
        assert_eq!(run(["fracspec", "nonsense"]), 2);
    }

    #[test]
    fn predict_reports_advection_cap() {
        let args = CommonArgs { alpha: Some(1.5), r: Some(0.5), b: Some("1".into()), c: Some("1".into()), s: Some(10.0), ..Default::default() };
        let out = cmd_predict(&args.config().unwrap()).unwrap();
        assert!((out.outputs["prediction"]["phi_order"].as_f64().unwrap() - 2.75).abs() < 1e-12);
        assert_eq!(out.outputs["prediction"]["phi_open"], true);
    }
}
