//! Config-driven runs: load a problem, evaluate a list of bounds against an
//! oracle risk and render the comparison as a table, CSV or JSON.
//!
//! Config schema (one JSON document):
//!
//! ```text
//! {
//!   "problem": {"kind": "discrete", "channel": [[..], ..], "prior": [..], "loss": [[..], ..]?}
//!            | {"kind": "family", "name": "<family>", "params": {"<key>": number, ..}},
//!   "bounds": ["<bound>", ..],                  // optional, default: all applicable
//!   "informativity_methods": ["exact" | "marginal_center", ..],   // optional
//!   "oracle": "exact" | "closed_form" | {"mc": {"n_samples": N}},  // optional
//!   "seed": u64,                                // optional, default 0
//!   "output": "table" | "csv" | "json"          // optional, default table
//! }
//! ```
//!
//! Without `loss`, a discrete problem uses zero-one loss with one action per
//! parameter. CSV columns are `bound,f,informativity,exactness,value,oracle,status`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bounds::{
    birge_gushchin, classical_fano, general_bound, generalized_fano, le_cam_two_point, r0,
    sup_zero_ball, zero_one_bound, BoundReport, SmallBallProfile, ZeroOneKind,
};
use crate::divergence::{total_variation, ConvexGenerator};
use crate::error::{BoundError, Result};
use crate::informativity::{
    chi2_informativity_exact, hellinger_informativity_exact, informativity_via_center,
    mutual_information_exact, DiscreteProblem, InformativityEstimate,
};
use crate::oracle::{
    exact_bayes_risk, exact_minimax_upper, gaussian_conjugate_bayes_risk, mc_integrated_risk,
    Estimator, LocationPrior, McFamily, OracleResult,
};
use crate::zoo::{
    bounded_density_gaussian_bound, glm_bound, make_discrete, orthogonal_design, spiked_bound,
    uniform_ball_pipeline, DiscreteKind, FamilyPrior, GaussianLocationFamily, GlmModel,
    SpikedCovarianceFamily, UniformBallRoute,
};

pub const DISCRETE_BOUNDS: &[&str] = &[
    "generalized_fano",
    "fano",
    "chi2_zero_one",
    "tv_zero_one",
    "hellinger_zero_one",
    "phi_inversion",
    "general_kl",
    "general_chi2",
    "general_tv",
    "general_hellinger",
    "le_cam",
    "birge_gushchin_kl",
    "birge_gushchin_chi2",
];

pub const FAMILY_BOUNDS: &[&str] = &[
    "uniform_ball_chi2",
    "uniform_ball_kl_naive",
    "uniform_ball_kl_partitioned",
    "bounded_density",
    "glm",
    "spiked",
];

pub const INFORMATIVITY_METHODS: &[&str] = &["exact", "marginal_center"];

/// Family name and its required / optional parameters.
pub const FAMILIES: &[(&str, &[&str], &[&str])] = &[
    ("bsc", &["p"], &[]),
    ("orthogonal", &["n"], &[]),
    ("no_data", &["n", "m"], &[]),
    ("random_discrete", &["n_params", "n_obs"], &["n_actions", "general_loss"]),
    ("gaussian_location_ball", &["d", "sigma", "gamma"], &[]),
    ("gaussian_location_gaussian", &["d", "sigma", "tau"], &[]),
    ("logistic_glm", &["n", "d", "tau"], &["p"]),
    ("spiked_covariance", &["n", "d"], &["p"]),
];

/// Default Monte Carlo sample count when the config only says `"mc"`.
pub const DEFAULT_MC_SAMPLES: usize = 20_000;

const DOMINANCE_SLACK: f64 = 1e-9;
const MC_SIGMAS: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemConfig {
    Discrete {
        channel: Vec<Vec<f64>>,
        prior: Vec<f64>,
        #[serde(default)]
        loss: Option<Vec<Vec<f64>>>,
    },
    Family {
        name: String,
        #[serde(default)]
        params: BTreeMap<String, f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleChoice {
    Exact,
    ClosedForm,
    Mc { n_samples: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Table,
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "table" => Ok(Self::Table),
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown output format '{other}' (table, csv, json)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    #[serde(default)]
    pub bounds: Vec<String>,
    #[serde(default)]
    pub informativity_methods: Vec<String>,
    #[serde(default)]
    pub oracle: Option<OracleChoice>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: OutputFormat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

fn diag(path: impl Into<String>, message: impl Into<String>) -> Diagnostic {
    Diagnostic {
        path: path.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RowStatus {
    Pass,
    Fail,
    /// The bound does not apply to this input (e.g. a violated proviso).
    Skip,
    Error,
}

impl RowStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RowStatus::Pass => "PASS",
            RowStatus::Fail => "FAIL",
            RowStatus::Skip => "SKIP",
            RowStatus::Error => "ERROR",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub bound: String,
    pub f: String,
    pub informativity: String,
    pub exactness: String,
    pub informativity_value: Option<f64>,
    pub epsilon_used: Option<f64>,
    pub value: f64,
    pub oracle: f64,
    pub oracle_kind: String,
    pub oracle_std_error: Option<f64>,
    pub status: RowStatus,
    pub reason: Option<String>,
    pub parameters: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub problem: String,
    pub seed: u64,
    pub oracle: OracleResult,
    /// Minimax-risk upper bound, present for finite problems.
    pub minimax_oracle: Option<OracleResult>,
    pub rows: Vec<ReportRow>,
}

impl Report {
    /// 0 when every applicable bound passed its dominance check, 1 otherwise.
    pub fn exit_status(&self) -> i32 {
        let bad = self
            .rows
            .iter()
            .any(|r| matches!(r.status, RowStatus::Fail | RowStatus::Error));
        i32::from(bad)
    }
}

/// Schema check with JSON paths; empty means the config loads.
pub fn validate(config_text: &str) -> Vec<Diagnostic> {
    let value: Value = match serde_json::from_str(config_text) {
        Ok(v) => v,
        Err(e) => return vec![diag("$", format!("invalid JSON: {e}"))],
    };
    let mut out = structural_diagnostics(&value);
    if out.is_empty() {
        match serde_json::from_value::<RunConfig>(value) {
            Ok(cfg) => {
                if let Err(e) = build_problem(&cfg) {
                    out.push(diag("problem", e.to_string()));
                }
            }
            Err(e) => out.push(diag("$", e.to_string())),
        }
    }
    out
}

fn check_numeric_array(v: &Value, path: &str, out: &mut Vec<Diagnostic>) -> Option<Vec<f64>> {
    let Some(items) = v.as_array() else {
        out.push(diag(path, "expected an array of numbers"));
        return None;
    };
    let mut nums = Vec::with_capacity(items.len());
    for (i, x) in items.iter().enumerate() {
        match x.as_f64() {
            Some(n) => nums.push(n),
            None => {
                out.push(diag(format!("{path}[{i}]"), "expected a number"));
                return None;
            }
        }
    }
    Some(nums)
}

fn check_simplex(weights: &[f64], path: &str, out: &mut Vec<Diagnostic>) {
    for (i, w) in weights.iter().enumerate() {
        if !(w.is_finite() && *w >= 0.0) {
            out.push(diag(format!("{path}[{i}]"), format!("weight {w} is negative or not finite")));
            return;
        }
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        out.push(diag(path, format!("weights sum to {total}, expected 1")));
    }
}

fn structural_diagnostics(value: &Value) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let Some(obj) = value.as_object() else {
        return vec![diag("$", "expected a JSON object")];
    };
    for key in obj.keys() {
        if !["problem", "bounds", "informativity_methods", "oracle", "seed", "output"].contains(&key.as_str()) {
            out.push(diag(key.clone(), "unknown field"));
        }
    }
    let mut is_discrete = true;
    match obj.get("problem") {
        None => out.push(diag("problem", "missing")),
        Some(p) => match p.get("kind").and_then(Value::as_str) {
            Some("discrete") => {
                let mut n_obs = None;
                let mut n_rows = None;
                match p.get("channel").and_then(Value::as_array) {
                    None => out.push(diag("problem.channel", "expected a matrix (array of rows)")),
                    Some(rows) => {
                        n_rows = Some(rows.len());
                        for (i, row) in rows.iter().enumerate() {
                            let path = format!("problem.channel[{i}]");
                            if let Some(r) = check_numeric_array(row, &path, &mut out) {
                                if *n_obs.get_or_insert(r.len()) != r.len() {
                                    out.push(diag(&path, format!("row has {} entries, expected {}", r.len(), n_obs.unwrap_or(0))));
                                }
                                check_simplex(&r, &path, &mut out);
                            }
                        }
                    }
                }
                match p.get("prior") {
                    None => out.push(diag("problem.prior", "missing")),
                    Some(prior) => {
                        if let Some(w) = check_numeric_array(prior, "problem.prior", &mut out) {
                            if let Some(n) = n_rows {
                                if w.len() != n {
                                    out.push(diag("problem.prior", format!("{} weights for {n} channel rows", w.len())));
                                }
                            }
                            check_simplex(&w, "problem.prior", &mut out);
                        }
                    }
                }
                if let Some(loss) = p.get("loss").filter(|l| !l.is_null()) {
                    match loss.as_array() {
                        None => out.push(diag("problem.loss", "expected a matrix (array of rows)")),
                        Some(rows) => {
                            for (i, row) in rows.iter().enumerate() {
                                let path = format!("problem.loss[{i}]");
                                if let Some(r) = check_numeric_array(row, &path, &mut out) {
                                    if let Some(j) = r.iter().position(|x| !(x.is_finite() && *x >= 0.0)) {
                                        out.push(diag(format!("{path}[{j}]"), "loss must be finite and nonnegative"));
                                    }
                                }
                            }
                        }
                    }
                }
            }
            Some("family") => {
                is_discrete = false;
                let name = p.get("name").and_then(Value::as_str);
                match name.and_then(|n| FAMILIES.iter().find(|f| f.0 == n)) {
                    None => {
                        let known: Vec<&str> = FAMILIES.iter().map(|f| f.0).collect();
                        out.push(diag(
                            "problem.name",
                            format!("unknown family {:?}; registered families: {}", name.unwrap_or(""), known.join(", ")),
                        ));
                    }
                    Some((fam, required, optional)) => {
                        is_discrete = matches!(*fam, "bsc" | "orthogonal" | "no_data" | "random_discrete");
                        let params = p.get("params").and_then(Value::as_object);
                        for key in *required {
                            if params.and_then(|m| m.get(*key)).and_then(Value::as_f64).is_none() {
                                out.push(diag(format!("problem.params.{key}"), "missing numeric parameter"));
                            }
                        }
                        if let Some(m) = params {
                            for (key, v) in m {
                                if !required.contains(&key.as_str()) && !optional.contains(&key.as_str()) {
                                    out.push(diag(format!("problem.params.{key}"), format!("not a parameter of {fam}")));
                                } else if v.as_f64().is_none() {
                                    out.push(diag(format!("problem.params.{key}"), "expected a number"));
                                }
                            }
                        }
                    }
                }
            }
            _ => out.push(diag("problem.kind", "expected \"discrete\" or \"family\"")),
        },
    }
    if let Some(b) = obj.get("bounds") {
        match b.as_array() {
            None => out.push(diag("bounds", "expected an array of bound names")),
            Some(items) => {
                let registry = if is_discrete { DISCRETE_BOUNDS } else { FAMILY_BOUNDS };
                for (i, item) in items.iter().enumerate() {
                    let name = item.as_str().unwrap_or("");
                    if !registry.contains(&name) {
                        out.push(diag(
                            format!("bounds[{i}]"),
                            format!("unknown bound {name:?}; registered bounds: {}", registry.join(", ")),
                        ));
                    }
                }
            }
        }
    }
    if let Some(m) = obj.get("informativity_methods") {
        match m.as_array() {
            None => out.push(diag("informativity_methods", "expected an array")),
            Some(items) => {
                for (i, item) in items.iter().enumerate() {
                    let name = item.as_str().unwrap_or("");
                    if !INFORMATIVITY_METHODS.contains(&name) {
                        out.push(diag(
                            format!("informativity_methods[{i}]"),
                            format!("unknown method {name:?}; registered methods: {}", INFORMATIVITY_METHODS.join(", ")),
                        ));
                    }
                }
            }
        }
    }
    if let Some(s) = obj.get("seed") {
        if s.as_u64().is_none() {
            out.push(diag("seed", "expected a nonnegative integer"));
        }
    }
    if let Some(o) = obj.get("output") {
        if o.as_str().and_then(|s| s.parse::<OutputFormat>().ok()).is_none() {
            out.push(diag("output", "expected \"table\", \"csv\" or \"json\""));
        }
    }
    if let Some(o) = obj.get("oracle") {
        let ok = match o {
            Value::String(s) => matches!(s.as_str(), "exact" | "closed_form" | "mc"),
            Value::Object(m) => m
                .get("mc")
                .and_then(|v| v.get("n_samples"))
                .and_then(Value::as_u64)
                .is_some_and(|n| n >= crate::oracle::MIN_MC_SAMPLES as u64),
            _ => false,
        };
        if !ok {
            out.push(diag(
                "oracle",
                format!(
                    "expected \"exact\", \"closed_form\", \"mc\" or {{\"mc\": {{\"n_samples\": n}}}} with n >= {}",
                    crate::oracle::MIN_MC_SAMPLES
                ),
            ));
        }
    }
    out
}

/// Parses a config; a bare `"mc"` oracle gets [`DEFAULT_MC_SAMPLES`].
pub fn parse_config(config_text: &str) -> std::result::Result<RunConfig, Vec<Diagnostic>> {
    let diagnostics = validate(config_text);
    if !diagnostics.is_empty() {
        return Err(diagnostics);
    }
    let mut value: Value = serde_json::from_str(config_text).map_err(|e| vec![diag("$", e.to_string())])?;
    if value.get("oracle").and_then(Value::as_str) == Some("mc") {
        value["oracle"] = serde_json::json!({"mc": {"n_samples": DEFAULT_MC_SAMPLES}});
    }
    serde_json::from_value(value).map_err(|e| vec![diag("$", e.to_string())])
}

enum Problem {
    Discrete(DiscreteProblem),
    UniformBall(GaussianLocationFamily),
    GaussianPrior { family: GaussianLocationFamily, tau: f64 },
    Glm { model: GlmModel, p: f64 },
    Spiked { family: SpikedCovarianceFamily, p: f64 },
}

fn param(params: &BTreeMap<String, f64>, key: &str) -> Result<f64> {
    params
        .get(key)
        .copied()
        .ok_or_else(|| BoundError::InvalidProblem(format!("missing parameter {key}")))
}

fn count_param(params: &BTreeMap<String, f64>, key: &str) -> Result<usize> {
    let v = param(params, key)?;
    if v < 0.0 || v.fract() != 0.0 || v > 1e9 {
        return Err(BoundError::InvalidProblem(format!("parameter {key} = {v} must be a nonnegative integer")));
    }
    Ok(v as usize)
}

fn build_problem(config: &RunConfig) -> Result<Problem> {
    match &config.problem {
        ProblemConfig::Discrete { channel, prior, loss } => {
            let p = match loss {
                Some(l) => DiscreteProblem::new(channel.clone(), prior.clone(), l.clone())?,
                None => DiscreteProblem::zero_one(channel.clone(), prior.clone())?,
            };
            Ok(Problem::Discrete(p))
        }
        ProblemConfig::Family { name, params } => {
            let opt = |key: &str, default: f64| params.get(key).copied().unwrap_or(default);
            match name.as_str() {
                "bsc" => Ok(Problem::Discrete(make_discrete(DiscreteKind::Bsc { p: param(params, "p")? }, config.seed)?)),
                "orthogonal" => Ok(Problem::Discrete(make_discrete(
                    DiscreteKind::Orthogonal { n: count_param(params, "n")? },
                    config.seed,
                )?)),
                "no_data" => Ok(Problem::Discrete(make_discrete(
                    DiscreteKind::NoData {
                        n: count_param(params, "n")?,
                        m: count_param(params, "m")?,
                    },
                    config.seed,
                )?)),
                "random_discrete" => {
                    let n_params = count_param(params, "n_params")?;
                    let n_actions = if params.contains_key("n_actions") {
                        count_param(params, "n_actions")?
                    } else {
                        n_params
                    };
                    Ok(Problem::Discrete(make_discrete(
                        DiscreteKind::Random {
                            n_params,
                            n_obs: count_param(params, "n_obs")?,
                            n_actions,
                            general_loss: opt("general_loss", 0.0) != 0.0,
                        },
                        config.seed,
                    )?))
                }
                "gaussian_location_ball" => Ok(Problem::UniformBall(GaussianLocationFamily::new(
                    count_param(params, "d")?,
                    param(params, "sigma")?,
                    FamilyPrior::UniformBall { gamma: param(params, "gamma")? },
                )?)),
                "gaussian_location_gaussian" => {
                    let d = count_param(params, "d")?;
                    let tau = param(params, "tau")?;
                    if !(tau > 0.0) {
                        return Err(BoundError::InvalidProblem(format!("tau must be positive, got {tau}")));
                    }
                    let w = (2.0 * std::f64::consts::PI * tau * tau).powf(-(d as f64) / 2.0);
                    let family = GaussianLocationFamily::new(
                        d,
                        param(params, "sigma")?,
                        FamilyPrior::BoundedDensity { w, v: tau * tau },
                    )?;
                    Ok(Problem::GaussianPrior { family, tau })
                }
                "logistic_glm" => {
                    let (n, d) = (count_param(params, "n")?, count_param(params, "d")?);
                    if n == 0 || d == 0 {
                        return Err(BoundError::InvalidProblem("n and d must be at least 1".into()));
                    }
                    let model = GlmModel::new(orthogonal_design(n, d), 1.0, 0.25, param(params, "tau")?)?;
                    Ok(Problem::Glm { model, p: opt("p", 2.0) })
                }
                "spiked_covariance" => Ok(Problem::Spiked {
                    family: SpikedCovarianceFamily::new(count_param(params, "n")?, count_param(params, "d")?)?,
                    p: opt("p", 2.0),
                }),
                other => Err(BoundError::InvalidProblem(format!("unknown family {other}"))),
            }
        }
    }
}

fn describe(config: &RunConfig) -> String {
    match &config.problem {
        ProblemConfig::Discrete { channel, .. } => format!("discrete({}x{})", channel.len(), channel.first().map_or(0, Vec::len)),
        ProblemConfig::Family { name, params } => {
            let args: Vec<String> = params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            format!("{name}({})", args.join(","))
        }
    }
}

struct Evaluated {
    bound: String,
    result: Result<BoundReport>,
    minimax: bool,
}

fn informativity_for(f: &str, method: &str, problem: &DiscreteProblem) -> Result<InformativityEstimate> {
    let marginal = problem.marginal();
    match (f, method) {
        ("kl", _) => Ok(mutual_information_exact(problem)),
        ("chi2", "exact") => Ok(chi2_informativity_exact(problem)),
        ("hellinger", "exact") => Ok(hellinger_informativity_exact(problem)),
        ("chi2", _) => informativity_via_center(&ConvexGenerator::chi2(), problem, &marginal),
        ("hellinger", _) => informativity_via_center(&ConvexGenerator::hellinger(), problem, &marginal),
        ("tv", _) => informativity_via_center(&ConvexGenerator::tv(), problem, &marginal),
        _ => Err(BoundError::Unsupported(format!("no informativity route for {f}"))),
    }
}

fn generator(f: &str) -> ConvexGenerator {
    match f {
        "chi2" => ConvexGenerator::chi2(),
        "tv" => ConvexGenerator::tv(),
        "hellinger" => ConvexGenerator::hellinger(),
        _ => ConvexGenerator::kl(),
    }
}

fn evaluate_discrete(problem: &DiscreteProblem, bounds: &[String], methods: &[String]) -> Vec<Evaluated> {
    let mut out = Vec::new();
    let zero_one_needed = || -> Result<f64> {
        if !problem.is_zero_one() {
            return Err(BoundError::Unsupported("bound needs a zero-one loss".into()));
        }
        r0(problem)
    };
    for name in bounds {
        let uses_info: Option<&str> = match name.as_str() {
            "generalized_fano" | "fano" | "phi_inversion" | "general_kl" => Some("kl"),
            "chi2_zero_one" | "general_chi2" => Some("chi2"),
            "tv_zero_one" | "general_tv" => Some("tv"),
            "general_hellinger" => Some("hellinger"),
            _ => None,
        };
        let mut seen: Vec<String> = Vec::new();
        let per_method: Vec<&str> = match uses_info {
            Some(_) => methods.iter().map(String::as_str).collect(),
            None => vec!["-"],
        };
        for method in per_method {
            let est = uses_info.map(|f| informativity_for(f, method, problem));
            if let Some(Ok(e)) = &est {
                // methods that collapse to the same route produce one row
                if seen.contains(&e.method) {
                    continue;
                }
                seen.push(e.method.clone());
            }
            let result = (|| -> Result<BoundReport> {
                let info = match &est {
                    Some(Ok(e)) => Some(e.clone()),
                    Some(Err(e)) => return Err(e.clone()),
                    None => None,
                };
                let i = info.as_ref().map_or(0.0, |e| e.value);
                let report = match name.as_str() {
                    "generalized_fano" => {
                        let r = zero_one_needed()?;
                        let zb = sup_zero_ball(problem);
                        if zb >= 1.0 {
                            return Ok(BoundReport::invalid(name, "some action has zero loss everywhere".into()));
                        }
                        if zb <= 0.0 {
                            return Ok(BoundReport::invalid(name, "no action has zero loss anywhere".into()));
                        }
                        BoundReport::new(name, generalized_fano(i, r, zb)?).with_f("kl")
                    }
                    "fano" => {
                        zero_one_needed()?;
                        let n = problem.n_params();
                        let uniform = problem.prior().weights().iter().all(|w| (w - 1.0 / n as f64).abs() < 1e-12);
                        if !uniform || problem.n_actions() != n {
                            return Ok(BoundReport::invalid(name, "needs a uniform prior over N = A hypotheses".into()));
                        }
                        BoundReport::new(name, classical_fano(i, n)?).with_f("kl")
                    }
                    "chi2_zero_one" => zero_one_bound(&ZeroOneKind::Chi2, i, zero_one_needed()?)?,
                    "tv_zero_one" => zero_one_bound(&ZeroOneKind::Tv, i, zero_one_needed()?)?,
                    "hellinger_zero_one" => {
                        let r = zero_one_needed()?;
                        zero_one_bound(&ZeroOneKind::Hellinger, problem.hellinger_pair_average(), r)?
                    }
                    "phi_inversion" => zero_one_bound(&ZeroOneKind::Generic(ConvexGenerator::kl()), i, zero_one_needed()?)?,
                    "general_kl" | "general_chi2" | "general_tv" | "general_hellinger" => {
                        let f = generator(uses_info.unwrap_or("kl"));
                        general_bound(&f, i, &SmallBallProfile::from_problem(problem))?
                    }
                    "le_cam" => {
                        zero_one_needed()?;
                        if problem.n_params() != 2 {
                            return Ok(BoundReport::invalid(name, "needs exactly two hypotheses".into()));
                        }
                        let loss = problem.loss();
                        if (0..problem.n_actions()).any(|a| loss[0][a] + loss[1][a] < 1.0) {
                            return Ok(BoundReport::invalid(name, "some action has zero loss under both hypotheses".into()));
                        }
                        let tv = total_variation(&problem.channel()[0], &problem.channel()[1])?;
                        BoundReport::new(name, le_cam_two_point(tv)?).with_f("tv").with_param("tv", tv)
                    }
                    "birge_gushchin_kl" | "birge_gushchin_chi2" => {
                        zero_one_needed()?;
                        if !problem.is_identification() || problem.n_params() < 2 {
                            return Ok(BoundReport::invalid(name, "needs N + 1 >= 2 hypotheses under the identification loss".into()));
                        }
                        let f = if name.ends_with("kl") { ConvexGenerator::kl() } else { ConvexGenerator::chi2() };
                        birge_gushchin(&f, &problem.pairwise_divergences(&f))?
                    }
                    other => return Err(BoundError::InvalidProblem(format!("unknown bound {other}"))),
                };
                Ok(match info {
                    Some(e) => report.with_informativity(e),
                    None => report,
                })
            })();
            out.push(Evaluated {
                bound: name.clone(),
                result,
                minimax: matches!(name.as_str(), "le_cam" | "birge_gushchin_kl" | "birge_gushchin_chi2"),
            });
        }
    }
    out
}

fn evaluate_family(problem: &Problem, bounds: &[String]) -> Vec<Evaluated> {
    bounds
        .iter()
        .map(|name| {
            let result = match (name.as_str(), problem) {
                ("uniform_ball_chi2", Problem::UniformBall(f)) => uniform_ball_pipeline(f, UniformBallRoute::Chi2),
                ("uniform_ball_kl_naive", Problem::UniformBall(f)) => uniform_ball_pipeline(f, UniformBallRoute::KlNaive),
                ("uniform_ball_kl_partitioned", Problem::UniformBall(f)) => {
                    uniform_ball_pipeline(f, UniformBallRoute::KlPartitioned)
                }
                ("bounded_density", Problem::GaussianPrior { family, .. }) => bounded_density_gaussian_bound(family, None),
                ("glm", Problem::Glm { model, p }) => glm_bound(model, *p),
                ("spiked", Problem::Spiked { family, p }) => spiked_bound(family, *p),
                (other, _) => Err(BoundError::Unsupported(format!("bound {other} does not apply to this family"))),
            };
            Evaluated {
                bound: name.clone(),
                result,
                minimax: false,
            }
        })
        .collect()
}

fn default_bounds(problem: &Problem) -> Vec<String> {
    let names: &[&str] = match problem {
        Problem::Discrete(_) => DISCRETE_BOUNDS,
        Problem::UniformBall(_) => &["uniform_ball_chi2", "uniform_ball_kl_naive", "uniform_ball_kl_partitioned"],
        Problem::GaussianPrior { .. } => &["bounded_density"],
        Problem::Glm { .. } => &["glm"],
        Problem::Spiked { .. } => &["spiked"],
    };
    names.iter().map(|s| s.to_string()).collect()
}

fn compute_oracle(problem: &Problem, choice: Option<OracleChoice>, seed: u64) -> Result<OracleResult> {
    let mc_family = |n_samples: usize| -> Result<OracleResult> {
        let (family, estimator) = match problem {
            Problem::Discrete(_) => return Err(BoundError::Unsupported("finite problems use the exact oracle".into())),
            Problem::UniformBall(f) => {
                let FamilyPrior::UniformBall { gamma } = f.prior else { unreachable!() };
                (
                    McFamily::GaussianLocation {
                        d: f.d,
                        sigma: f.sigma,
                        prior: LocationPrior::UniformBall { gamma },
                    },
                    Estimator::ProjectionLse,
                )
            }
            Problem::GaussianPrior { family, tau } => (
                McFamily::GaussianLocation {
                    d: family.d,
                    sigma: family.sigma,
                    prior: LocationPrior::Gaussian { tau: *tau },
                },
                Estimator::Mle,
            ),
            Problem::Glm { model, p } => (
                McFamily::LogisticGlm {
                    design: model.design.clone(),
                    tau: model.tau,
                    p: *p,
                },
                Estimator::RidgeLogistic {
                    lambda: 1.0 / (model.tau * model.tau),
                },
            ),
            Problem::Spiked { family, p } => (
                McFamily::SpikedCovariance {
                    n: family.n,
                    d: family.d,
                    p: *p,
                },
                Estimator::PcaTop,
            ),
        };
        mc_integrated_risk(&family, estimator, n_samples, seed)
    };
    match (choice, problem) {
        (None | Some(OracleChoice::Exact), Problem::Discrete(p)) => Ok(exact_bayes_risk(p)),
        (None | Some(OracleChoice::ClosedForm), Problem::GaussianPrior { family, tau }) => {
            gaussian_conjugate_bayes_risk(family.d, family.sigma, *tau)
        }
        (Some(OracleChoice::Mc { n_samples }), _) => mc_family(n_samples),
        (None, _) => mc_family(DEFAULT_MC_SAMPLES),
        (Some(c), _) => Err(BoundError::Unsupported(format!("oracle {c:?} is not available for this problem"))),
    }
}

/// Runs every requested bound against the oracle. Errors are configuration
/// problems (exit status 2); dominance failures are reported in the rows.
pub fn run(config: &RunConfig) -> Result<Report> {
    let problem = build_problem(config)?;
    let bounds = if config.bounds.is_empty() {
        default_bounds(&problem)
    } else {
        config.bounds.clone()
    };
    let registry = match problem {
        Problem::Discrete(_) => DISCRETE_BOUNDS,
        _ => FAMILY_BOUNDS,
    };
    if let Some(b) = bounds.iter().find(|b| !registry.contains(&b.as_str())) {
        return Err(BoundError::InvalidProblem(format!(
            "unknown bound {b:?}; registered bounds: {}",
            registry.join(", ")
        )));
    }
    let methods = if config.informativity_methods.is_empty() {
        vec!["exact".to_string()]
    } else {
        config.informativity_methods.clone()
    };
    let oracle = compute_oracle(&problem, config.oracle, config.seed)?;
    let (evaluated, minimax_oracle) = match &problem {
        Problem::Discrete(p) => (evaluate_discrete(p, &bounds, &methods), Some(exact_minimax_upper(p))),
        other => (evaluate_family(other, &bounds), None),
    };
    let rows = evaluated
        .into_iter()
        .map(|ev| {
            let reference = match (&minimax_oracle, ev.minimax) {
                (Some(m), true) => m,
                _ => &oracle,
            };
            to_row(ev, reference)
        })
        .collect();
    Ok(Report {
        problem: describe(config),
        seed: config.seed,
        oracle,
        minimax_oracle,
        rows,
    })
}

fn to_row(ev: Evaluated, reference: &OracleResult) -> ReportRow {
    let oracle_kind = match reference.kind {
        crate::oracle::OracleKind::Exact => "exact",
        crate::oracle::OracleKind::ClosedForm => "closed_form",
        crate::oracle::OracleKind::MonteCarlo => "mc",
    };
    let mut row = ReportRow {
        bound: ev.bound,
        f: "-".into(),
        informativity: "-".into(),
        exactness: "-".into(),
        informativity_value: None,
        epsilon_used: None,
        value: f64::NAN,
        oracle: reference.risk,
        oracle_kind: oracle_kind.into(),
        oracle_std_error: reference.std_error,
        status: RowStatus::Error,
        reason: None,
        parameters: BTreeMap::new(),
    };
    match ev.result {
        Err(BoundError::Unsupported(reason)) => {
            row.status = RowStatus::Skip;
            row.reason = Some(reason);
        }
        Err(e) => row.reason = Some(e.to_string()),
        Ok(b) => {
            row.value = b.value;
            row.f = b.f_label.clone().unwrap_or_else(|| "-".into());
            if let Some(info) = &b.informativity_input {
                row.informativity = info.method.clone();
                row.exactness = info.exactness.to_string();
                row.informativity_value = Some(info.value);
                row.epsilon_used = info.epsilon_used;
            }
            row.parameters = b.parameters;
            row.reason = b.reason;
            let ceiling = reference.upper(MC_SIGMAS) + DOMINANCE_SLACK;
            row.status = if !b.valid {
                RowStatus::Skip
            } else if b.value <= ceiling {
                RowStatus::Pass
            } else {
                RowStatus::Fail
            };
        }
    }
    row
}

pub const CSV_HEADER: [&str; 7] = ["bound", "f", "informativity", "exactness", "value", "oracle", "status"];

/// CSV rows; `prefix` (when given) is prepended to the bound column.
pub fn write_csv(reports: &[(Option<&str>, &Report)]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    // writing to memory cannot fail
    w.write_record(CSV_HEADER).expect("in-memory csv");
    for (prefix, report) in reports {
        for r in &report.rows {
            let bound = match prefix {
                Some(p) => format!("{p}/{}", r.bound),
                None => r.bound.clone(),
            };
            w.write_record([
                bound,
                r.f.clone(),
                r.informativity.clone(),
                r.exactness.clone(),
                format!("{:e}", r.value),
                format!("{:e}", r.oracle),
                r.status.as_str().to_string(),
            ])
            .expect("in-memory csv");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv output is utf-8")
}

pub fn write_table(report: &Report) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "problem: {}  seed: {}", report.problem, report.seed);
    let se = report.oracle.std_error.map(|e| format!(" ± {e:.3e}")).unwrap_or_default();
    let _ = writeln!(s, "oracle ({:?}): {:.6e}{se}", report.oracle.kind, report.oracle.risk);
    if let Some(m) = &report.minimax_oracle {
        let _ = writeln!(s, "minimax upper: {:.6e}", m.risk);
    }
    let _ = writeln!(
        s,
        "{:<28} {:<10} {:<22} {:<12} {:>14} {:>14}  status",
        "bound", "f", "informativity", "exactness", "value", "oracle"
    );
    for r in &report.rows {
        let _ = write!(
            s,
            "{:<28} {:<10} {:<22} {:<12} {:>14.6e} {:>14.6e}  {}",
            r.bound,
            r.f,
            r.informativity,
            r.exactness,
            r.value,
            r.oracle,
            r.status.as_str()
        );
        if let Some(reason) = &r.reason {
            let _ = write!(s, "  ({reason})");
        }
        s.push('\n');
    }
    s
}

pub fn write_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes") + "\n"
}

pub fn render(report: &Report, format: OutputFormat) -> String {
    match format {
        OutputFormat::Table => write_table(report),
        OutputFormat::Csv => write_csv(&[(None, report)]),
        OutputFormat::Json => write_json(report),
    }
}

/// Seed precedence: `--seed` flag, then `BAYESBOUND_SEED`, then the config.
pub fn resolve_seed(config_seed: u64, env: Option<&str>, flag: Option<u64>) -> std::result::Result<u64, String> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match env {
        Some(v) => v
            .trim()
            .parse::<u64>()
            .map_err(|_| format!("BAYESBOUND_SEED={v:?} is not a nonnegative integer")),
        None => Ok(config_seed),
    }
}

/// Built-in corpus run by `suite`: `(case name, config)` pairs.
pub fn suite_corpus(mc_samples: usize) -> Vec<(String, RunConfig)> {
    let discrete = |name: &str, params: &[(&str, f64)]| ProblemConfig::Family {
        name: name.to_string(),
        params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
    };
    let all_methods = vec!["exact".to_string(), "marginal_center".to_string()];
    let mk = |case: &str, problem: ProblemConfig, oracle: Option<OracleChoice>, methods: Vec<String>| {
        (
            case.to_string(),
            RunConfig {
                problem,
                bounds: Vec::new(),
                informativity_methods: methods,
                oracle,
                seed: 0,
                output: OutputFormat::Csv,
            },
        )
    };
    let mc = Some(OracleChoice::Mc { n_samples: mc_samples });
    vec![
        mk("bsc", discrete("bsc", &[("p", 0.1)]), None, all_methods.clone()),
        mk("orthogonal", discrete("orthogonal", &[("n", 4.0)]), None, all_methods.clone()),
        mk("no_data", discrete("no_data", &[("n", 5.0), ("m", 3.0)]), None, all_methods.clone()),
        mk(
            "random_zero_one",
            discrete("random_discrete", &[("n_params", 5.0), ("n_obs", 6.0)]),
            None,
            all_methods.clone(),
        ),
        mk(
            "random_general",
            discrete("random_discrete", &[("n_params", 4.0), ("n_obs", 5.0), ("n_actions", 6.0), ("general_loss", 1.0)]),
            None,
            all_methods,
        ),
        mk(
            "uniform_ball",
            discrete("gaussian_location_ball", &[("d", 2.0), ("sigma", 1.0), ("gamma", 10.0 * 2f64.sqrt())]),
            mc,
            Vec::new(),
        ),
        mk(
            "gaussian_prior",
            discrete("gaussian_location_gaussian", &[("d", 3.0), ("sigma", 1.0), ("tau", 2.0)]),
            Some(OracleChoice::ClosedForm),
            Vec::new(),
        ),
        mk(
            "logistic_glm",
            discrete("logistic_glm", &[("n", 50.0), ("d", 2.0), ("tau", 1.0)]),
            mc,
            Vec::new(),
        ),
        mk(
            "spiked_covariance",
            discrete("spiked_covariance", &[("n", 200.0), ("d", 4.0)]),
            mc,
            Vec::new(),
        ),
    ]
}

/// Runs the corpus with per-case seeds derived from `seed`.
pub fn run_suite(seed: u64, mc_samples: usize) -> Result<Vec<(String, Report)>> {
    suite_corpus(mc_samples)
        .into_iter()
        .enumerate()
        .map(|(k, (name, mut cfg))| {
            cfg.seed = seed.wrapping_add(k as u64);
            run(&cfg).map(|r| (name, r))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bsc_config(bounds: &[&str]) -> String {
        serde_json::json!({
            "problem": {"kind": "discrete", "channel": [[0.9, 0.1], [0.1, 0.9]], "prior": [0.5, 0.5]},
            "bounds": bounds,
            "output": "csv"
        })
        .to_string()
    }

    #[test]
    fn bsc_run_passes() {
        let cfg = parse_config(&bsc_config(&["generalized_fano", "chi2_zero_one", "le_cam"])).unwrap();
        let report = run(&cfg).unwrap();
        assert_eq!(report.rows.len(), 3);
        assert!((report.oracle.risk - 0.1).abs() < 1e-12);
        for r in &report.rows {
            assert!(r.value <= 0.1 + 1e-9, "{}: {}", r.bound, r.value);
            assert_eq!(r.status, RowStatus::Pass);
        }
        assert_eq!(report.exit_status(), 0);
    }

    #[test]
    fn uniform_ball_config_has_routes() {
        let text = serde_json::json!({
            "problem": {"kind": "family", "name": "gaussian_location_ball", "params": {"d": 2, "sigma": 1, "gamma": 14.142135623730951}},
            "oracle": {"mc": {"n_samples": 2000}},
            "seed": 3
        })
        .to_string();
        let report = run(&parse_config(&text).unwrap()).unwrap();
        let names: Vec<&str> = report.rows.iter().map(|r| r.bound.as_str()).collect();
        assert!(names.contains(&"uniform_ball_chi2"));
        assert!(names.contains(&"uniform_ball_kl_partitioned"));
        assert_eq!(report.exit_status(), 0);
    }

    #[test]
    fn malformed_row_is_reported_with_index() {
        let text = serde_json::json!({
            "problem": {"kind": "discrete", "channel": [[0.5, 0.5], [0.5, 0.4]], "prior": [0.5, 0.5]}
        })
        .to_string();
        let d = validate(&text);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].path, "problem.channel[1]");
        assert!(d[0].message.contains("0.9"), "{}", d[0].message);
        assert!(parse_config(&text).is_err());
    }

    #[test]
    fn validate_examples() {
        assert!(validate(&bsc_config(&[])).is_empty());
        let neg = serde_json::json!({
            "problem": {"kind": "discrete", "channel": [[1.0], [1.0], [1.0]], "prior": [0.6, -0.1, 0.5]}
        })
        .to_string();
        let d = validate(&neg);
        assert_eq!(d.len(), 1, "{d:?}");
        assert_eq!(d[0].path, "problem.prior[1]");
        let unknown = validate(&bsc_config(&["nope"]));
        assert_eq!(unknown.len(), 1);
        assert_eq!(unknown[0].path, "bounds[0]");
        assert!(unknown[0].message.contains("registered bounds"));
        assert!(!validate("{").is_empty());
    }

    #[test]
    fn seed_precedence() {
        assert_eq!(resolve_seed(1, None, None), Ok(1));
        assert_eq!(resolve_seed(1, Some("7"), None), Ok(7));
        assert_eq!(resolve_seed(1, Some("7"), Some(9)), Ok(9));
        assert!(resolve_seed(1, Some("x"), None).is_err());
    }

    #[test]
    fn csv_is_reproducible() {
        let text = serde_json::json!({
            "problem": {"kind": "family", "name": "spiked_covariance", "params": {"n": 40, "d": 2}},
            "oracle": {"mc": {"n_samples": 1000}},
            "seed": 11
        })
        .to_string();
        let cfg = parse_config(&text).unwrap();
        let a = write_csv(&[(None, &run(&cfg).unwrap())]);
        let b = write_csv(&[(None, &run(&cfg).unwrap())]);
        assert_eq!(a, b);
        assert!(a.starts_with("bound,f,informativity,exactness,value,oracle,status\n"));
    }

    #[test]
    fn mismatched_oracle_is_config_error() {
        let text = serde_json::json!({
            "problem": {"kind": "discrete", "channel": [[1.0]], "prior": [1.0]},
            "oracle": "closed_form"
        })
        .to_string();
        assert!(run(&parse_config(&text).unwrap()).is_err());
    }
}
