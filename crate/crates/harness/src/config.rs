//! Flat `key = value` experiment configuration.
//!
//! Lists are comma-separated. `ratios` also accepts `logspace:<lo>:<hi>:<n>`
//! and `budgets` accepts `pow2:<lo>:<hi>` tokens. `#` starts a comment.

use std::collections::HashMap;
use std::fmt;

use oneshot_core::estimators::EstimatorSpec;
use oneshot_core::objectives::ObjectiveName;
use oneshot_core::sampling::{Rescaling, SamplerKind, SamplerSpec};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    SweepRatio,
    RateFit,
    Compare,
}

impl Experiment {
    pub fn label(self) -> &'static str {
        match self {
            Experiment::SweepRatio => "sweep-ratio",
            Experiment::RateFit => "rate-fit",
            Experiment::Compare => "compare",
        }
    }
}

/// How the optimum of each run is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimumLaw {
    /// Uniform in the ball of radius `optimum_radius`.
    Ball,
    /// Standard Gaussian in `R^d`.
    Gaussian,
}

/// A sampler paired with an estimator, labelled `<sampler>/<estimator>`.
#[derive(Debug, Clone, PartialEq)]
pub struct Method {
    pub label: String,
    pub sampler: SamplerSpec,
    pub estimator: EstimatorSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub objectives: Vec<ObjectiveName>,
    pub dims: Vec<usize>,
    pub r: f64,
    pub optimum_radius: f64,
    pub optimum: OptimumLaw,
    pub budgets: Vec<usize>,
    pub ratios: Vec<f64>,
    pub estimators: Vec<EstimatorSpec>,
    pub methods: Vec<Method>,
    pub runs: usize,
    pub master_seed: u64,
    pub sampler: SamplerSpec,
    pub min_fit_budget: usize,
    pub record_wall_time: bool,
}

const DEFAULT_COMPARE_METHODS: &[&str] = &[
    "gaussian/best",
    "gaussian/avg:ratio:1.1",
    "gaussian/havg:ratio:1.1:1e-9",
    "gaussian+qo/best",
    "gaussian+qo/avg:ratio:1.1",
    "gaussian+metatune/best",
    "gaussian+metatune/avg:ratio:1.1",
    "hammersley/best",
    "hammersley/avg:ratio:1.1",
];

impl ExperimentConfig {
    /// Built-in defaults for each experiment family.
    pub fn defaults(experiment: Experiment) -> Self {
        let parse_all = |names: &[&str]| -> Vec<ObjectiveName> {
            names
                .iter()
                .map(|n| n.parse().expect("built-in name"))
                .collect()
        };
        let base = ExperimentConfig {
            experiment,
            objectives: parse_all(&["sphere"]),
            dims: vec![3],
            r: 1.0,
            optimum_radius: 0.9,
            optimum: OptimumLaw::Ball,
            budgets: vec![5000],
            ratios: logspace(1e-4, 0.5, 16),
            estimators: Vec::new(),
            methods: Vec::new(),
            runs: 30,
            master_seed: 0,
            sampler: SamplerSpec::uniform_ball(1.0),
            min_fit_budget: 64,
            record_wall_time: false,
        };
        match experiment {
            Experiment::SweepRatio => base,
            Experiment::RateFit => ExperimentConfig {
                dims: vec![4],
                budgets: (8..=14).map(|k| 1usize << k).collect(),
                estimators: vec![
                    EstimatorSpec::BestOf,
                    "avg:theorem1:1:3".parse().expect("built-in estimator"),
                ],
                ..base
            },
            Experiment::Compare => ExperimentConfig {
                objectives: parse_all(&["sphere", "rastrigin", "perturbed_sphere"]),
                dims: vec![3, 10, 30],
                budgets: vec![30, 100, 300, 1000],
                optimum: OptimumLaw::Gaussian,
                methods: DEFAULT_COMPARE_METHODS
                    .iter()
                    .map(|m| parse_method(m, 1.0, 1.0).expect("built-in method"))
                    .collect(),
                sampler: SamplerSpec::gaussian(1.0),
                ..base
            },
        }
    }

    /// Defaults for `experiment` overridden by the entries of `text`.
    pub fn parse(experiment: Experiment, text: &str) -> Result<Self> {
        let mut entries: HashMap<String, (usize, String)> = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(config_err(
                    line,
                    format!("expected `key = value`, got '{content}'"),
                ));
            };
            let key = canonical_key(key.trim())
                .ok_or_else(|| config_err(line, format!("unknown key '{}'", key.trim())))?;
            if entries
                .insert(key.to_string(), (line, value.trim().to_string()))
                .is_some()
            {
                return Err(config_err(line, format!("duplicate key '{key}'")));
            }
        }
        let mut cfg = Self::defaults(experiment);
        cfg.apply(&entries)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply(&mut self, entries: &HashMap<String, (usize, String)>) -> Result<()> {
        let get = |key: &str| entries.get(key).map(|(l, v)| (*l, v.as_str()));

        if let Some((l, v)) = get("objectives") {
            self.objectives = list(v)
                .map(|s| s.parse().map_err(|e| config_err(l, format!("{e}"))))
                .collect::<Result<_>>()?;
        }
        if let Some((l, v)) = get("dims") {
            self.dims = list(v).map(|s| number(l, s)).collect::<Result<_>>()?;
        }
        if let Some((l, v)) = get("r") {
            self.r = number(l, v)?;
        }
        if let Some((l, v)) = get("optimum_radius") {
            self.optimum_radius = number(l, v)?;
        }
        if let Some((l, v)) = get("optimum") {
            self.optimum = match v {
                "ball" => OptimumLaw::Ball,
                "gaussian" => OptimumLaw::Gaussian,
                _ => {
                    return Err(config_err(
                        l,
                        format!("optimum must be ball or gaussian, got '{v}'"),
                    ))
                }
            };
        }
        if let Some((l, v)) = get("budgets") {
            self.budgets = parse_budgets(l, v)?;
        }
        if let Some((l, v)) = get("ratios") {
            self.ratios = parse_ratios(l, v)?;
        }
        if let Some((l, v)) = get("estimators") {
            self.estimators = list(v)
                .map(|s| s.parse().map_err(|e| config_err(l, format!("{e}"))))
                .collect::<Result<_>>()?;
        }
        if let Some((l, v)) = get("runs") {
            self.runs = number(l, v)?;
        }
        if let Some((l, v)) = get("master_seed") {
            self.master_seed = number(l, v)?;
        }
        if let Some((l, v)) = get("min_fit_budget") {
            self.min_fit_budget = number(l, v)?;
        }
        if let Some((l, v)) = get("record_wall_time") {
            self.record_wall_time = boolean(l, v)?;
        }

        let sigma = match get("sigma") {
            Some((l, v)) => number(l, v)?,
            None => match self.sampler.kind {
                SamplerKind::Gaussian { sigma } => sigma,
                _ => 1.0,
            },
        };
        let mut sampler = match get("sampler") {
            Some((l, v)) => sampler_base(v, self.r, sigma).ok_or_else(|| {
                config_err(
                    l,
                    format!("sampler must be ball, gaussian or hammersley, got '{v}'"),
                )
            })?,
            None => match self.sampler.kind {
                SamplerKind::UniformBall { .. } => SamplerSpec::uniform_ball(self.r),
                SamplerKind::Gaussian { .. } => SamplerSpec::gaussian(sigma),
                SamplerKind::ScrambledHammersley => SamplerSpec::scrambled_hammersley(),
            },
        };
        if let Some((l, v)) = get("quasi_opposite") {
            sampler.quasi_opposite = boolean(l, v)?;
        }
        if let Some((l, v)) = get("middle_point") {
            sampler.middle_point = boolean(l, v)?;
        }
        if let Some((l, v)) = get("rescaling") {
            sampler.rescaling = match v {
                "none" => Rescaling::None,
                "meta" => Rescaling::MetaRecentering,
                "metatune" => Rescaling::MetaTuneRecentering,
                _ => {
                    return Err(config_err(
                        l,
                        format!("rescaling must be none, meta or metatune, got '{v}'"),
                    ))
                }
            };
        }
        sampler
            .validate()
            .map_err(|e| config_err(get("sampler").map_or(0, |(l, _)| l), e.to_string()))?;
        self.sampler = sampler;

        if let Some((l, v)) = get("methods") {
            self.methods = list(v)
                .map(|m| parse_method(m, self.r, sigma).map_err(|e| config_err(l, e.to_string())))
                .collect::<Result<_>>()?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(HarnessError::Experiment(msg));
        if !(self.r > 0.0 && self.r.is_finite()) {
            return fail(format!("r must be positive, got {}", self.r));
        }
        if !(self.optimum_radius >= 0.0 && self.optimum_radius < self.r) {
            return fail(format!(
                "optimum_radius must lie in [0, r), got {} with r = {}",
                self.optimum_radius, self.r
            ));
        }
        if self.runs == 0 {
            return fail("runs must be at least 1".into());
        }
        if self.objectives.is_empty() {
            return fail("no objectives".into());
        }
        if self.dims.is_empty() || self.dims.contains(&0) {
            return fail("dims must be a non-empty list of positive integers".into());
        }
        if self.budgets.is_empty() || self.budgets.contains(&0) {
            return fail("budgets must be a non-empty list of positive integers".into());
        }
        match self.experiment {
            Experiment::SweepRatio => {
                if self.ratios.is_empty() {
                    return fail("sweep-ratio needs at least one ratio".into());
                }
                if let Some(r) = self.ratios.iter().find(|r| !(**r > 0.0 && **r <= 1.0)) {
                    return fail(format!("ratios must lie in (0, 1], got {r}"));
                }
            }
            Experiment::RateFit => {
                if self.budgets.len() < 3 {
                    return fail("rate-fit needs at least 3 budgets".into());
                }
                if self.estimators.is_empty() {
                    return fail("rate-fit needs at least one estimator".into());
                }
            }
            Experiment::Compare => {
                if self.methods.len() < 2 {
                    return fail("compare needs at least 2 methods".into());
                }
            }
        }
        Ok(())
    }
}

fn config_err(line: usize, message: impl Into<String>) -> HarnessError {
    HarnessError::Config {
        line,
        message: message.into(),
    }
}

fn canonical_key(key: &str) -> Option<&'static str> {
    Some(match key {
        "objective" | "objectives" => "objectives",
        "d" | "dims" => "dims",
        "r" => "r",
        "optimum_radius" | "rho" => "optimum_radius",
        "optimum" => "optimum",
        "budgets" | "lambda" => "budgets",
        "ratios" => "ratios",
        "estimator" | "estimators" => "estimators",
        "methods" => "methods",
        "runs" => "runs",
        "master_seed" | "seed" => "master_seed",
        "sampler" => "sampler",
        "sigma" => "sigma",
        "quasi_opposite" => "quasi_opposite",
        "middle_point" => "middle_point",
        "rescaling" => "rescaling",
        "min_fit_budget" => "min_fit_budget",
        "record_wall_time" => "record_wall_time",
        _ => return None,
    })
}

fn list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn number<T: std::str::FromStr>(line: usize, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| config_err(line, format!("bad number '{value}'")))
}

fn boolean(line: usize, value: &str) -> Result<bool> {
    match value.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(config_err(line, format!("bad boolean '{other}'"))),
    }
}

/// `n` log-spaced values from `lo` to `hi` inclusive.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64))
        .collect()
}

fn parse_ratios(line: usize, value: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for token in list(value) {
        if let Some(spec) = token.strip_prefix("logspace:") {
            let parts: Vec<&str> = spec.split(':').collect();
            let [lo, hi, n] = parts.as_slice() else {
                return Err(config_err(
                    line,
                    format!("expected logspace:<lo>:<hi>:<n>, got '{token}'"),
                ));
            };
            let (lo, hi, n): (f64, f64, usize) =
                (number(line, lo)?, number(line, hi)?, number(line, n)?);
            if !(lo > 0.0 && hi >= lo) || n == 0 {
                return Err(config_err(line, format!("bad logspace range '{token}'")));
            }
            out.extend(logspace(lo, hi, n));
        } else {
            out.push(number(line, token)?);
        }
    }
    Ok(out)
}

fn parse_budgets(line: usize, value: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for token in list(value) {
        if let Some(spec) = token.strip_prefix("pow2:") {
            let Some((lo, hi)) = spec.split_once(':') else {
                return Err(config_err(
                    line,
                    format!("expected pow2:<lo>:<hi>, got '{token}'"),
                ));
            };
            let (lo, hi): (u32, u32) = (number(line, lo)?, number(line, hi)?);
            if lo > hi || hi > 40 {
                return Err(config_err(line, format!("bad pow2 range '{token}'")));
            }
            out.extend((lo..=hi).map(|k| 1usize << k));
        } else {
            out.push(number(line, token)?);
        }
    }
    Ok(out)
}

fn sampler_base(name: &str, r: f64, sigma: f64) -> Option<SamplerSpec> {
    Some(match name {
        "ball" => SamplerSpec::uniform_ball(r),
        "gaussian" => SamplerSpec::gaussian(sigma),
        "hammersley" => SamplerSpec::scrambled_hammersley(),
        _ => return None,
    })
}

/// Parses `<base>[+qo][+mid][+meta|+metatune]/<estimator>`.
pub fn parse_method(text: &str, r: f64, sigma: f64) -> Result<Method> {
    let bad = |msg: String| HarnessError::Experiment(format!("method '{text}': {msg}"));
    let (sampler_token, estimator) = text
        .trim()
        .split_once('/')
        .ok_or_else(|| bad("expected <sampler>/<estimator>".into()))?;
    let mut parts = sampler_token.split('+');
    let base = parts.next().unwrap_or("");
    let mut sampler =
        sampler_base(base, r, sigma).ok_or_else(|| bad(format!("unknown sampler '{base}'")))?;
    for modifier in parts {
        match modifier {
            "qo" => sampler.quasi_opposite = true,
            "mid" => sampler.middle_point = true,
            "meta" => sampler.rescaling = Rescaling::MetaRecentering,
            "metatune" => sampler.rescaling = Rescaling::MetaTuneRecentering,
            other => return Err(bad(format!("unknown modifier '{other}'"))),
        }
    }
    sampler.validate().map_err(|e| bad(e.to_string()))?;
    let estimator: EstimatorSpec = estimator.parse().map_err(|e| bad(format!("{e}")))?;
    Ok(Method {
        label: format!("{sampler_token}/{estimator}"),
        sampler,
        estimator,
    })
}

impl fmt::Display for OptimumLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OptimumLaw::Ball => "ball",
            OptimumLaw::Gaussian => "gaussian",
        })
    }
}
