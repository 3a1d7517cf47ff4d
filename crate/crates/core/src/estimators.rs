//! Recommendations from a single evaluated batch.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::hull::{in_hull_interior, HullQuery, DEFAULT_TOL};
use crate::objectives::ObjectiveSpec;
use crate::point::Point;

/// A sampled point with its objective value and position in the batch.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluatedSample {
    pub index: usize,
    pub point: Point,
    pub value: f64,
}

/// Samples sorted by value, ties broken by lower sampling index.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedBatch {
    samples: Vec<EvaluatedSample>,
}

impl RankedBatch {
    /// Evaluates `points` under `objective` and ranks them.
    pub fn evaluate(points: Vec<Point>, objective: &ObjectiveSpec) -> Result<Self> {
        let batch = points
            .into_iter()
            .enumerate()
            .map(|(index, point)| {
                let value = objective.evaluate(&point)?;
                Ok(EvaluatedSample {
                    index,
                    point,
                    value,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rank(batch)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.samples[0].point.dim()
    }

    pub fn samples(&self) -> &[EvaluatedSample] {
        &self.samples
    }

    /// Original batch indices in rank order.
    pub fn order(&self) -> Vec<usize> {
        self.samples.iter().map(|s| s.index).collect()
    }

    /// The `mu` best points.
    pub fn top(&self, mu: usize) -> Vec<Point> {
        self.samples[..mu].iter().map(|s| s.point.clone()).collect()
    }
}

/// Sorts a batch ascending by value.
pub fn rank(batch: Vec<EvaluatedSample>) -> Result<RankedBatch> {
    if batch.is_empty() {
        return Err(invalid("cannot rank an empty batch"));
    }
    if let Some(bad) = batch.iter().find(|s| !s.value.is_finite()) {
        return Err(Error::InvalidInput {
            index: bad.index,
            reason: format!("objective value {} is not finite", bad.value),
        });
    }
    let mut samples = batch;
    samples.sort_by(|a, b| {
        a.value
            .partial_cmp(&b.value)
            .expect("finite values")
            .then(a.index.cmp(&b.index))
    });
    Ok(RankedBatch { samples })
}

pub fn best_of(ranked: &RankedBatch) -> Point {
    ranked.samples[0].point.clone()
}

/// Equal-weight mean of the `mu` best points.
pub fn mu_best_average(ranked: &RankedBatch, mu: usize) -> Result<Point> {
    if mu == 0 || mu > ranked.len() {
        return Err(invalid(format!(
            "mu = {mu} must lie in [1, {}]",
            ranked.len()
        )));
    }
    let mut acc = vec![0.0; ranked.dim()];
    for s in &ranked.samples[..mu] {
        acc.iter_mut()
            .zip(s.point.iter())
            .for_each(|(a, x)| *a += x);
    }
    let inv = mu as f64;
    Ok(Point::from_raw(acc.into_iter().map(|a| a / inv).collect()))
}

fn clamp_mu(raw: f64, lambda: usize) -> usize {
    let upper = (lambda - 1).max(1) as f64;
    raw.round().clamp(1.0, upper) as usize
}

/// `mu = C * lambda^(2(alpha-2)/(d+2(alpha-2)))`, rounded and clamped to `[1, lambda-1]`.
pub fn select_mu_theorem1(lambda: usize, d: usize, alpha: f64, c: f64) -> Result<usize> {
    if lambda < 2 {
        return Err(invalid(format!("lambda must be at least 2, got {lambda}")));
    }
    if !(alpha > 2.0) {
        return Err(invalid(format!("alpha must exceed 2, got {alpha}")));
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(invalid(format!("constant must be positive, got {c}")));
    }
    if d == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    let s = 2.0 * (alpha - 2.0);
    let exponent = s / (d as f64 + s);
    Ok(clamp_mu(c * (lambda as f64).powf(exponent), lambda))
}

/// `mu = lambda / base^d`, rounded and clamped to `[1, lambda-1]`.
pub fn select_mu_ratio_pow(lambda: usize, d: usize, base: f64) -> Result<usize> {
    if lambda < 2 {
        return Err(invalid(format!("lambda must be at least 2, got {lambda}")));
    }
    if !(base > 1.0) || !base.is_finite() {
        return Err(invalid(format!("base must exceed 1, got {base}")));
    }
    Ok(clamp_mu(lambda as f64 / base.powf(d as f64), lambda))
}

fn interior(points: &[Point], prefix: usize, query: &Point, tol: f64) -> Result<bool> {
    in_hull_interior(&HullQuery::new(query, &points[..prefix], tol)?)
}

/// Largest `mu <= mu_max` such that no `x_(j)`, `i < j <= mu_max`, lies in the
/// interior of the hull of the `i` best points for any `i < mu`.
///
/// Interior membership is monotone in the prefix length, so for each `j` only
/// the largest useful prefix is tested, followed by a binary search.
pub fn hull_filtered_mu(ranked: &RankedBatch, mu_max: usize, tol: f64) -> Result<usize> {
    if mu_max == 0 || mu_max > ranked.len() {
        return Err(invalid(format!(
            "mu_max = {mu_max} must lie in [1, {}]",
            ranked.len()
        )));
    }
    let d = ranked.dim();
    let pts = ranked.top(mu_max);
    let mut mu = mu_max;
    for j in 2..=mu_max {
        let hi = (j - 1).min(mu - 1);
        if hi < d + 1 || !interior(&pts, hi, &pts[j - 1], tol)? {
            continue;
        }
        let (mut lo, mut hi) = (d + 1, hi);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if interior(&pts, mid, &pts[j - 1], tol)? {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        mu = hi;
    }
    Ok(mu)
}

/// The weaker rule: `mu` maximal with `x_(i)` outside the interior of the hull
/// of `x_(1)..x_(i)` for every `i <= mu`.
pub fn self_inclusion_mu(ranked: &RankedBatch, mu_max: usize, tol: f64) -> Result<usize> {
    if mu_max == 0 || mu_max > ranked.len() {
        return Err(invalid(format!(
            "mu_max = {mu_max} must lie in [1, {}]",
            ranked.len()
        )));
    }
    let pts = ranked.top(mu_max);
    for i in 2..=mu_max {
        if interior(&pts, i, &pts[i - 1], tol)? {
            return Ok(i - 1);
        }
    }
    Ok(mu_max)
}

/// How many of the best points to average.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MuRule {
    Fixed(usize),
    Theorem1 { c: f64, alpha: f64 },
    RatioPow { base: f64 },
}

impl MuRule {
    /// Resolved `mu` for a batch of size `lambda` in dimension `d`; always in
    /// `[1, max(lambda - 1, 1)]`.
    pub fn resolve(&self, lambda: usize, d: usize) -> Result<usize> {
        if lambda == 0 {
            return Err(invalid("lambda must be at least 1"));
        }
        if lambda == 1 {
            self.validate()?;
            return Ok(1);
        }
        match *self {
            MuRule::Fixed(mu) => {
                if mu == 0 {
                    return Err(invalid("fixed mu must be at least 1"));
                }
                Ok(clamp_mu(mu as f64, lambda))
            }
            MuRule::Theorem1 { c, alpha } => select_mu_theorem1(lambda, d, alpha, c),
            MuRule::RatioPow { base } => select_mu_ratio_pow(lambda, d, base),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            MuRule::Fixed(0) => Err(invalid("fixed mu must be at least 1")),
            MuRule::Theorem1 { c, alpha } if !(alpha > 2.0 && c > 0.0) => Err(invalid(format!(
                "need alpha > 2 and C > 0, got {alpha}, {c}"
            ))),
            MuRule::RatioPow { base } if !(base > 1.0) => {
                Err(invalid(format!("base must exceed 1, got {base}")))
            }
            _ => Ok(()),
        }
    }
}

/// A recommendation rule, written in config as `best`, `avg:theorem1:<C>:<alpha>`,
/// `avg:ratio:<base>`, `avg:fixed:<mu>` or `havg:ratio:<base>:<tol>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EstimatorSpec {
    BestOf,
    MuAverage(MuRule),
    HullFilteredAverage { mu_max: MuRule, tol: f64 },
}

/// The recommended point and the number of points averaged.
#[derive(Debug, Clone, PartialEq)]
pub struct Recommendation {
    pub point: Point,
    pub mu: usize,
}

impl EstimatorSpec {
    pub fn recommend(&self, ranked: &RankedBatch) -> Result<Recommendation> {
        let lambda = ranked.len();
        let d = ranked.dim();
        let mu = match self {
            EstimatorSpec::BestOf => 1,
            EstimatorSpec::MuAverage(rule) => rule.resolve(lambda, d)?,
            EstimatorSpec::HullFilteredAverage { mu_max, tol } => {
                let mu_max = mu_max.resolve(lambda, d)?;
                if mu_max < 2 {
                    mu_max
                } else {
                    hull_filtered_mu(ranked, mu_max, *tol)?
                }
            }
        };
        Ok(Recommendation {
            point: mu_best_average(ranked, mu)?,
            mu,
        })
    }
}

fn parse_f64(token: &str, what: &str) -> Result<f64> {
    token
        .parse::<f64>()
        .map_err(|_| invalid(format!("bad {what} '{token}' in estimator")))
}

impl FromStr for EstimatorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let spec = match parts.as_slice() {
            ["best"] => EstimatorSpec::BestOf,
            ["avg", "theorem1", c, alpha] => EstimatorSpec::MuAverage(MuRule::Theorem1 {
                c: parse_f64(c, "constant")?,
                alpha: parse_f64(alpha, "alpha")?,
            }),
            ["avg", "ratio", base] => EstimatorSpec::MuAverage(MuRule::RatioPow {
                base: parse_f64(base, "base")?,
            }),
            ["avg", "fixed", mu] => EstimatorSpec::MuAverage(MuRule::Fixed(
                mu.parse()
                    .map_err(|_| invalid(format!("bad mu '{mu}' in estimator")))?,
            )),
            ["havg", "ratio", base] => EstimatorSpec::HullFilteredAverage {
                mu_max: MuRule::RatioPow {
                    base: parse_f64(base, "base")?,
                },
                tol: DEFAULT_TOL,
            },
            ["havg", "ratio", base, tol] => EstimatorSpec::HullFilteredAverage {
                mu_max: MuRule::RatioPow {
                    base: parse_f64(base, "base")?,
                },
                tol: parse_f64(tol, "tolerance")?,
            },
            _ => return Err(invalid(format!("unknown estimator '{s}'"))),
        };
        match spec {
            EstimatorSpec::MuAverage(rule) => rule.validate()?,
            EstimatorSpec::HullFilteredAverage { mu_max, tol } => {
                mu_max.validate()?;
                if !(tol > 0.0) {
                    return Err(invalid(format!(
                        "hull tolerance must be positive, got {tol}"
                    )));
                }
            }
            EstimatorSpec::BestOf => {}
        }
        Ok(spec)
    }
}

impl fmt::Display for EstimatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EstimatorSpec::BestOf => write!(f, "best"),
            EstimatorSpec::MuAverage(MuRule::Theorem1 { c, alpha }) => {
                write!(f, "avg:theorem1:{c}:{alpha}")
            }
            EstimatorSpec::MuAverage(MuRule::RatioPow { base }) => write!(f, "avg:ratio:{base}"),
            EstimatorSpec::MuAverage(MuRule::Fixed(mu)) => write!(f, "avg:fixed:{mu}"),
            EstimatorSpec::HullFilteredAverage { mu_max, tol } => match mu_max {
                MuRule::RatioPow { base } => write!(f, "havg:ratio:{base}:{tol:e}"),
                MuRule::Theorem1 { c, alpha } => write!(f, "havg:theorem1:{c}:{alpha}:{tol:e}"),
                MuRule::Fixed(mu) => write!(f, "havg:fixed:{mu}:{tol:e}"),
            },
        }
    }
}
