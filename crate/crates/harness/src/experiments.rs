//! Ratio sweeps, rate fits, win-rate comparisons and the hull filter demo.

use std::fmt;
use std::io::Write;
use std::sync::Arc;

use oneshot_core::analysis::{fit_rate, RateFit};
use oneshot_core::estimators::{
    hull_filtered_mu, rank, self_inclusion_mu, EvaluatedSample, RankedBatch,
};
use oneshot_core::hull::DEFAULT_TOL;
use oneshot_core::objectives::{ObjectiveSpec, SuiteFunction};
use oneshot_core::sampling::{sample_uniform_ball, RngStream};
use oneshot_core::Point;

use crate::config::{Experiment, ExperimentConfig};
use crate::error::{HarnessError, Result};
use crate::output::{aggregate, format_float, RegretRecord, RunLabel};
use crate::runner::{evaluate_cell, instantiate, par_map, run_grid, CellKey, Selection};

fn expect_experiment(cfg: &ExperimentConfig, want: Experiment) -> Result<()> {
    if cfg.experiment != want {
        return Err(HarnessError::Experiment(format!(
            "config is for {}, not {}",
            cfg.experiment.label(),
            want.label()
        )));
    }
    cfg.validate()
}

/// `mu = clamp(round(ratio * lambda), 1, lambda - 1)`.
pub fn mu_for_ratio(ratio: f64, lambda: usize) -> usize {
    let upper = lambda.saturating_sub(1).max(1) as f64;
    (ratio * lambda as f64).round().clamp(1.0, upper) as usize
}

pub fn ratio_label(ratio: f64) -> String {
    format!("avg:selection:{ratio:e}")
}

/// Raw rows over `(lambda, ratio, run)` followed by mean/CI rows.
pub fn sweep_ratio(cfg: &ExperimentConfig, jobs: usize) -> Result<Vec<RegretRecord>> {
    expect_experiment(cfg, Experiment::SweepRatio)?;
    let mut rows = run_grid(cfg, jobs, |_, lambda| {
        cfg.ratios
            .iter()
            .map(|&ratio| Selection::Mu {
                label: ratio_label(ratio),
                mu: mu_for_ratio(ratio, lambda),
            })
            .collect()
    })?;
    let agg = aggregate(&rows);
    rows.extend(agg);
    Ok(rows)
}

/// A fitted rate for one `(objective, d, estimator)` series.
#[derive(Debug, Clone, PartialEq)]
pub struct FitRow {
    pub objective: String,
    pub d: usize,
    pub estimator: String,
    pub fit: RateFit,
}

impl FitRow {
    pub const CSV_HEADER: &'static str = "objective,d,estimator,slope,intercept,residual,n_points";

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.objective,
            self.d,
            self.estimator,
            format_float(self.fit.slope),
            format_float(self.fit.intercept),
            format_float(self.fit.residual),
            self.fit.n_points
        )
    }
}

pub struct RateFitOutput {
    pub records: Vec<RegretRecord>,
    pub fits: Vec<FitRow>,
}

/// Mean regret per budget per estimator, then a log-log fit over the budgets
/// at or above `min_fit_budget`.
pub fn rate_fit_experiment(cfg: &ExperimentConfig, jobs: usize) -> Result<RateFitOutput> {
    expect_experiment(cfg, Experiment::RateFit)?;
    let selections: Vec<Selection> = cfg
        .estimators
        .iter()
        .map(|e| Selection::Estimator(*e))
        .collect();
    let mut records = run_grid(cfg, jobs, |_, _| selections.clone())?;
    let agg = aggregate(&records);

    let mut fits = Vec::new();
    for objective in &cfg.objectives {
        let name = objective.to_string();
        for &d in &cfg.dims {
            for s in &selections {
                let label = s.label();
                let (budgets, means): (Vec<u64>, Vec<f64>) = agg
                    .iter()
                    .filter(|r| {
                        r.run == RunLabel::Mean
                            && r.objective == name
                            && r.d == d
                            && r.estimator == label
                            && r.lambda >= cfg.min_fit_budget
                    })
                    .map(|r| (r.lambda as u64, r.regret))
                    .unzip();
                match fit_rate(&budgets, &means) {
                    Ok(fit) => fits.push(FitRow {
                        objective: name.clone(),
                        d,
                        estimator: label,
                        fit,
                    }),
                    Err(e) => log::warn!("no rate fit for {name} d={d} {label}: {e}"),
                }
            }
        }
    }
    records.extend(agg);
    Ok(RateFitOutput { records, fits })
}

/// Pairwise strict-win frequencies over test cases.
#[derive(Debug, Clone, PartialEq)]
pub struct WinMatrix {
    /// Method labels, sorted by decreasing row average.
    pub labels: Vec<String>,
    /// `wins[a][b]`: fraction of cases where `a`'s mean regret is strictly below `b`'s.
    pub wins: Vec<Vec<Option<f64>>>,
    pub row_average: Vec<f64>,
    pub n_cases: usize,
}

impl WinMatrix {
    /// Builds the matrix from `means[case][method]`.
    pub fn from_means(labels: &[String], means: &[Vec<f64>]) -> Self {
        let m = labels.len();
        let n = means.len();
        let mut wins = vec![vec![None; m]; m];
        for a in 0..m {
            for b in 0..m {
                if a != b {
                    let count = means.iter().filter(|row| row[a] < row[b]).count();
                    wins[a][b] = Some(count as f64 / n as f64);
                }
            }
        }
        let avg: Vec<f64> = wins
            .iter()
            .map(|row| row.iter().flatten().sum::<f64>() / (m - 1).max(1) as f64)
            .collect();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&x, &y| avg[y].total_cmp(&avg[x]).then(x.cmp(&y)));
        WinMatrix {
            labels: order.iter().map(|&i| labels[i].clone()).collect(),
            wins: order
                .iter()
                .map(|&a| order.iter().map(|&b| wins[a][b]).collect())
                .collect(),
            row_average: order.iter().map(|&i| avg[i]).collect(),
            n_cases: n,
        }
    }

    pub fn entry(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.labels.iter().position(|l| l == a)?;
        let j = self.labels.iter().position(|l| l == b)?;
        self.wins[i][j]
    }

    pub fn row_average_of(&self, label: &str) -> Option<f64> {
        let i = self.labels.iter().position(|l| l == label)?;
        Some(self.row_average[i])
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "method,{},row_average", self.labels.join(","))?;
        for (i, label) in self.labels.iter().enumerate() {
            let cells: Vec<String> = self.wins[i]
                .iter()
                .map(|v| v.map_or(String::new(), format_float))
                .collect();
            writeln!(
                w,
                "{label},{},{}",
                cells.join(","),
                format_float(self.row_average[i])
            )?;
        }
        Ok(())
    }
}

/// Mean regret of every method on every `(objective, d, lambda)` case, then
/// the strict win-rate matrix. Methods in a run share optimum and objective.
pub fn compare(cfg: &ExperimentConfig, jobs: usize) -> Result<WinMatrix> {
    expect_experiment(cfg, Experiment::Compare)?;
    let mut cells = Vec::new();
    for objective in &cfg.objectives {
        for &d in &cfg.dims {
            for &lambda in &cfg.budgets {
                for run in 0..cfg.runs as u64 {
                    cells.push(CellKey {
                        objective: *objective,
                        d,
                        lambda,
                        run,
                    });
                }
            }
        }
    }
    let per_cell: Vec<Vec<f64>> = par_map(jobs, &cells, |key| {
        let problem = instantiate(cfg, key)?;
        cfg.methods
            .iter()
            .map(|m| {
                let sel = [Selection::Estimator(m.estimator)];
                Ok(evaluate_cell(&problem, &m.sampler, key, &sel)?.0[0].1)
            })
            .collect()
    })?;
    let means: Vec<Vec<f64>> = per_cell
        .chunks(cfg.runs)
        .map(|case| {
            (0..cfg.methods.len())
                .map(|m| case.iter().map(|r| r[m]).sum::<f64>() / cfg.runs as f64)
                .collect()
        })
        .collect();
    let labels: Vec<String> = cfg.methods.iter().map(|m| m.label.clone()).collect();
    Ok(WinMatrix::from_means(&labels, &means))
}

/// Self-inclusion and hull-filter `mu` on one ranked batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuleVerdict {
    pub self_inclusion: usize,
    pub hull_filter: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HullDemoReport {
    pub deterministic: RuleVerdict,
    pub seeds: usize,
    pub mu_max: usize,
    pub lambda: usize,
    /// Seeds where the hull filter kept all `mu_max` points on the sphere.
    pub sphere_full: usize,
    /// Seeds where the hull filter cut below `mu_max` on the two-well function.
    pub two_well_cut: usize,
    pub two_well_mean_mu: f64,
    pub sphere_mean_mu: f64,
}

/// The five ordered points in the plane on which the two rules differ.
pub fn distinguishing_batch() -> RankedBatch {
    let pts: [[f64; 2]; 5] = [[0.0, 0.0], [4.0, 0.0], [0.0, 4.0], [4.0, 4.0], [1.0, 1.0]];
    let batch = pts
        .iter()
        .enumerate()
        .map(|(index, p)| EvaluatedSample {
            index,
            point: Point::new(p.to_vec()).expect("finite"),
            value: index as f64,
        })
        .collect();
    rank(batch).expect("finite values")
}

/// Two radial wells of width `width` centred at `(+-c, 0, ...)`.
pub fn two_well(d: usize, c: f64, width: f64) -> ObjectiveSpec {
    let w2 = width * width;
    let eval = Arc::new(move |x: &[f64]| {
        let rest: f64 = x[1..].iter().map(|v| v * v).sum();
        let a = (x[0] - c).powi(2) + rest;
        let b = (x[0] + c).powi(2) + rest;
        -(-a / w2).exp() - (-b / w2).exp()
    });
    let mut optimum = vec![0.0; d];
    optimum[0] = c;
    let optimum = Point::new(optimum).expect("finite");
    let value = eval(&optimum);
    ObjectiveSpec::new("two_well", optimum, value, eval)
}

fn verdict(ranked: &RankedBatch, mu_max: usize) -> Result<RuleVerdict> {
    Ok(RuleVerdict {
        self_inclusion: self_inclusion_mu(ranked, mu_max, DEFAULT_TOL)?,
        hull_filter: hull_filtered_mu(ranked, mu_max, DEFAULT_TOL)?,
    })
}

pub fn hull_demo(master_seed: u64, seeds: usize) -> Result<HullDemoReport> {
    let deterministic = verdict(&distinguishing_batch(), 5)?;
    let (d, lambda, mu_max) = (2, 1000, 10);
    let sphere = ObjectiveSpec::suite(SuiteFunction::Sphere, Point::zeros(d));
    let wells = two_well(d, 0.5, 0.1);
    let mut sphere_full = 0;
    let mut two_well_cut = 0;
    let (mut sphere_mu, mut well_mu) = (0usize, 0usize);
    for seed in 0..seeds as u64 {
        let mut rng = RngStream::new(master_seed, seed);
        let pts = sample_uniform_ball(&mut rng, d, 1.0, lambda)?;
        let s = verdict(&RankedBatch::evaluate(pts.clone(), &sphere)?, mu_max)?.hull_filter;
        let w = verdict(&RankedBatch::evaluate(pts, &wells)?, mu_max)?.hull_filter;
        sphere_full += (s == mu_max) as usize;
        two_well_cut += (w < mu_max) as usize;
        sphere_mu += s;
        well_mu += w;
    }
    Ok(HullDemoReport {
        deterministic,
        seeds,
        mu_max,
        lambda,
        sphere_full,
        two_well_cut,
        sphere_mean_mu: sphere_mu as f64 / seeds.max(1) as f64,
        two_well_mean_mu: well_mu as f64 / seeds.max(1) as f64,
    })
}

impl fmt::Display for HullDemoReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "five-point configuration (0,0),(4,0),(0,4),(4,4),(1,1), mu_max = 5"
        )?;
        writeln!(
            f,
            "  self-inclusion rule: mu = {}",
            self.deterministic.self_inclusion
        )?;
        writeln!(
            f,
            "  hull filter rule:    mu = {}",
            self.deterministic.hull_filter
        )?;
        writeln!(
            f,
            "sphere, d = 2, lambda = {}, mu_max = {}: hull filter kept all points in {}/{} seeds (mean mu {:.2})",
            self.lambda, self.mu_max, self.sphere_full, self.seeds, self.sphere_mean_mu
        )?;
        writeln!(
            f,
            "two wells at (+-0.5, 0), width 0.1: hull filter cut below mu_max in {}/{} seeds (mean mu {:.2})",
            self.two_well_cut, self.seeds, self.two_well_mean_mu
        )
    }
}
