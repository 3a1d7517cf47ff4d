//! Single cells and the deterministic worker pool.

use std::time::Instant;

use oneshot_core::estimators::{mu_best_average, EstimatorSpec, RankedBatch};
use oneshot_core::objectives::{sample_optimum, ObjectiveName, ObjectiveSpec};
use oneshot_core::sampling::{sample_gaussian, RngStream, SamplerSpec};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, OptimumLaw};
use crate::error::{HarnessError, Result};
use crate::output::{RegretRecord, RunLabel};

/// Substream of a cell used for the optimum.
const OPTIMUM_STREAM: u64 = 0;
/// Substream used to instantiate randomized objectives.
const INSTANCE_STREAM: u64 = 1;
/// Substream feeding the sampler.
const SAMPLING_STREAM: u64 = 2;

/// Coordinates of one independent run. The estimator is deliberately not
/// part of the key: every estimator of a cell sees the same samples.
#[derive(Debug, Clone, PartialEq)]
pub struct CellKey {
    pub objective: ObjectiveName,
    pub d: usize,
    pub lambda: usize,
    pub run: u64,
}

impl CellKey {
    pub fn stream_index(&self) -> u64 {
        fnv1a(format!("{}|{}|{}|{}", self.objective, self.d, self.lambda, self.run).as_bytes())
    }

    pub fn stream(&self, master_seed: u64) -> RngStream {
        RngStream::new(master_seed, self.stream_index())
    }

    fn describe(&self) -> String {
        format!(
            "objective={} d={} lambda={} run={}",
            self.objective, self.d, self.lambda, self.run
        )
    }
}

/// 64-bit FNV-1a.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// The optimum and objective of a cell, plus the stream for its sampler.
pub struct CellProblem {
    pub objective: ObjectiveSpec,
    pub sampling: RngStream,
}

pub fn instantiate(cfg: &ExperimentConfig, key: &CellKey) -> Result<CellProblem> {
    let wrap = |source| HarnessError::Cell {
        cell: key.describe(),
        source,
    };
    let stream = key.stream(cfg.master_seed);
    let mut opt_rng = stream.substream(OPTIMUM_STREAM);
    let optimum = match cfg.optimum {
        OptimumLaw::Ball => sample_optimum(&mut opt_rng, key.d, cfg.optimum_radius, cfg.r),
        OptimumLaw::Gaussian => {
            sample_gaussian(&mut opt_rng, key.d, 1.0, 1).map(|mut v| v.remove(0))
        }
    }
    .map_err(wrap)?;
    let objective = key
        .objective
        .build(optimum, &mut stream.substream(INSTANCE_STREAM))
        .map_err(wrap)?;
    Ok(CellProblem {
        objective,
        sampling: stream.substream(SAMPLING_STREAM),
    })
}

/// What to recommend from a ranked batch.
#[derive(Debug, Clone, PartialEq)]
pub enum Selection {
    Estimator(EstimatorSpec),
    /// Average of a fixed number of best points.
    Mu {
        label: String,
        mu: usize,
    },
}

impl Selection {
    pub fn label(&self) -> String {
        match self {
            Selection::Estimator(e) => e.to_string(),
            Selection::Mu { label, .. } => label.clone(),
        }
    }
}

/// `(mu, regret)` for each selection, plus the cell's wall time in seconds.
pub fn evaluate_cell(
    problem: &CellProblem,
    sampler: &SamplerSpec,
    key: &CellKey,
    selections: &[Selection],
) -> Result<(Vec<(usize, f64)>, f64)> {
    let wrap = |source| HarnessError::Cell {
        cell: key.describe(),
        source,
    };
    let start = Instant::now();
    let mut rng = problem.sampling.clone();
    let points = sampler.draw(&mut rng, key.d, key.lambda).map_err(wrap)?;
    let ranked = RankedBatch::evaluate(points, &problem.objective).map_err(wrap)?;
    let mut out = Vec::with_capacity(selections.len());
    for s in selections {
        let (point, mu) = match s {
            Selection::Estimator(e) => {
                let rec = e.recommend(&ranked).map_err(wrap)?;
                (rec.point, rec.mu)
            }
            Selection::Mu { mu, .. } => (mu_best_average(&ranked, *mu).map_err(wrap)?, *mu),
        };
        let regret = problem.objective.regret(&point).map_err(wrap)?;
        out.push((mu, clamp_regret(regret, key)));
    }
    Ok((out, start.elapsed().as_secs_f64()))
}

fn clamp_regret(regret: f64, key: &CellKey) -> f64 {
    if regret < -1e-12 {
        log::warn!(
            "negative regret {regret:e} in {}; clamped to 0",
            key.describe()
        );
    }
    regret.max(0.0)
}

/// One `(objective, d, lambda, estimator, run)` record.
pub fn run_single(
    cfg: &ExperimentConfig,
    key: &CellKey,
    estimator: &EstimatorSpec,
) -> Result<RegretRecord> {
    let problem = instantiate(cfg, key)?;
    let selection = Selection::Estimator(*estimator);
    let (scores, wall) = evaluate_cell(
        &problem,
        &cfg.sampler,
        key,
        std::slice::from_ref(&selection),
    )?;
    let (mu, regret) = scores[0];
    Ok(RegretRecord {
        experiment: cfg.experiment.label().to_string(),
        objective: key.objective.to_string(),
        d: key.d,
        lambda: key.lambda,
        estimator: selection.label(),
        mu: Some(mu),
        run: RunLabel::Run(key.run),
        regret,
        wall_time_s: if cfg.record_wall_time { wall } else { 0.0 },
    })
}

/// Maps `f` over `items` on `jobs` worker threads. Results keep input order.
pub fn par_map<I, T, F>(jobs: usize, items: &[I], f: F) -> Result<Vec<T>>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> Result<T> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| HarnessError::Pool(e.to_string()))?;
    pool.install(|| items.par_iter().map(&f).collect())
}

/// Default worker count: the number of logical CPUs.
pub fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Runs `selections(d, lambda)` on every cell of the grid and returns raw rows
/// ordered by objective, d, lambda, selection and run.
pub fn run_grid<S>(cfg: &ExperimentConfig, jobs: usize, selections: S) -> Result<Vec<RegretRecord>>
where
    S: Fn(usize, usize) -> Vec<Selection>,
{
    let mut cells = Vec::new();
    let mut groups = Vec::new();
    for objective in &cfg.objectives {
        for &d in &cfg.dims {
            for &lambda in &cfg.budgets {
                let sel = selections(d, lambda);
                let first = cells.len();
                for run in 0..cfg.runs as u64 {
                    cells.push((
                        CellKey {
                            objective: *objective,
                            d,
                            lambda,
                            run,
                        },
                        sel.clone(),
                    ));
                }
                groups.push((first, sel));
            }
        }
    }
    let results = par_map(jobs, &cells, |(key, sel)| {
        let problem = instantiate(cfg, key)?;
        evaluate_cell(&problem, &cfg.sampler, key, sel)
    })?;

    let mut rows = Vec::with_capacity(cells.len() * groups.first().map_or(0, |g| g.1.len()));
    for (first, sel) in &groups {
        for (s_idx, s) in sel.iter().enumerate() {
            let label = s.label();
            for c in *first..*first + cfg.runs {
                let key = &cells[c].0;
                let (scores, wall) = &results[c];
                let (mu, regret) = scores[s_idx];
                rows.push(RegretRecord {
                    experiment: cfg.experiment.label().to_string(),
                    objective: key.objective.to_string(),
                    d: key.d,
                    lambda: key.lambda,
                    estimator: label.clone(),
                    mu: Some(mu),
                    run: RunLabel::Run(key.run),
                    regret,
                    wall_time_s: if cfg.record_wall_time { *wall } else { 0.0 },
                });
            }
        }
    }
    Ok(rows)
}
