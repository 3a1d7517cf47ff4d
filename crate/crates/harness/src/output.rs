//! Regret records, per-cell aggregates and CSV emission.

use std::fmt;
use std::io::Write;

use oneshot_core::analysis::summarize;

pub const CSV_HEADER: &str = "experiment,objective,d,lambda,estimator,mu,run,regret,wall_time_s";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunLabel {
    Run(u64),
    Mean,
    Ci95Lo,
    Ci95Hi,
}

impl fmt::Display for RunLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunLabel::Run(i) => write!(f, "{i}"),
            RunLabel::Mean => f.write_str("mean"),
            RunLabel::Ci95Lo => f.write_str("ci95_lo"),
            RunLabel::Ci95Hi => f.write_str("ci95_hi"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegretRecord {
    pub experiment: String,
    pub objective: String,
    pub d: usize,
    pub lambda: usize,
    pub estimator: String,
    /// Blank in aggregates whose runs used different `mu`.
    pub mu: Option<usize>,
    pub run: RunLabel,
    pub regret: f64,
    pub wall_time_s: f64,
}

impl RegretRecord {
    fn group_key(&self) -> (&str, &str, usize, usize, &str) {
        (
            &self.experiment,
            &self.objective,
            self.d,
            self.lambda,
            &self.estimator,
        )
    }

    pub fn is_aggregate(&self) -> bool {
        !matches!(self.run, RunLabel::Run(_))
    }
}

/// Mean and 95% interval rows for every `(objective, d, lambda, estimator)`
/// group, in order of first appearance. Runs are sorted by index first, so the
/// result does not depend on the order rows were produced in.
pub fn aggregate(records: &[RegretRecord]) -> Vec<RegretRecord> {
    let mut order: Vec<(&str, &str, usize, usize, &str)> = Vec::new();
    let mut members: Vec<Vec<&RegretRecord>> = Vec::new();
    for r in records.iter().filter(|r| !r.is_aggregate()) {
        let key = r.group_key();
        match order.iter().position(|k| *k == key) {
            Some(i) => members[i].push(r),
            None => {
                order.push(key);
                members.push(vec![r]);
            }
        }
    }
    let mut out = Vec::with_capacity(order.len() * 3);
    for mut group in members {
        group.sort_by_key(|r| match r.run {
            RunLabel::Run(i) => i,
            _ => u64::MAX,
        });
        let values: Vec<f64> = group.iter().map(|r| r.regret).collect();
        let (mean, lo, hi) = match summarize(&values) {
            // Regret is non-negative, so the interval is truncated at 0.
            Ok(s) => (s.mean, s.ci95.0.max(0.0), s.ci95.1),
            Err(_) => (values[0], values[0], values[0]),
        };
        let first = group[0];
        let mu = first.mu.filter(|m| group.iter().all(|r| r.mu == Some(*m)));
        let wall = group.iter().map(|r| r.wall_time_s).sum::<f64>() / group.len() as f64;
        for (run, regret) in [
            (RunLabel::Mean, mean),
            (RunLabel::Ci95Lo, lo),
            (RunLabel::Ci95Hi, hi),
        ] {
            out.push(RegretRecord {
                mu,
                run,
                regret,
                wall_time_s: wall,
                ..first.clone()
            });
        }
    }
    out
}

/// Scientific notation with 16 significant digits.
pub fn format_float(v: f64) -> String {
    format!("{v:.15e}")
}

pub fn write_csv<W: Write>(mut w: W, records: &[RegretRecord]) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.experiment,
            r.objective,
            r.d,
            r.lambda,
            r.estimator,
            r.mu.map_or(String::new(), |m| m.to_string()),
            r.run,
            format_float(r.regret),
            format_float(r.wall_time_s)
        )?;
    }
    Ok(())
}
