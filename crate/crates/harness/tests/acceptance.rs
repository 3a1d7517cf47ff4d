//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use oneshot_core::analysis::{expected_min_sphere, phi_minus, phi_plus, summarize};
use oneshot_core::estimators::{hull_filtered_mu, self_inclusion_mu, EstimatorSpec, RankedBatch};
use oneshot_core::hull::{in_hull_interior, HullQuery, DEFAULT_TOL};
use oneshot_core::objectives::{exp_wrap, ObjectiveName, SuiteFunction};
use oneshot_core::sampling::{sample_uniform_ball, RngStream};
use oneshot_core::Point;
use oneshot_harness::experiments::{distinguishing_batch, ratio_label, FitRow};
use oneshot_harness::runner::{instantiate, CellKey};
use oneshot_harness::{
    rate_fit_experiment, sweep_ratio, Experiment, ExperimentConfig, RegretRecord, RunLabel,
};
use rand::Rng;

type Outcome = Result<String, String>;

struct Criterion {
    id: &'static str,
    title: &'static str,
    limit: Option<Duration>,
    check: fn() -> Outcome,
}

fn jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        eps: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * eps {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1)
            + step(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    step(
        f,
        a,
        b,
        fa,
        fm,
        fb,
        (b - a) / 6.0 * (fa + 4.0 * fm + fb),
        eps,
        50,
    )
}

/// `int_0^1 (1 - u^(d/2))^lambda du`, substituting `u = s^2` and splitting
/// `[0, 1]` into panels that shrink geometrically towards 0.
fn quadrature(lambda: u64, d: usize) -> f64 {
    let f = move |s: f64| (1.0 - s.powi(d as i32)).powi(lambda as i32) * 2.0 * s;
    let mut edges: Vec<f64> = (0..60).map(|k| 0.5f64.powi(k)).collect();
    edges.push(0.0);
    edges.reverse();
    edges
        .windows(2)
        .map(|w| adaptive_simpson(&f, w[0], w[1], 1e-15))
        .sum()
}

fn ac1_closed_form() -> Outcome {
    let mut worst = 0.0f64;
    for d in 1..=10 {
        for lambda in 1..=100u64 {
            let err = (expected_min_sphere(lambda, d) - quadrature(lambda, d)).abs();
            if err > 1e-9 {
                return Err(format!("d={d} lambda={lambda}: |error| = {err:e}"));
            }
            worst = worst.max(err);
        }
    }
    Ok(format!("max |error| = {worst:.2e} over 1000 cells"))
}

fn ac2_monte_carlo() -> Outcome {
    let runs = 2000;
    let mut worst = 0.0f64;
    for d in [2usize, 4, 6] {
        for lambda in [10usize, 100] {
            let mut rng = RngStream::new(2020, (d * 1000 + lambda) as u64);
            let mins: Vec<f64> = (0..runs)
                .map(|_| {
                    sample_uniform_ball(&mut rng, d, 1.0, lambda)
                        .expect("valid sampler")
                        .iter()
                        .map(Point::norm_squared)
                        .fold(f64::INFINITY, f64::min)
                })
                .collect();
            let s = summarize(&mins).expect("2000 values");
            let z = (s.mean - expected_min_sphere(lambda as u64, d)).abs() / s.std_error;
            if z > 4.0 {
                return Err(format!("d={d} lambda={lambda}: {z:.2} standard errors off"));
            }
            worst = worst.max(z);
        }
    }
    Ok(format!("largest deviation {worst:.2} standard errors"))
}

fn fit_for(fits: &[FitRow], estimator: &str) -> Result<f64, String> {
    fits.iter()
        .find(|f| f.estimator == estimator)
        .map(|f| f.fit.slope)
        .ok_or_else(|| format!("no fit for {estimator}"))
}

fn ac3_random_search_rate() -> Outcome {
    let cfg = ExperimentConfig::parse(
        Experiment::RateFit,
        "objective = sphere\nd = 4\nbudgets = pow2:8:14\nruns = 200\nestimators = best\nmaster_seed = 3",
    )
    .map_err(|e| e.to_string())?;
    let out = rate_fit_experiment(&cfg, jobs()).map_err(|e| e.to_string())?;
    let slope = fit_for(&out.fits, "best")?;
    let msg = format!("best-of slope {slope:.4} (target -0.50 +- 0.15)");
    if (slope + 0.5).abs() <= 0.15 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn runs_of<'a>(rows: &'a [RegretRecord], label: &str) -> Vec<&'a RegretRecord> {
    let mut v: Vec<&RegretRecord> = rows
        .iter()
        .filter(|r| r.estimator == label && !r.is_aggregate())
        .collect();
    v.sort_by_key(|r| match r.run {
        RunLabel::Run(i) => i,
        _ => u64::MAX,
    });
    v
}

fn ac4_averaging_beats_best() -> Outcome {
    let cfg = ExperimentConfig::parse(
        Experiment::SweepRatio,
        "objective = sphere\nd = 3\nbudgets = 5000\nruns = 30\nratios = 0.0002, logspace:0.0004:0.5:15\nmaster_seed = 4",
    )
    .map_err(|e| e.to_string())?;
    let rows = sweep_ratio(&cfg, jobs()).map_err(|e| e.to_string())?;
    let best_label = rows
        .iter()
        .filter(|r| r.run == RunLabel::Mean)
        .min_by(|a, b| a.regret.total_cmp(&b.regret))
        .map(|r| r.estimator.clone())
        .ok_or("no aggregate rows")?;
    let single = runs_of(&rows, &ratio_label(0.0002));
    if single.iter().any(|r| r.mu != Some(1)) {
        return Err("leftmost ratio does not resolve to mu = 1".into());
    }
    let best = runs_of(&rows, &best_label);
    let diffs: Vec<f64> = best
        .iter()
        .zip(&single)
        .map(|(a, b)| a.regret - b.regret)
        .collect();
    let s = summarize(&diffs).map_err(|e| e.to_string())?;
    let bound = s.mean + 1.645 * s.std_error;
    let msg = format!(
        "best ratio {} (mu = {:?}): paired mean difference {:.3e}, upper 95% bound {:.3e}",
        best_label.trim_start_matches("avg:selection:"),
        best[0].mu,
        s.mean,
        bound
    );
    if bound < 0.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn ac5_exponent_separation() -> Outcome {
    let cfg = ExperimentConfig::parse(
        Experiment::RateFit,
        "objective = perturbed_sphere\nd = 5\nbudgets = pow2:9:15\nruns = 100\nestimators = best, avg:theorem1:1:3\nmaster_seed = 5",
    )
    .map_err(|e| e.to_string())?;
    let out = rate_fit_experiment(&cfg, jobs()).map_err(|e| e.to_string())?;
    let best = fit_for(&out.fits, "best")?;
    let avg = fit_for(&out.fits, "avg:theorem1:1:3")?;
    let msg = format!(
        "averaging slope {avg:.4} vs best-of slope {best:.4} (need <= {:.4})",
        best - 0.05
    );
    if avg <= best - 0.05 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn ac6_monotone_invariance() -> Outcome {
    let specs: Vec<EstimatorSpec> = [
        "best",
        "avg:theorem1:1:3",
        "avg:ratio:1.1",
        "avg:fixed:10",
        "havg:ratio:1.1:1e-9",
    ]
    .iter()
    .map(|s| s.parse().expect("valid estimator"))
    .collect();
    let cfg = ExperimentConfig::defaults(Experiment::SweepRatio);
    let mut compared = 0;
    for f in SuiteFunction::ALL {
        for d in [2, 5] {
            let key = CellKey {
                objective: f.name().parse::<ObjectiveName>().expect("suite name"),
                d,
                lambda: 1000,
                run: 0,
            };
            let problem = instantiate(&cfg, &key).map_err(|e| e.to_string())?;
            let warped = exp_wrap(&problem.objective);
            let points = cfg
                .sampler
                .draw(&mut problem.sampling.clone(), d, 1000)
                .map_err(|e| e.to_string())?;
            let plain = RankedBatch::evaluate(points.clone(), &problem.objective)
                .map_err(|e| e.to_string())?;
            let wrapped = RankedBatch::evaluate(points, &warped).map_err(|e| e.to_string())?;
            if plain.order() != wrapped.order() {
                return Err(format!("{} d={d}: ranking differs", f.name()));
            }
            for spec in &specs {
                let a = spec.recommend(&plain).map_err(|e| e.to_string())?;
                let b = spec.recommend(&wrapped).map_err(|e| e.to_string())?;
                let same_bits = a.mu == b.mu
                    && a.point
                        .iter()
                        .zip(b.point.iter())
                        .all(|(x, y)| x.to_bits() == y.to_bits());
                if !same_bits {
                    return Err(format!("{} d={d} {spec}: recommendations differ", f.name()));
                }
                compared += 1;
            }
        }
    }
    Ok(format!(
        "{compared} recommendations bit-identical under exp"
    ))
}

fn convex_hull(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Winding number of a closed polygon around `q`.
fn winding_number(poly: &[[f64; 2]], q: [f64; 2]) -> i32 {
    let mut wn = 0;
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        let side = (b[0] - a[0]) * (q[1] - a[1]) - (q[0] - a[0]) * (b[1] - a[1]);
        if a[1] <= q[1] {
            if b[1] > q[1] && side > 0.0 {
                wn += 1;
            }
        } else if b[1] <= q[1] && side < 0.0 {
            wn -= 1;
        }
    }
    wn
}

fn segment_distance(a: [f64; 2], b: [f64; 2], q: [f64; 2]) -> f64 {
    let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
    let t = (((q[0] - a[0]) * ex + (q[1] - a[1]) * ey) / (ex * ex + ey * ey)).clamp(0.0, 1.0);
    ((q[0] - a[0] - t * ex).powi(2) + (q[1] - a[1] - t * ey).powi(2)).sqrt()
}

fn ac7_hull_oracle() -> Outcome {
    let mut rng = RngStream::new(77, 7);
    let (mut agree, mut inside, mut skipped) = (0, 0, 0);
    while agree < 1000 {
        let k = rng.random_range(3..=4);
        let gens: Vec<[f64; 2]> = (0..k)
            .map(|_| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)])
            .collect();
        let q = [rng.random_range(-0.7..0.7), rng.random_range(-0.7..0.7)];
        let hull = convex_hull(gens.clone());
        let diameter = gens
            .iter()
            .flat_map(|a| {
                gens.iter()
                    .map(move |b| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt())
            })
            .fold(0.0, f64::max);
        let boundary = (0..hull.len())
            .map(|i| segment_distance(hull[i], hull[(i + 1) % hull.len()], q))
            .fold(f64::INFINITY, f64::min);
        if hull.len() < 3 || boundary < 10.0 * DEFAULT_TOL * diameter {
            skipped += 1;
            continue;
        }
        let expect = winding_number(&hull, q) != 0;
        let points: Vec<Point> = gens
            .iter()
            .map(|g| Point::new(g.to_vec()).expect("finite"))
            .collect();
        let query = Point::new(q.to_vec()).expect("finite");
        let got = in_hull_interior(
            &HullQuery::new(&query, &points, DEFAULT_TOL).map_err(|e| e.to_string())?,
        )
        .map_err(|e| e.to_string())?;
        if got != expect {
            return Err(format!("disagreement on generators {gens:?}, query {q:?}"));
        }
        agree += 1;
        inside += got as usize;
    }
    Ok(format!(
        "1000/1000 agree ({inside} interior, {skipped} near-boundary draws skipped)"
    ))
}

fn ac8_hull_filter() -> Outcome {
    let batch = distinguishing_batch();
    let rule6 = hull_filtered_mu(&batch, 5, DEFAULT_TOL).map_err(|e| e.to_string())?;
    let rule5 = self_inclusion_mu(&batch, 5, DEFAULT_TOL).map_err(|e| e.to_string())?;
    let msg = format!("hull filter mu = {rule6}, self-inclusion mu = {rule5}");
    if rule6 == 3 && rule5 == 4 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn ac9_phi_asymptotics() -> Outcome {
    let (h, alpha) = (1e-6f64, 3.0);
    let scale = h.powf((alpha - 1.0) / 2.0);
    let minus = (phi_minus(h, 1.0, alpha).map_err(|e| e.to_string())? - h.sqrt()) / scale;
    let plus = (phi_plus(h, 1.0, alpha).map_err(|e| e.to_string())? - h.sqrt()) / scale;
    let msg = format!("phi- ratio {minus:.6}, phi+ ratio {plus:.6}");
    if (minus + 0.5).abs() <= 0.005 && (plus - 0.5).abs() <= 0.005 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn ac10_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let run = |jobs: &str| -> Result<Vec<u8>, String> {
        let path = dir.path().join(format!("sweep-{jobs}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_oneshot"))
            .args(["sweep-ratio", "--seed", "2024", "--jobs", jobs, "--out"])
            .arg(&path)
            .status()
            .map_err(|e| e.to_string())?;
        if !status.success() {
            return Err(format!("oneshot exited with {status}"));
        }
        std::fs::read(&path).map_err(|e| e.to_string())
    };
    let one = run("1")?;
    let eight = run("8")?;
    if one.is_empty() {
        return Err("empty output".into());
    }
    if one == eight {
        Ok(format!("{} bytes identical", one.len()))
    } else {
        Err("outputs differ".into())
    }
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            id: "AC1",
            title: "closed form vs quadrature",
            limit: Some(Duration::from_secs(5)),
            check: ac1_closed_form,
        },
        Criterion {
            id: "AC2",
            title: "sampler vs closed form",
            limit: Some(Duration::from_secs(30)),
            check: ac2_monte_carlo,
        },
        Criterion {
            id: "AC3",
            title: "random search rate",
            limit: Some(Duration::from_secs(120)),
            check: ac3_random_search_rate,
        },
        Criterion {
            id: "AC4",
            title: "averaging beats best",
            limit: Some(Duration::from_secs(60)),
            check: ac4_averaging_beats_best,
        },
        Criterion {
            id: "AC5",
            title: "averaging exponent separation",
            limit: Some(Duration::from_secs(300)),
            check: ac5_exponent_separation,
        },
        Criterion {
            id: "AC6",
            title: "monotone invariance",
            limit: None,
            check: ac6_monotone_invariance,
        },
        Criterion {
            id: "AC7",
            title: "hull interior oracle",
            limit: None,
            check: ac7_hull_oracle,
        },
        Criterion {
            id: "AC8",
            title: "hull filter discrimination",
            limit: None,
            check: ac8_hull_filter,
        },
        Criterion {
            id: "AC9",
            title: "sublevel radius asymptotics",
            limit: Some(Duration::from_secs(1)),
            check: ac9_phi_asymptotics,
        },
        Criterion {
            id: "AC10",
            title: "determinism across thread counts",
            limit: None,
            check: ac10_determinism,
        },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let mut outcome = (c.check)();
        let elapsed = start.elapsed();
        if let (Ok(msg), Some(limit)) = (&outcome, c.limit) {
            if elapsed > limit {
                outcome = Err(format!("{msg}; exceeded time limit of {:?}", limit));
            }
        }
        let (tag, detail) = match &outcome {
            Ok(m) => ("PASS", m),
            Err(m) => {
                failed += 1;
                ("FAIL", m)
            }
        };
        println!(
            "[{tag}] {:<5} {:<34} {detail} ({:.2} s)",
            c.id,
            c.title,
            elapsed.as_secs_f64()
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
