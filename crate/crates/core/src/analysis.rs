//! Closed forms, rate fits, sublevel radii and run statistics.

use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Error, Result};

/// `E[min_i |X_i|^2] / r^2` for `lambda` uniform draws in a `d`-ball of radius `r`
/// centred on the optimum: `Gamma((d+2)/d) Gamma(lambda+1) / Gamma(lambda+1+2/d)`.
pub fn expected_min_sphere(lambda: u64, d: usize) -> f64 {
    let l = lambda as f64;
    let e = 2.0 / d as f64;
    (ln_gamma(1.0 + e) + ln_gamma(l + 1.0) - ln_gamma(l + 1.0 + e)).exp()
}

/// Least-squares fit of `ln(regret) = intercept + slope * ln(budget)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// RMS of the log-regret residuals.
    pub residual: f64,
    pub n_points: usize,
}

pub fn fit_rate(budgets: &[u64], regrets: &[f64]) -> Result<RateFit> {
    if budgets.len() != regrets.len() {
        return Err(invalid(format!(
            "{} budgets but {} regrets",
            budgets.len(),
            regrets.len()
        )));
    }
    if budgets.len() < 3 {
        return Err(invalid("a rate fit needs at least 3 points"));
    }
    if let Some(&b) = budgets.iter().find(|&&b| b == 0) {
        return Err(invalid(format!("budget must be positive, got {b}")));
    }
    if let Some(r) = regrets.iter().find(|r| !(**r > 0.0) || !r.is_finite()) {
        return Err(invalid(format!(
            "regret must be positive and finite, got {r}"
        )));
    }
    let x: Vec<f64> = budgets.iter().map(|&b| (b as f64).ln()).collect();
    let y: Vec<f64> = regrets.iter().map(|r| r.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if sxx == 0.0 {
        return Err(invalid("budgets must not all be equal"));
    }
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = x
        .iter()
        .zip(&y)
        .map(|(a, b)| {
            let e = b - intercept - slope * a;
            e * e
        })
        .sum();
    Ok(RateFit {
        slope,
        intercept,
        residual: (ss / n).sqrt(),
        n_points: budgets.len(),
    })
}

/// Constants of a locally perturbed quadratic: `|eps(u)| <= upper * u^alpha` and
/// `eps(u) >= -lower * u^alpha`, looked at at level `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SublevelGeometry {
    pub upper: f64,
    pub lower: f64,
    pub alpha: f64,
    pub h: f64,
}

impl SublevelGeometry {
    /// Radius of the inner ball: root of `u^2 + upper u^alpha = h`.
    pub fn inner_radius(&self) -> Result<f64> {
        phi_minus(self.h, self.upper, self.alpha)
    }

    /// Radius of the outer ball: root of `u^2 - lower u^alpha = h` below the peak.
    pub fn outer_radius(&self) -> Result<f64> {
        phi_plus(self.h, self.lower, self.alpha)
    }
}

/// Location of the maximum of `u^2 - m u^alpha`.
pub fn peak_radius(m: f64, alpha: f64) -> f64 {
    (2.0 / (alpha * m)).powf(1.0 / (alpha - 2.0))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 2.0) || !alpha.is_finite() {
        return Err(invalid(format!("alpha must exceed 2, got {alpha}")));
    }
    Ok(())
}

fn check_level(h: f64) -> Result<()> {
    if !(h >= 0.0) || !h.is_finite() {
        return Err(invalid(format!(
            "level must be finite and non-negative, got {h}"
        )));
    }
    Ok(())
}

/// Non-negative root of `u^2 + big_m u^alpha = h`.
pub fn phi_minus(h: f64, big_m: f64, alpha: f64) -> Result<f64> {
    check_level(h)?;
    check_alpha(alpha)?;
    if !(big_m >= 0.0) || !big_m.is_finite() {
        return Err(invalid(format!("M must be non-negative, got {big_m}")));
    }
    if h == 0.0 {
        return Ok(0.0);
    }
    if big_m == 0.0 {
        return Ok(h.sqrt());
    }
    let g = |u: f64| u * u + big_m * u.powf(alpha) - h;
    let dg = |u: f64| 2.0 * u + alpha * big_m * u.powf(alpha - 1.0);
    increasing_root(g, dg, 0.0, h.sqrt())
}

/// Root of `u^2 - m u^alpha = h` on `[0, r0]`, `r0` the peak of the left side.
pub fn phi_plus(h: f64, m: f64, alpha: f64) -> Result<f64> {
    check_level(h)?;
    check_alpha(alpha)?;
    if !(m > 0.0) || !m.is_finite() {
        return Err(invalid(format!("m must be positive, got {m}")));
    }
    let r0 = peak_radius(m, alpha);
    let peak = r0 * r0 - m * r0.powf(alpha);
    if h >= peak {
        return Err(Error::OutOfDomain(format!(
            "level {h} is not below the peak value {peak} at radius {r0}"
        )));
    }
    if h == 0.0 {
        return Ok(0.0);
    }
    let g = |u: f64| u * u - m * u.powf(alpha) - h;
    let dg = |u: f64| 2.0 * u - alpha * m * u.powf(alpha - 1.0);
    increasing_root(g, dg, h.sqrt().min(r0), r0)
}

/// Root of a function increasing on `[lo, hi]` with `g(lo) <= 0 <= g(hi)`,
/// by Newton steps kept inside a shrinking bisection bracket.
fn increasing_root(
    g: impl Fn(f64) -> f64,
    dg: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
) -> Result<f64> {
    let (glo, ghi) = (g(lo), g(hi));
    if glo == 0.0 {
        return Ok(lo);
    }
    if ghi == 0.0 {
        return Ok(hi);
    }
    if glo > 0.0 || ghi < 0.0 {
        return Err(Error::NumericalFailure(format!(
            "root not bracketed by [{lo}, {hi}]"
        )));
    }
    let mut u = 0.5 * (lo + hi);
    for _ in 0..200 {
        let v = g(u);
        if v == 0.0 {
            return Ok(u);
        }
        if v < 0.0 {
            lo = u;
        } else {
            hi = u;
        }
        let slope = dg(u);
        let newton = u - v / slope;
        let next = if slope > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - u).abs() <= 1e-12 * next.abs() || hi - lo <= 1e-12 * hi {
            return Ok(next);
        }
        u = next;
    }
    Err(Error::NumericalFailure(
        "root finder did not converge".into(),
    ))
}

/// Sample mean, standard error and normal-approximation 95% interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    pub std_error: f64,
    pub ci95: (f64, f64),
}

pub fn summarize(values: &[f64]) -> Result<Summary> {
    if values.len() < 2 {
        return Err(invalid(format!(
            "need at least 2 values to summarize, got {}",
            values.len()
        )));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    let std_error = (var / n).sqrt();
    let half = 1.96 * std_error;
    Ok(Summary {
        n: values.len(),
        mean,
        std_error,
        ci95: (mean - half, mean + half),
    })
}
