//! One-shot candidate generation.
//!
//! The theory samples uniformly on a ball; the comparison experiments sample
//! from a (possibly rescaled) Gaussian, optionally paired with quasi-opposite
//! points, a forced centre point, or a scrambled Hammersley design mapped
//! through the normal inverse CDF.

mod hammersley;
mod stream;

pub use hammersley::{first_primes, radical_inverse, scrambled_hammersley, ScrambledHammersley};
pub use stream::{derive_seed, splitmix64, RngStream};

use rand::distr::Open01;
use rand::Rng;
use rand_distr::StandardNormal;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{invalid, Result};
use crate::point::Point;

fn check_count(n: usize) -> Result<()> {
    if n == 0 {
        Err(invalid("sample count must be at least 1"))
    } else {
        Ok(())
    }
}

/// `n` points uniform on the closed ball `B(0, r)` in `R^d`.
///
/// Direction from a normalized standard Gaussian, radius `r * U^(1/d)`.
pub fn sample_uniform_ball<R: Rng + ?Sized>(
    rng: &mut R,
    d: usize,
    r: f64,
    n: usize,
) -> Result<Vec<Point>> {
    if d == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(invalid(format!("ball radius must be positive, got {r}")));
    }
    check_count(n)?;
    let inv_d = 1.0 / d as f64;
    let mut out = Vec::with_capacity(n);
    let mut dir = vec![0.0; d];
    for _ in 0..n {
        let norm = loop {
            for c in dir.iter_mut() {
                *c = rng.sample(StandardNormal);
            }
            let norm = dir.iter().map(|c| c * c).sum::<f64>().sqrt();
            if norm > 0.0 {
                break norm;
            }
        };
        let u: f64 = rng.random();
        let radius = r * u.powf(inv_d);
        out.push(Point::from_raw(
            dir.iter().map(|c| c / norm * radius).collect(),
        ));
    }
    Ok(out)
}

/// `n` i.i.d. points from `sigma * N(0, I_d)`.
pub fn sample_gaussian<R: Rng + ?Sized>(
    rng: &mut R,
    d: usize,
    sigma: f64,
    n: usize,
) -> Result<Vec<Point>> {
    if d == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(invalid(format!("sigma must be positive, got {sigma}")));
    }
    check_count(n)?;
    Ok((0..n)
        .map(|_| {
            Point::from_raw(
                (0..d)
                    .map(|_| sigma * rng.sample::<f64, _>(StandardNormal))
                    .collect(),
            )
        })
        .collect())
}

/// Interleaves each point `x` with `-r x`, `r` drawn uniformly in `(0, 1)`.
pub fn quasi_opposite_extend<R: Rng + ?Sized>(points: &[Point], rng: &mut R) -> Result<Vec<Point>> {
    let factors: Vec<f64> = (0..points.len()).map(|_| rng.sample(Open01)).collect();
    quasi_opposite_with_factors(points, &factors)
}

/// Quasi-opposite extension with explicit shrink factors, one per point.
pub fn quasi_opposite_with_factors(points: &[Point], factors: &[f64]) -> Result<Vec<Point>> {
    if points.is_empty() {
        return Err(invalid("quasi-opposite extension needs at least one point"));
    }
    if factors.len() != points.len() {
        return Err(invalid(format!(
            "{} factors for {} points",
            factors.len(),
            points.len()
        )));
    }
    if let Some(bad) = factors.iter().find(|&&f| !(f > 0.0 && f < 1.0)) {
        return Err(invalid(format!("shrink factor {bad} is not in (0, 1)")));
    }
    let mut out = Vec::with_capacity(2 * points.len());
    for (p, &f) in points.iter().zip(factors) {
        out.push(p.clone());
        out.push(p.scaled(-f));
    }
    Ok(out)
}

/// Replaces the first point by the centre of the domain.
pub fn with_middle_point(mut points: Vec<Point>) -> Result<Vec<Point>> {
    let first = points
        .first_mut()
        .ok_or_else(|| invalid("middle-point replacement needs a non-empty batch"))?;
    *first = Point::zeros(first.dim());
    Ok(points)
}

/// Gaussian width `(1 + ln lambda) / (4 ln d)`.
pub fn meta_recentering_sigma(lambda: usize, d: usize) -> Result<f64> {
    if d <= 1 {
        return Err(invalid(format!(
            "meta-recentering needs dimension >= 2 (ln d > 0), got {d}"
        )));
    }
    if lambda == 0 {
        return Err(invalid("budget must be at least 1"));
    }
    Ok((1.0 + (lambda as f64).ln()) / (4.0 * (d as f64).ln()))
}

/// Gaussian width `sqrt(ln lambda / d)`.
pub fn meta_tune_recentering_sigma(lambda: usize, d: usize) -> Result<f64> {
    if lambda <= 1 {
        return Err(invalid(format!(
            "meta-tune-recentering needs budget >= 2, got {lambda}"
        )));
    }
    if d == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    Ok(((lambda as f64).ln() / d as f64).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SamplerKind {
    UniformBall {
        radius: f64,
    },
    Gaussian {
        sigma: f64,
    },
    /// Scrambled Hammersley design pushed through the standard normal
    /// inverse CDF, so it targets the same law as `Gaussian { sigma: 1 }`.
    ScrambledHammersley,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rescaling {
    #[default]
    None,
    MetaRecentering,
    MetaTuneRecentering,
}

/// A complete one-shot sampling scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerSpec {
    pub kind: SamplerKind,
    pub quasi_opposite: bool,
    pub middle_point: bool,
    pub rescaling: Rescaling,
}

impl SamplerSpec {
    pub fn uniform_ball(radius: f64) -> Self {
        SamplerSpec {
            kind: SamplerKind::UniformBall { radius },
            quasi_opposite: false,
            middle_point: false,
            rescaling: Rescaling::None,
        }
    }

    pub fn gaussian(sigma: f64) -> Self {
        SamplerSpec {
            kind: SamplerKind::Gaussian { sigma },
            ..Self::uniform_ball(1.0)
        }
    }

    pub fn scrambled_hammersley() -> Self {
        SamplerSpec {
            kind: SamplerKind::ScrambledHammersley,
            ..Self::uniform_ball(1.0)
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            SamplerKind::UniformBall { radius } if !(radius > 0.0 && radius.is_finite()) => {
                return Err(invalid(format!(
                    "ball radius must be positive, got {radius}"
                )))
            }
            SamplerKind::Gaussian { sigma } if !(sigma > 0.0 && sigma.is_finite()) => {
                return Err(invalid(format!("sigma must be positive, got {sigma}")))
            }
            _ => {}
        }
        if self.rescaling != Rescaling::None && !matches!(self.kind, SamplerKind::Gaussian { .. }) {
            return Err(invalid("rescaling applies to the gaussian sampler only"));
        }
        Ok(())
    }

    /// Effective Gaussian width for budget `lambda` in dimension `d`.
    pub fn effective_sigma(&self, lambda: usize, d: usize) -> Result<Option<f64>> {
        let SamplerKind::Gaussian { sigma } = self.kind else {
            return Ok(None);
        };
        let factor = match self.rescaling {
            Rescaling::None => 1.0,
            Rescaling::MetaRecentering => meta_recentering_sigma(lambda, d)?,
            Rescaling::MetaTuneRecentering => meta_tune_recentering_sigma(lambda, d)?,
        };
        Ok(Some(sigma * factor))
    }

    /// Draws a batch of exactly `lambda` points in `R^d`.
    ///
    /// With quasi-opposite sampling, `ceil(lambda / 2)` base points are drawn
    /// and the interleaved batch is truncated to `lambda`. The middle point, if
    /// requested, replaces index 0 last.
    pub fn draw(&self, rng: &mut RngStream, d: usize, lambda: usize) -> Result<Vec<Point>> {
        self.validate()?;
        check_count(lambda)?;
        let base_count = if self.quasi_opposite {
            lambda.div_ceil(2)
        } else {
            lambda
        };
        let mut points = match self.kind {
            SamplerKind::UniformBall { radius } => sample_uniform_ball(rng, d, radius, base_count)?,
            SamplerKind::Gaussian { .. } => {
                let sigma = self.effective_sigma(lambda, d)?.expect("gaussian kind");
                sample_gaussian(rng, d, sigma, base_count)?
            }
            SamplerKind::ScrambledHammersley => {
                let seed = rng.random::<u64>();
                hammersley_gaussian(d, base_count, seed)?
            }
        };
        if self.quasi_opposite {
            points = quasi_opposite_extend(&points, rng)?;
            points.truncate(lambda);
        }
        if self.middle_point {
            points = with_middle_point(points)?;
        }
        Ok(points)
    }
}

/// A scrambled Hammersley design mapped to `N(0, I_d)` by the probit transform.
pub fn hammersley_gaussian(d: usize, n: usize, scramble_seed: u64) -> Result<Vec<Point>> {
    check_count(n)?;
    let design = ScrambledHammersley::new(d, n as u64, scramble_seed)?;
    let normal = Normal::standard();
    (0..n as u64)
        .map(|i| {
            let u = design.centered_coords(i)?;
            Ok(Point::from_raw(
                u.into_iter().map(|c| normal.inverse_cdf(c)).collect(),
            ))
        })
        .collect()
}
