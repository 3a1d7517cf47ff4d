//! Benchmark objectives with known optima.
//!
//! Every objective is addressed relative to its optimum `x*`; the suite
//! functions are written in terms of the displacement `u = x - x*` and all
//! vanish at `u = 0`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{check_dims, invalid, Error, Result};
use crate::point::Point;
use crate::sampling::sample_uniform_ball;

pub type Evaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// An evaluatable objective with known optimum location and value.
#[derive(Clone)]
pub struct ObjectiveSpec {
    name: String,
    optimum: Point,
    optimum_value: f64,
    eval: Evaluator,
}

impl fmt::Debug for ObjectiveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ObjectiveSpec")
            .field("name", &self.name)
            .field("dim", &self.dim())
            .field("optimum_value", &self.optimum_value)
            .finish_non_exhaustive()
    }
}

impl ObjectiveSpec {
    pub fn new(
        name: impl Into<String>,
        optimum: Point,
        optimum_value: f64,
        eval: Evaluator,
    ) -> Self {
        ObjectiveSpec {
            name: name.into(),
            optimum,
            optimum_value,
            eval,
        }
    }

    /// One of the suite functions centred at `optimum`.
    pub fn suite(function: SuiteFunction, optimum: Point) -> Self {
        let center = optimum.clone();
        let eval: Evaluator = Arc::new(move |x: &[f64]| {
            let u: Vec<f64> = x.iter().zip(center.iter()).map(|(a, b)| a - b).collect();
            function.at_displacement(&u)
        });
        ObjectiveSpec::new(function.name(), optimum, 0.0, eval)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.optimum.dim()
    }

    pub fn optimum(&self) -> &Point {
        &self.optimum
    }

    pub fn optimum_value(&self) -> f64 {
        self.optimum_value
    }

    pub fn evaluate(&self, x: &Point) -> Result<f64> {
        check_dims(self.dim(), x.dim())?;
        Ok((self.eval)(x))
    }

    /// Evaluation without the dimension check.
    pub fn value(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }

    /// Simple regret `f(x) - f(x*)`.
    pub fn regret(&self, x: &Point) -> Result<f64> {
        Ok(self.evaluate(x)? - self.optimum_value)
    }
}

/// The named benchmark functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteFunction {
    Sphere,
    Rastrigin,
    PerturbedSphere,
    Griewank,
}

impl SuiteFunction {
    pub const ALL: [SuiteFunction; 4] = [
        SuiteFunction::Sphere,
        SuiteFunction::Rastrigin,
        SuiteFunction::PerturbedSphere,
        SuiteFunction::Griewank,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SuiteFunction::Sphere => "sphere",
            SuiteFunction::Rastrigin => "rastrigin",
            SuiteFunction::PerturbedSphere => "perturbed_sphere",
            SuiteFunction::Griewank => "griewank",
        }
    }

    pub fn at_displacement(self, u: &[f64]) -> f64 {
        match self {
            SuiteFunction::Sphere => u.iter().map(|v| v * v).sum(),
            SuiteFunction::Rastrigin => u.iter().map(|v| v * v + 1.0 - (2.0 * PI * v).cos()).sum(),
            SuiteFunction::PerturbedSphere => {
                let quad: f64 = u.iter().map(|v| v * v).sum();
                let asym: f64 = u.iter().map(|&v| if v > 0.0 { v } else { -2.0 * v }).sum();
                quad + asym.powi(3)
            }
            SuiteFunction::Griewank => {
                let quad: f64 = u.iter().map(|v| v * v).sum::<f64>() / 4000.0;
                let prod: f64 = u
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
                    .product();
                quad + (1.0 - prod)
            }
        }
    }

    fn checked(self, x: &Point, x_star: &Point) -> Result<f64> {
        check_dims(x_star.dim(), x.dim())?;
        Ok(self.at_displacement(&x.displacement_from(x_star)))
    }
}

impl FromStr for SuiteFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SuiteFunction::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| invalid(format!("unknown suite function '{s}'")))
    }
}

/// `sum (x_i - x*_i)^2`
pub fn sphere(x: &Point, x_star: &Point) -> Result<f64> {
    SuiteFunction::Sphere.checked(x, x_star)
}

/// `sum [(x_i - x*_i)^2 + 1 - cos(2 pi (x_i - x*_i))]`
pub fn rastrigin(x: &Point, x_star: &Point) -> Result<f64> {
    SuiteFunction::Rastrigin.checked(x, x_star)
}

/// `sum u_i^2 + (sum g(u_i))^3` with `g(u) = u` for `u > 0`, `-2u` otherwise.
pub fn perturbed_sphere(x: &Point, x_star: &Point) -> Result<f64> {
    SuiteFunction::PerturbedSphere.checked(x, x_star)
}

/// `1 + sum u_i^2 / 4000 - prod cos(u_i / sqrt(i))`, `i` from 1.
pub fn griewank(x: &Point, x_star: &Point) -> Result<f64> {
    SuiteFunction::Griewank.checked(x, x_star)
}

/// The objective `g(f(x))` for a strictly increasing `g`.
///
/// Monotonicity is the caller's contract. It is spot-checked on 100 values of
/// `f` along a ray from the optimum and a warning is logged on violation.
pub fn monotone_wrap<G>(f: &ObjectiveSpec, g: G) -> ObjectiveSpec
where
    G: Fn(f64) -> f64 + Send + Sync + 'static,
{
    let g = Arc::new(g);
    spot_check_increasing(f, g.as_ref());
    let inner = f.eval.clone();
    let outer = g.clone();
    let eval: Evaluator = Arc::new(move |x: &[f64]| outer(inner(x)));
    ObjectiveSpec::new(
        format!("g({})", f.name),
        f.optimum.clone(),
        g(f.optimum_value),
        eval,
    )
}

/// `exp(f(x))`, named `<name>:exp`.
pub fn exp_wrap(f: &ObjectiveSpec) -> ObjectiveSpec {
    monotone_wrap(f, f64::exp).with_name(format!("{}:exp", f.name))
}

fn spot_check_increasing(f: &ObjectiveSpec, g: &dyn Fn(f64) -> f64) {
    let d = f.dim();
    let mut values: Vec<f64> = (1..=100)
        .map(|k| {
            let mut x = f.optimum.clone().into_inner();
            let t = k as f64 / 50.0;
            x[0] += t;
            x[d - 1] -= 0.5 * t;
            (f.eval)(&x)
        })
        .chain(std::iter::once(f.optimum_value))
        .filter(|v| v.is_finite())
        .collect();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let mapped: Vec<f64> = values.iter().map(|&v| g(v)).collect();
    if mapped.windows(2).any(|w| !(w[0] < w[1])) {
        log::warn!(
            "monotone_wrap: outer map is not strictly increasing on the range of {}",
            f.name
        );
    }
}

/// Bounded perturbation `eps(u) = amplitude * cos(w . u)`, `|w| = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CosinePerturbation {
    pub amplitude: f64,
    pub direction: Vec<f64>,
}

impl CosinePerturbation {
    pub fn value(&self, u: &[f64]) -> f64 {
        let dot: f64 = self.direction.iter().zip(u).map(|(w, v)| w * v).sum();
        self.amplitude * dot.cos()
    }
}

/// `f(x) = q + q^(alpha/2) eps(x - x*)` with `q = (x - x*)^T H (x - x*)`.
#[derive(Debug, Clone)]
pub struct PerturbedQuadratic {
    dim: usize,
    /// Row-major, symmetric positive definite.
    h: Vec<f64>,
    alpha: f64,
    optimum: Point,
    perturbation: CosinePerturbation,
    eigenvalues: Vec<f64>,
}

impl PerturbedQuadratic {
    pub fn new(
        h: Vec<f64>,
        alpha: f64,
        optimum: Point,
        perturbation: CosinePerturbation,
    ) -> Result<Self> {
        let dim = optimum.dim();
        if h.len() != dim * dim {
            return Err(invalid(format!(
                "H has {} entries, expected {}",
                h.len(),
                dim * dim
            )));
        }
        if !(alpha > 2.0) {
            return Err(invalid(format!("alpha must exceed 2, got {alpha}")));
        }
        check_dims(dim, perturbation.direction.len())?;
        if !(perturbation.amplitude >= 0.0) {
            return Err(invalid("perturbation bound must be non-negative"));
        }
        for i in 0..dim {
            for j in 0..i {
                let (a, b) = (h[i * dim + j], h[j * dim + i]);
                if (a - b).abs() > 1e-12 * (1.0 + a.abs().max(b.abs())) {
                    return Err(invalid(format!("H is not symmetric at ({i}, {j})")));
                }
            }
        }
        let mut eigenvalues = symmetric_eigenvalues(&h, dim);
        eigenvalues.sort_by(f64::total_cmp);
        if eigenvalues[0] <= 0.0 {
            return Err(invalid(format!(
                "H is not positive definite (smallest eigenvalue {})",
                eigenvalues[0]
            )));
        }
        Ok(PerturbedQuadratic {
            dim,
            h,
            alpha,
            optimum,
            perturbation,
            eigenvalues,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn hessian(&self) -> &[f64] {
        &self.h
    }

    pub fn optimum(&self) -> &Point {
        &self.optimum
    }

    pub fn perturbation(&self) -> &CosinePerturbation {
        &self.perturbation
    }

    /// Declared bound `M >= sup |eps|`.
    pub fn perturbation_bound(&self) -> f64 {
        self.perturbation.amplitude
    }

    /// Eigenvalues of `H`, ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `e_1(H)`
    pub fn smallest_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// `e_d(H)`
    pub fn largest_eigenvalue(&self) -> f64 {
        self.eigenvalues[self.dim - 1]
    }

    /// `u^T H u`
    pub fn h_norm_squared(&self, u: &[f64]) -> f64 {
        let d = self.dim;
        (0..d)
            .map(|i| {
                let row = &self.h[i * d..(i + 1) * d];
                u[i] * row.iter().zip(u).map(|(a, b)| a * b).sum::<f64>()
            })
            .sum()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let u: Vec<f64> = x
            .iter()
            .zip(self.optimum.iter())
            .map(|(a, b)| a - b)
            .collect();
        let q = self.h_norm_squared(&u);
        q + q.powf(self.alpha / 2.0) * self.perturbation.value(&u)
    }

    /// Same quadratic and perturbation, optimum moved to `optimum`.
    pub fn recentered(mut self, optimum: Point) -> Result<Self> {
        check_dims(self.dim, optimum.dim())?;
        self.optimum = optimum;
        Ok(self)
    }

    pub fn into_objective(self, name: impl Into<String>) -> ObjectiveSpec {
        let optimum = self.optimum.clone();
        let this = Arc::new(self);
        ObjectiveSpec::new(name, optimum, 0.0, Arc::new(move |x: &[f64]| this.value(x)))
    }
}

/// A random instance with `x* = 0`: `H = Q^T D Q`, `Q` a random rotation, `D`
/// log-uniform on `[1, kappa]`, and `eps(u) = M cos(w . u)` with random unit `w`.
pub fn make_perturbed_quadratic<R: Rng + ?Sized>(
    rng: &mut R,
    d: usize,
    alpha: f64,
    kappa: f64,
    m: f64,
) -> Result<PerturbedQuadratic> {
    if d == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    if !(alpha > 2.0) {
        return Err(invalid(format!("alpha must exceed 2, got {alpha}")));
    }
    if !(kappa >= 1.0 && kappa.is_finite()) {
        return Err(invalid(format!(
            "condition number must be >= 1, got {kappa}"
        )));
    }
    if !(m >= 0.0 && m.is_finite()) {
        return Err(invalid(format!("perturbation bound must be >= 0, got {m}")));
    }
    let q = random_rotation(rng, d);
    let diag: Vec<f64> = (0..d)
        .map(|_| (rng.random::<f64>() * kappa.ln()).exp())
        .collect();
    let mut h = vec![0.0; d * d];
    for i in 0..d {
        for j in i..d {
            let v: f64 = (0..d).map(|k| q[k * d + i] * diag[k] * q[k * d + j]).sum();
            h[i * d + j] = v;
            h[j * d + i] = v;
        }
    }
    let mut w: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
    let norm = w.iter().map(|c| c * c).sum::<f64>().sqrt();
    w.iter_mut().for_each(|c| *c /= norm);
    PerturbedQuadratic::new(
        h,
        alpha,
        Point::zeros(d),
        CosinePerturbation {
            amplitude: m,
            direction: w,
        },
    )
}

/// Row-major orthogonal matrix from Gram-Schmidt on a Gaussian matrix.
fn random_rotation<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<f64> {
    loop {
        let mut rows: Vec<Vec<f64>> = (0..d)
            .map(|_| (0..d).map(|_| rng.sample(StandardNormal)).collect())
            .collect();
        let mut ok = true;
        for i in 0..d {
            for j in 0..i {
                let dot: f64 = rows[i].iter().zip(&rows[j]).map(|(a, b)| a * b).sum();
                let (head, tail) = rows.split_at_mut(i);
                for (a, b) in tail[0].iter_mut().zip(&head[j]) {
                    *a -= dot * b;
                }
            }
            let norm = rows[i].iter().map(|c| c * c).sum::<f64>().sqrt();
            if norm < 1e-8 {
                ok = false;
                break;
            }
            rows[i].iter_mut().for_each(|c| *c /= norm);
        }
        if ok {
            return rows.concat();
        }
    }
}

/// Eigenvalues of a symmetric row-major matrix by cyclic Jacobi rotations,
/// iterated until the off-diagonal Frobenius norm is below `1e-10`
/// (relative to the matrix norm when that exceeds one).
pub fn symmetric_eigenvalues(matrix: &[f64], d: usize) -> Vec<f64> {
    let mut a = matrix.to_vec();
    let frob = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let threshold = 1e-10 * frob.max(1.0);
    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    s += a[i * d + j] * a[i * d + j];
                }
            }
        }
        s.sqrt()
    };
    for _sweep in 0..100 {
        if off(&a) <= threshold {
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                let apq = a[p * d + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * d + q] - a[p * d + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..d {
                    let akp = a[k * d + p];
                    let akq = a[k * d + q];
                    a[k * d + p] = c * akp - s * akq;
                    a[k * d + q] = s * akp + c * akq;
                }
                for k in 0..d {
                    let apk = a[p * d + k];
                    let aqk = a[q * d + k];
                    a[p * d + k] = c * apk - s * aqk;
                    a[q * d + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..d).map(|i| a[i * d + i]).collect()
}

/// Uniform optimum in `B(0, rho)`, required to lie strictly inside `B(0, r)`.
pub fn sample_optimum<R: Rng + ?Sized>(rng: &mut R, d: usize, rho: f64, r: f64) -> Result<Point> {
    if d == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    if !(rho >= 0.0) {
        return Err(invalid(format!("optimum radius must be >= 0, got {rho}")));
    }
    if !(rho < r) {
        return Err(invalid(format!(
            "optimum radius {rho} must be strictly below the domain radius {r}"
        )));
    }
    if rho == 0.0 {
        return Ok(Point::zeros(d));
    }
    Ok(sample_uniform_ball(rng, d, rho, 1)?.remove(0))
}

/// An objective family addressable by name:
/// `sphere`, `rastrigin`, `perturbed_sphere`, `griewank`, `pq:<alpha>:<kappa>:<M>`,
/// each optionally suffixed with `:exp`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveName {
    pub family: ObjectiveFamily,
    pub exp_wrapped: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ObjectiveFamily {
    Suite(SuiteFunction),
    PerturbedQuadratic { alpha: f64, kappa: f64, bound: f64 },
}

impl ObjectiveName {
    /// Instantiates the objective around `optimum`. `rng` is consumed only by
    /// randomized families.
    pub fn build<R: Rng + ?Sized>(&self, optimum: Point, rng: &mut R) -> Result<ObjectiveSpec> {
        let base = match self.family {
            ObjectiveFamily::Suite(f) => ObjectiveSpec::suite(f, optimum),
            ObjectiveFamily::PerturbedQuadratic {
                alpha,
                kappa,
                bound,
            } => make_perturbed_quadratic(rng, optimum.dim(), alpha, kappa, bound)?
                .recentered(optimum)?
                .into_objective(self.family.to_string()),
        };
        Ok(if self.exp_wrapped {
            exp_wrap(&base)
        } else {
            base
        })
    }
}

impl fmt::Display for ObjectiveFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObjectiveFamily::Suite(s) => f.write_str(s.name()),
            ObjectiveFamily::PerturbedQuadratic {
                alpha,
                kappa,
                bound,
            } => {
                write!(f, "pq:{alpha}:{kappa}:{bound}")
            }
        }
    }
}

impl fmt::Display for ObjectiveName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.family)?;
        if self.exp_wrapped {
            f.write_str(":exp")?;
        }
        Ok(())
    }
}

impl FromStr for ObjectiveName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (body, exp_wrapped) = match s.strip_suffix(":exp") {
            Some(body) => (body, true),
            None => (s, false),
        };
        let family = if let Some(params) = body.strip_prefix("pq:") {
            let parts: Vec<&str> = params.split(':').collect();
            let [alpha, kappa, bound] = parts.as_slice() else {
                return Err(invalid(format!(
                    "expected pq:<alpha>:<kappa>:<M>, got '{s}'"
                )));
            };
            let num = |v: &str| {
                v.parse::<f64>()
                    .map_err(|_| invalid(format!("bad number '{v}' in '{s}'")))
            };
            let (alpha, kappa, bound) = (num(alpha)?, num(kappa)?, num(bound)?);
            if !(alpha > 2.0) || !(kappa >= 1.0) || !(bound >= 0.0) {
                return Err(invalid(format!("out-of-range parameters in '{s}'")));
            }
            ObjectiveFamily::PerturbedQuadratic {
                alpha,
                kappa,
                bound,
            }
        } else {
            ObjectiveFamily::Suite(body.parse()?)
        };
        Ok(ObjectiveName {
            family,
            exp_wrapped,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::RngStream;

    fn p(v: &[f64]) -> Point {
        Point::new(v.to_vec()).unwrap()
    }

    #[test]
    fn sphere_values() {
        let xs = p(&[0.3, -0.2]);
        assert_eq!(sphere(&xs, &xs).unwrap(), 0.0);
        assert_eq!(sphere(&p(&[3.0, 4.0]), &p(&[0.0, 0.0])).unwrap(), 25.0);
        assert_eq!(sphere(&p(&[-1.0]), &p(&[1.0])).unwrap(), 4.0);
        assert!(matches!(
            sphere(&p(&[1.0]), &p(&[1.0, 2.0])),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 1
            })
        ));
    }

    #[test]
    fn rastrigin_values() {
        let z = p(&[0.0]);
        assert_eq!(rastrigin(&z, &z).unwrap(), 0.0);
        assert!((rastrigin(&p(&[1.0]), &z).unwrap() - 1.0).abs() < 1e-12);
        assert!((rastrigin(&p(&[0.5]), &z).unwrap() - 2.25).abs() < 1e-12);
        assert!(rastrigin(&z, &p(&[0.0, 0.0])).is_err());
    }

    #[test]
    fn perturbed_sphere_values() {
        let z = p(&[0.0]);
        assert_eq!(perturbed_sphere(&z, &z).unwrap(), 0.0);
        assert_eq!(perturbed_sphere(&p(&[1.0]), &z).unwrap(), 2.0);
        assert_eq!(perturbed_sphere(&p(&[-1.0]), &z).unwrap(), 9.0);
        assert!(perturbed_sphere(&z, &p(&[0.0, 0.0])).is_err());
    }

    #[test]
    fn griewank_values() {
        let z = p(&[0.0]);
        assert_eq!(griewank(&z, &z).unwrap(), 0.0);
        let v = griewank(&p(&[2.0 * PI]), &z).unwrap();
        assert!((v - 0.00987).abs() < 1e-5, "{v}");
        assert!((v - (2.0 * PI).powi(2) / 4000.0).abs() < 1e-14);
        let z2 = p(&[0.0, 0.0]);
        assert_eq!(griewank(&z2, &z2).unwrap(), 0.0);
        assert!(griewank(&z, &z2).is_err());
    }

    #[test]
    fn monotone_wrap_identity_and_exp() {
        let f = ObjectiveSpec::suite(SuiteFunction::Sphere, Point::zeros(2));
        let id = monotone_wrap(&f, |v| v);
        let x = p(&[0.4, -1.3]);
        assert_eq!(id.evaluate(&x).unwrap(), f.evaluate(&x).unwrap());
        let e = exp_wrap(&f);
        assert_eq!(e.name(), "sphere:exp");
        assert!((e.evaluate(&p(&[1.0, 0.0])).unwrap() - std::f64::consts::E).abs() < 1e-12);
        assert_eq!(e.optimum_value(), 1.0);
        assert_eq!(e.optimum(), f.optimum());
    }

    #[test]
    fn monotone_wrap_preserves_order() {
        let mut rng = RngStream::new(1, 0);
        let xs = p(&[0.1, 0.2, -0.3]);
        let f = ObjectiveSpec::suite(SuiteFunction::Rastrigin, xs);
        let g = monotone_wrap(&f, |v| v.powi(3) + 2.0 * v);
        let pts = sample_uniform_ball(&mut rng, 3, 1.0, 500).unwrap();
        let order = |o: &ObjectiveSpec| {
            let mut idx: Vec<usize> = (0..pts.len()).collect();
            idx.sort_by(|&a, &b| o.value(&pts[a]).total_cmp(&o.value(&pts[b])));
            idx
        };
        assert_eq!(order(&f), order(&g));
    }

    #[test]
    fn pq_reduces_to_sphere() {
        let mut rng = RngStream::new(2, 0);
        let pq = make_perturbed_quadratic(&mut rng, 4, 3.0, 1.0, 0.0).unwrap();
        let pts = sample_uniform_ball(&mut rng, 4, 1.0, 200).unwrap();
        for x in &pts {
            assert!((pq.value(x) - x.norm_squared()).abs() < 1e-12);
        }
        assert!((pq.smallest_eigenvalue() - 1.0).abs() < 1e-12);
        assert!((pq.largest_eigenvalue() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pq_h_norm_sandwich_and_optimum() {
        let mut rng = RngStream::new(3, 0);
        for d in [1, 2, 5, 8] {
            let pq = make_perturbed_quadratic(&mut rng, d, 3.0, 50.0, 0.2).unwrap();
            assert_eq!(pq.value(pq.optimum()), 0.0);
            let (e1, ed) = (pq.smallest_eigenvalue(), pq.largest_eigenvalue());
            assert!(e1 >= 1.0 - 1e-9 && ed <= 50.0 + 1e-9);
            let pts = sample_uniform_ball(&mut rng, d, 2.0, 10_000).unwrap();
            for x in &pts {
                let n2 = x.norm_squared();
                let h = pq.h_norm_squared(x);
                assert!(e1 * n2 <= h * (1.0 + 1e-12) && h <= ed * n2 * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn pq_rejects_bad_arguments() {
        let mut rng = RngStream::new(4, 0);
        assert!(make_perturbed_quadratic(&mut rng, 3, 2.0, 2.0, 0.1).is_err());
        assert!(make_perturbed_quadratic(&mut rng, 3, 3.0, 0.5, 0.1).is_err());
        assert!(make_perturbed_quadratic(&mut rng, 3, 3.0, 2.0, -0.1).is_err());
        let pert = CosinePerturbation {
            amplitude: 0.0,
            direction: vec![1.0, 0.0],
        };
        let asym = vec![1.0, 0.5, 0.0, 1.0];
        assert!(PerturbedQuadratic::new(asym, 3.0, Point::zeros(2), pert.clone()).is_err());
        let indefinite = vec![1.0, 2.0, 2.0, 1.0];
        assert!(PerturbedQuadratic::new(indefinite, 3.0, Point::zeros(2), pert).is_err());
    }

    #[test]
    fn jacobi_known_spectrum() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3
        let mut ev = symmetric_eigenvalues(&[2.0, 1.0, 1.0, 2.0], 2);
        ev.sort_by(f64::total_cmp);
        assert!((ev[0] - 1.0).abs() < 1e-12 && (ev[1] - 3.0).abs() < 1e-12);
        // trace and Frobenius norm are preserved
        let mut rng = RngStream::new(5, 0);
        let pq = make_perturbed_quadratic(&mut rng, 6, 3.0, 10.0, 0.0).unwrap();
        let h = pq.hessian();
        let trace: f64 = (0..6).map(|i| h[i * 6 + i]).sum();
        let frob2: f64 = h.iter().map(|v| v * v).sum();
        let ev = pq.eigenvalues();
        assert!((ev.iter().sum::<f64>() - trace).abs() < 1e-9);
        assert!((ev.iter().map(|v| v * v).sum::<f64>() - frob2).abs() < 1e-8);
    }

    #[test]
    fn optimum_sampling() {
        let mut rng = RngStream::new(6, 0);
        assert!(sample_optimum(&mut rng, 3, 0.0, 1.0).unwrap().is_origin());
        for _ in 0..10_000 {
            assert!(sample_optimum(&mut rng, 3, 0.9, 1.0).unwrap().norm() <= 0.9);
        }
        assert!(sample_optimum(&mut rng, 3, 1.0, 1.0).is_err());
        assert!(sample_optimum(&mut rng, 3, -0.1, 1.0).is_err());
        let a = sample_optimum(&mut RngStream::new(7, 1), 4, 0.9, 1.0).unwrap();
        let b = sample_optimum(&mut RngStream::new(7, 1), 4, 0.9, 1.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn names_round_trip() {
        for s in [
            "sphere",
            "rastrigin",
            "perturbed_sphere",
            "griewank",
            "sphere:exp",
            "pq:3:10:0.1",
            "pq:2.5:1:0:exp",
        ] {
            let name: ObjectiveName = s.parse().unwrap();
            assert_eq!(name.to_string(), s);
        }
        for bad in [
            "",
            "ackley",
            "pq:3:10",
            "pq:2:10:0.1",
            "pq:3:0.5:0.1",
            "pq:a:b:c",
        ] {
            assert!(bad.parse::<ObjectiveName>().is_err(), "{bad}");
        }
    }

    #[test]
    fn names_build() {
        let mut rng = RngStream::new(8, 0);
        let xs = p(&[0.1, 0.2]);
        let f = "pq:3:4:0.1"
            .parse::<ObjectiveName>()
            .unwrap()
            .build(xs.clone(), &mut rng)
            .unwrap();
        assert_eq!(f.value(&xs), 0.0);
        assert_eq!(f.name(), "pq:3:4:0.1");
        let g = "griewank:exp"
            .parse::<ObjectiveName>()
            .unwrap()
            .build(xs.clone(), &mut rng)
            .unwrap();
        assert_eq!(g.value(&xs), 1.0);
    }
}
