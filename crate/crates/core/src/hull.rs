//! Interior-of-convex-hull membership.
//!
//! A point `p` lies in the topological interior of `conv(S)`, `S` in `R^d`,
//! iff `S` has full affine rank `d` and `p` admits barycentric weights that
//! are all strictly positive. The second condition is decided by the LP
//!
//! ```text
//! maximize t  s.t.  sum_k w_k s_k = p,  sum_k w_k = 1,  w_k >= t >= 0
//! ```
//!
//! solved by a dense two-phase simplex after translating `p` to the origin
//! and scaling by the bounding-box diameter. The optimum `t*` is scale-free.

use crate::error::{check_dims, invalid, Error, Result};
use crate::point::Point;

/// Default interiority margin (relative to the bounding-box diameter).
pub const DEFAULT_TOL: f64 = 1e-9;

const PIVOT_EPS: f64 = 1e-11;
const FEASIBILITY_EPS: f64 = 1e-9;

/// A membership question: is `query` inside the interior of `conv(generators)`?
#[derive(Debug, Clone)]
pub struct HullQuery<'a> {
    pub query: &'a Point,
    pub generators: &'a [Point],
    pub tol: f64,
}

impl<'a> HullQuery<'a> {
    pub fn new(query: &'a Point, generators: &'a [Point], tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(invalid(format!(
                "hull tolerance must be positive, got {tol}"
            )));
        }
        if generators.is_empty() {
            return Err(invalid("hull query needs at least one generator"));
        }
        for g in generators {
            check_dims(query.dim(), g.dim())?;
        }
        Ok(HullQuery {
            query,
            generators,
            tol,
        })
    }
}

/// Affine rank of a point set: rank of `{x_k - x_0}` by pivoted Gram-Schmidt.
/// Residual norms below `tol` times the first pivot count as zero.
pub fn affine_rank(points: &[Point], tol: f64) -> usize {
    let Some((first, rest)) = points.split_first() else {
        return 0;
    };
    let d = first.dim();
    let mut rows: Vec<Vec<f64>> = rest.iter().map(|x| x.displacement_from(first)).collect();
    let mut rank = 0;
    let mut leading = 0.0;
    while rank < d && !rows.is_empty() {
        let (best, norm) = rows
            .iter()
            .enumerate()
            .map(|(i, r)| (i, r.iter().map(|c| c * c).sum::<f64>().sqrt()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty");
        if rank == 0 {
            leading = norm;
        }
        if norm == 0.0 || norm <= tol * leading {
            break;
        }
        let pivot: Vec<f64> = rows
            .swap_remove(best)
            .into_iter()
            .map(|c| c / norm)
            .collect();
        for r in rows.iter_mut() {
            // project twice against the new direction for stability
            for _ in 0..2 {
                let dot: f64 = r.iter().zip(&pivot).map(|(a, b)| a * b).sum();
                r.iter_mut().zip(&pivot).for_each(|(a, b)| *a -= dot * b);
            }
        }
        rank += 1;
    }
    rank
}

/// Optimum of the max-min barycentric weight LP.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxMinWeight {
    /// `-inf` when `p` is outside the hull.
    pub t_star: f64,
    /// Barycentric weights achieving `t_star`; empty when infeasible.
    pub weights: Vec<f64>,
}

impl MaxMinWeight {
    pub fn is_feasible(&self) -> bool {
        self.t_star.is_finite()
    }

    fn infeasible() -> Self {
        MaxMinWeight {
            t_star: f64::NEG_INFINITY,
            weights: Vec::new(),
        }
    }
}

/// Solves `max t` over barycentric weights `w >= t >= 0` representing `p`.
///
/// Variables are `(t, v_1..v_k)` with `w_k = t + v_k`, giving `k + 1`
/// non-negative variables and `d + 1` equality rows.
pub fn lp_max_min_weight(generators: &[Point], p: &Point) -> Result<MaxMinWeight> {
    let k = generators.len();
    if k == 0 {
        return Err(invalid("LP needs at least one generator"));
    }
    let d = p.dim();
    for g in generators {
        check_dims(d, g.dim())?;
    }
    let scale =
        bounding_diameter(generators.iter().chain(std::iter::once(p))).max(f64::MIN_POSITIVE);

    let m = d + 1;
    let n = k + 1;
    let mut a = vec![0.0; m * n];
    let mut b = vec![0.0; m];
    for (col, g) in generators.iter().enumerate() {
        for i in 0..d {
            let v = (g[i] - p[i]) / scale;
            a[i * n + col + 1] = v;
            a[i * n] += v;
        }
        a[d * n + col + 1] = 1.0;
    }
    a[d * n] = k as f64;
    b[d] = 1.0;
    let mut c = vec![0.0; n];
    c[0] = 1.0;

    let cap = 10 * (k + d) * (k + d);
    match simplex_maximize(&a, &b, &c, m, n, cap.max(50))? {
        None => Ok(MaxMinWeight::infeasible()),
        Some(x) => {
            let t = x[0];
            Ok(MaxMinWeight {
                t_star: t,
                weights: x[1..].iter().map(|v| t + v).collect(),
            })
        }
    }
}

/// `true` iff `query` is in the open interior of `conv(generators)`.
pub fn in_hull_interior(q: &HullQuery<'_>) -> Result<bool> {
    let d = q.query.dim();
    if q.generators.len() <= d {
        return Ok(false);
    }
    if !inside_bounding_box(q.query, q.generators) {
        return Ok(false);
    }
    if affine_rank(q.generators, q.tol) < d {
        return Ok(false);
    }
    let sol = lp_max_min_weight(q.generators, q.query)?;
    Ok(sol.t_star > q.tol)
}

fn inside_bounding_box(p: &Point, generators: &[Point]) -> bool {
    (0..p.dim()).all(|i| {
        let (lo, hi) = generators
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), g| {
                (lo.min(g[i]), hi.max(g[i]))
            });
        p[i] > lo && p[i] < hi
    })
}

fn bounding_diameter<'a>(points: impl Iterator<Item = &'a Point> + Clone) -> f64 {
    let Some(first) = points.clone().next() else {
        return 0.0;
    };
    let d = first.dim();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for x in points {
        for i in 0..d {
            lo[i] = lo[i].min(x[i]);
            hi[i] = hi[i].max(x[i]);
        }
    }
    lo.iter()
        .zip(&hi)
        .map(|(l, h)| (h - l) * (h - l))
        .sum::<f64>()
        .sqrt()
}

/// Dense two-phase simplex for `max c.x, A x = b, x >= 0` with `b >= 0`.
/// `Ok(None)` means infeasible.
fn simplex_maximize(
    a: &[f64],
    b: &[f64],
    c: &[f64],
    m: usize,
    n: usize,
    iteration_cap: usize,
) -> Result<Option<Vec<f64>>> {
    debug_assert!(b.iter().all(|&v| v >= 0.0));
    let mut tab = Tableau::with_artificials(a, b, m, n);

    // phase 1: maximize -sum(artificials)
    let mut phase1 = vec![0.0; n + m];
    phase1[n..].iter_mut().for_each(|v| *v = -1.0);
    tab.set_objective(&phase1);
    let mut iterations = 0;
    tab.optimize(n + m, iteration_cap, &mut iterations)?;
    if -tab.objective_value() > FEASIBILITY_EPS {
        return Ok(None);
    }
    tab.drive_out_artificials(n);

    // phase 2
    let mut phase2 = vec![0.0; n + m];
    phase2[..n].copy_from_slice(c);
    tab.set_objective(&phase2);
    tab.optimize(n, iteration_cap, &mut iterations)?;

    let mut x = vec![0.0; n];
    for (row, &var) in tab.basis.iter().enumerate() {
        if var < n {
            x[var] = tab.rhs(row).max(0.0);
        }
    }
    Ok(Some(x))
}

struct Tableau {
    rows: usize,
    /// structural + artificial columns; the RHS is stored after them
    cols: usize,
    data: Vec<f64>,
    /// reduced costs `c_B B^-1 A_j - c_j` followed by the objective value
    reduced: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn with_artificials(a: &[f64], b: &[f64], m: usize, n: usize) -> Self {
        let cols = n + m;
        let width = cols + 1;
        let mut data = vec![0.0; m * width];
        for i in 0..m {
            data[i * width..i * width + n].copy_from_slice(&a[i * n..(i + 1) * n]);
            data[i * width + n + i] = 1.0;
            data[i * width + cols] = b[i];
        }
        Tableau {
            rows: m,
            cols,
            data,
            reduced: vec![0.0; width],
            basis: (n..n + m).collect(),
        }
    }

    fn width(&self) -> usize {
        self.cols + 1
    }

    fn at(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.width() + col]
    }

    fn rhs(&self, row: usize) -> f64 {
        self.at(row, self.cols)
    }

    fn objective_value(&self) -> f64 {
        self.reduced[self.cols]
    }

    fn set_objective(&mut self, cost: &[f64]) {
        let w = self.width();
        for j in 0..w {
            let mut z = 0.0;
            for (row, &var) in self.basis.iter().enumerate() {
                z += cost[var] * self.data[row * w + j];
            }
            self.reduced[j] = if j < self.cols { z - cost[j] } else { z };
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.width();
        let piv = self.data[row * w + col];
        for j in 0..w {
            self.data[row * w + j] /= piv;
        }
        self.data[row * w + col] = 1.0;
        let pivot_row: Vec<f64> = self.data[row * w..(row + 1) * w].to_vec();
        for i in 0..self.rows {
            if i == row {
                continue;
            }
            let factor = self.data[i * w + col];
            if factor != 0.0 {
                let r = &mut self.data[i * w..(i + 1) * w];
                r.iter_mut()
                    .zip(&pivot_row)
                    .for_each(|(v, p)| *v -= factor * p);
                r[col] = 0.0;
            }
        }
        let factor = self.reduced[col];
        if factor != 0.0 {
            self.reduced
                .iter_mut()
                .zip(&pivot_row)
                .for_each(|(v, p)| *v -= factor * p);
            self.reduced[col] = 0.0;
        }
        self.basis[row] = col;
    }

    /// Runs primal simplex with entering columns restricted to `0..allowed`.
    /// Dantzig pricing, switching to Bland's rule after `m + n` pivots.
    fn optimize(&mut self, allowed: usize, cap: usize, iterations: &mut usize) -> Result<()> {
        let bland_after = *iterations + self.rows + self.cols;
        loop {
            let bland = *iterations >= bland_after;
            let entering = if bland {
                (0..allowed).find(|&j| self.reduced[j] < -PIVOT_EPS)
            } else {
                (0..allowed)
                    .filter(|&j| self.reduced[j] < -PIVOT_EPS)
                    .min_by(|&x, &y| self.reduced[x].total_cmp(&self.reduced[y]))
            };
            let Some(col) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for row in 0..self.rows {
                let coef = self.at(row, col);
                if coef > PIVOT_EPS {
                    let ratio = self.rhs(row).max(0.0) / coef;
                    leave = match leave {
                        Some((r, best))
                            if ratio > best + 1e-14
                                || (ratio >= best - 1e-14 && self.basis[row] >= self.basis[r]) =>
                        {
                            Some((r, best))
                        }
                        _ => Some((row, ratio)),
                    };
                }
            }
            let Some((row, _)) = leave else {
                return Err(Error::NumericalFailure(
                    "simplex: objective unbounded on a bounded problem".into(),
                ));
            };
            self.pivot(row, col);
            *iterations += 1;
            if *iterations > cap {
                return Err(Error::NumericalFailure(format!(
                    "simplex: iteration cap {cap} exceeded"
                )));
            }
        }
    }

    /// Pivots zero-valued artificials out of the basis; rows where that is
    /// impossible are redundant and dropped.
    fn drive_out_artificials(&mut self, structural: usize) {
        let mut row = 0;
        while row < self.rows {
            if self.basis[row] >= structural {
                let col = (0..structural)
                    .filter(|&j| self.at(row, j).abs() > 1e-9)
                    .max_by(|&x, &y| self.at(row, x).abs().total_cmp(&self.at(row, y).abs()));
                match col {
                    Some(col) => self.pivot(row, col),
                    None => {
                        self.remove_row(row);
                        continue;
                    }
                }
            }
            row += 1;
        }
    }

    fn remove_row(&mut self, row: usize) {
        let w = self.width();
        self.data.drain(row * w..(row + 1) * w);
        self.basis.remove(row);
        self.rows -= 1;
    }
}
