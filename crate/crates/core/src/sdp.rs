//! Exact stochastic dynamic programming over a discretized inventory grid.
//!
//! Backward induction computes
//! `G_t(y) = c*y + E[h*(y-d)^+ + b*(d-y)^+] + E[C_{t+1}(y-d)]` and
//! `C_t(x) = min(G_t(x), K + min_{y>=x} G_t(y)) - c*x`. Demand is discretized
//! to multiples of the grid step. The grid is aligned so that the initial
//! inventory is a grid point.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{CostParameters, Instance, PolicyParameters};
use crate::normal::{cdf, quantile};

/// Uniform grid `lower, lower + step, ..., upper`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InventoryGrid {
    lower: f64,
    step: f64,
    points: usize,
}

impl InventoryGrid {
    pub fn new(lower: f64, upper: f64, step: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidArgument(format!("grid step must be positive, got {step}")));
        }
        if !(lower < upper) || !lower.is_finite() || !upper.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "grid needs lower < upper, got [{lower}, {upper}]"
            )));
        }
        let cells = (upper - lower) / step;
        if (cells - cells.round()).abs() > 1e-9 * cells.max(1.0) {
            return Err(Error::InvalidArgument(format!(
                "grid width {} is not a multiple of the step {step}",
                upper - lower
            )));
        }
        Ok(Self {
            lower,
            step,
            points: cells.round() as usize + 1,
        })
    }

    /// Default grid `[min(0, I0) - 4*sum(sd), sum(mean) + 4*sum(sd)]`, widened
    /// by two steps each side and shifted so that `I0` is a grid point.
    pub fn for_instance(instance: &Instance, step: f64) -> Result<Self> {
        let sum_mean: f64 = instance.demands.iter().map(|d| d.mean).sum();
        let sum_sd: f64 = instance.demands.iter().map(|d| d.std_dev).sum();
        let i0 = instance.initial_inventory;
        let lo = i0.min(0.0) - 4.0 * sum_sd;
        let hi = (sum_mean + 4.0 * sum_sd).max(i0);
        Self::around(i0, lo, hi, step)
    }

    /// Smallest grid through `anchor` with two steps of slack beyond `[lo, hi]`.
    pub fn around(anchor: f64, lo: f64, hi: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) {
            return Err(Error::InvalidArgument(format!("grid step must be positive, got {step}")));
        }
        let below = ((anchor - lo) / step).ceil().max(0.0) + 2.0;
        let above = ((hi - anchor) / step).ceil().max(0.0) + 2.0;
        Ok(Self {
            lower: anchor - below * step,
            step,
            points: (below + above) as usize + 1,
        })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.point(self.points - 1)
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points == 0
    }

    pub fn point(&self, i: usize) -> f64 {
        self.lower + i as f64 * self.step
    }

    /// Index of `y`, which must lie on the grid.
    pub fn index_of(&self, y: f64) -> Result<usize> {
        let r = (y - self.lower) / self.step;
        let i = r.round();
        if (r - i).abs() > 1e-6 || i < 0.0 || i as usize >= self.points {
            return Err(Error::OffGrid(y));
        }
        Ok(i as usize)
    }

    fn widened(&self, down: usize, up: usize) -> Self {
        Self {
            lower: self.lower - down as f64 * self.step,
            step: self.step,
            points: self.points + down + up,
        }
    }
}

/// Discretization settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SdpOptions {
    /// Demand mass outside `[q(1-p), q(p)]` is dropped and the rest renormalized.
    pub truncation: f64,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self { truncation: 0.9999 }
    }
}

/// Value tables and the optimal policy.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SdpSolution {
    grid: InventoryGrid,
    costs: CostParameters,
    initial_inventory: f64,
    g: Vec<Vec<f64>>,
    c: Vec<Vec<f64>>,
    policy: PolicyParameters,
    expected_cost: f64,
}

impl SdpSolution {
    pub fn grid(&self) -> &InventoryGrid {
        &self.grid
    }

    pub fn horizon(&self) -> usize {
        self.g.len()
    }

    /// `G_t` over the grid, `t` 1-based.
    pub fn g_table(&self, t: usize) -> &[f64] {
        &self.g[t - 1]
    }

    /// `C_t` over the grid, `t` 1-based.
    pub fn c_table(&self, t: usize) -> &[f64] {
        &self.c[t - 1]
    }

    pub fn policy(&self) -> &PolicyParameters {
        &self.policy
    }

    /// `C_1(I_0)`.
    pub fn expected_cost(&self) -> f64 {
        self.expected_cost
    }

    pub fn initial_inventory(&self) -> f64 {
        self.initial_inventory
    }

    pub fn fixed_cost(&self) -> f64 {
        self.costs.fixed
    }

    /// Writes `t,y,G` rows for every period and grid point.
    pub fn write_g_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = std::io::BufWriter::new(file);
        let mut emit = || -> std::io::Result<()> {
            writeln!(out, "t,y,G")?;
            for (t, row) in self.g.iter().enumerate() {
                for (i, v) in row.iter().enumerate() {
                    writeln!(out, "{},{},{}", t + 1, self.grid.point(i), v)?;
                }
            }
            out.flush()
        };
        emit().map_err(|e| Error::io(path, e))
    }
}

/// Discrete demand: probability of `u * step` for `u = first..first+mass.len()`.
struct DemandCells {
    first: i64,
    mass: Vec<f64>,
}

fn discretize(mean: f64, sd: f64, step: f64, truncation: f64) -> DemandCells {
    if sd <= 0.0 {
        let u = (mean / step).round().max(0.0) as i64;
        return DemandCells {
            first: u,
            mass: vec![1.0],
        };
    }
    let lo = ((mean + sd * quantile(1.0 - truncation)) / step).floor() as i64;
    let hi = ((mean + sd * quantile(truncation)) / step).ceil() as i64;
    let first = lo.max(0);
    let mut mass = vec![0.0; (hi.max(first) - first + 1) as usize];
    for u in lo..=hi {
        let x = u as f64 * step;
        let p = cdf((x + 0.5 * step - mean) / sd) - cdf((x - 0.5 * step - mean) / sd);
        // negative demand is censored at zero
        mass[(u.max(0) - first) as usize] += p;
    }
    let total: f64 = mass.iter().sum();
    mass.iter_mut().for_each(|p| *p /= total);
    DemandCells { first, mass }
}

/// Order-up-to level and reorder point indices of one `G` table.
fn policy_indices(g: &[f64], k: f64) -> Option<(usize, usize)> {
    let mut big_s = 0;
    for (i, v) in g.iter().enumerate() {
        if *v < g[big_s] {
            big_s = i;
        }
    }
    let target = k + g[big_s];
    (0..=big_s).rev().find(|&i| g[i] >= target).map(|s| (s, big_s))
}

/// Solves the recursion on `grid`. Fails when the grid cannot contain the
/// optimal actions: the minimizer of some `G_t` sits on the upper edge or the
/// reorder point lies below the lower edge.
pub fn solve_sdp(instance: &Instance, grid: &InventoryGrid, options: &SdpOptions) -> Result<SdpSolution> {
    instance.check()?;
    if !(options.truncation > 0.99 && options.truncation < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "demand truncation {} outside (0.99, 1)",
            options.truncation
        )));
    }
    let i0 = grid.index_of(instance.initial_inventory)?;
    let CostParameters {
        fixed: k,
        unit: c,
        holding: h,
        penalty: b,
    } = instance.costs;
    let n = grid.len();
    let horizon = instance.horizon();
    let mut g_tables = vec![Vec::new(); horizon];
    let mut c_tables = vec![Vec::new(); horizon];
    let mut levels = vec![(0.0, 0.0); horizon];
    let mut next: Option<(Vec<f64>, f64)> = None;
    for t in (0..horizon).rev() {
        let d = instance.demands[t];
        let cells = discretize(d.mean, d.std_dev, grid.step(), options.truncation);
        let g: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|i| {
                let y = grid.point(i);
                let mut acc = 0.0;
                for (off, p) in cells.mass.iter().enumerate() {
                    let u = cells.first + off as i64;
                    let dem = u as f64 * grid.step();
                    let mut v = h * (y - dem).max(0.0) + b * (dem - y).max(0.0);
                    if let Some((c_next, floor)) = &next {
                        let j = i as i64 - u;
                        v += if j >= 0 {
                            c_next[j as usize]
                        } else {
                            floor - c * (y - dem)
                        };
                    }
                    acc += p * v;
                }
                c * y + acc
            })
            .collect();
        let (s_idx, big_s_idx) = policy_indices(&g, k).ok_or_else(|| Error::GridTooSmall {
            period: t + 1,
            detail: format!("reorder point below the lower bound {}", grid.lower()),
        })?;
        if big_s_idx + 1 == n {
            return Err(Error::GridTooSmall {
                period: t + 1,
                detail: format!("order-up-to level at the upper bound {}", grid.upper()),
            });
        }
        levels[t] = (grid.point(s_idx), grid.point(big_s_idx));
        let mut tail_min = f64::INFINITY;
        let mut cv = vec![0.0; n];
        for i in (0..n).rev() {
            tail_min = tail_min.min(g[i]);
            cv[i] = g[i].min(k + tail_min) - c * grid.point(i);
        }
        // below the grid every state orders up to S_t
        next = Some((cv.clone(), k + g[big_s_idx]));
        g_tables[t] = g;
        c_tables[t] = cv;
    }
    let policy = PolicyParameters::new(
        levels.iter().map(|l| l.0).collect(),
        levels.iter().map(|l| l.1).collect(),
    )?;
    let expected_cost = c_tables[0][i0];
    Ok(SdpSolution {
        grid: *grid,
        costs: instance.costs,
        initial_inventory: instance.initial_inventory,
        g: g_tables,
        c: c_tables,
        policy,
        expected_cost,
    })
}

/// Solves on the default grid for `step`, widening it while the optimal
/// actions fall outside.
pub fn solve_sdp_auto(instance: &Instance, step: f64, options: &SdpOptions) -> Result<SdpSolution> {
    let mut grid = InventoryGrid::for_instance(instance, step)?;
    let mut last = None;
    for _ in 0..6 {
        match solve_sdp(instance, &grid, options) {
            Err(Error::GridTooSmall { period, detail }) => {
                let extra = grid.len();
                grid = if detail.starts_with("reorder") {
                    grid.widened(extra, 0)
                } else {
                    grid.widened(0, extra)
                };
                last = Some(Error::GridTooSmall { period, detail });
            }
            other => return other,
        }
    }
    Err(last.expect("loop ran"))
}

/// `G_t(y)` for a grid point `y`.
pub fn scarf_g(solution: &SdpSolution, t: usize, y: f64) -> Result<f64> {
    if t == 0 || t > solution.horizon() {
        return Err(Error::InvalidArgument(format!(
            "period {t} outside 1..={}",
            solution.horizon()
        )));
    }
    let i = solution.grid.index_of(y)?;
    Ok(solution.g[t - 1][i])
}

/// Optimal `(s_t, S_t)`: `S_t` is the smallest grid minimizer of `G_t` and
/// `s_t` the largest grid point at or below it with `G_t(s_t) >= K + G_t(S_t)`.
/// Ordering happens when the opening inventory is at or below `s_t`.
pub fn extract_policy(solution: &SdpSolution) -> PolicyParameters {
    solution.policy.clone()
}

/// A triple that breaks the discrete K-convexity inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KConvexityViolation {
    /// `y - delta`
    pub left: f64,
    pub y: f64,
    /// `y + Delta`
    pub right: f64,
    /// Amount by which the inequality fails.
    pub excess: f64,
}

/// Checks `K + G(y+D) >= G(y) + D*(G(y) - G(y-d))/d` with `d` one step and
/// every `D` that stays on the grid. Returns the first violation in
/// `(y, D)` order, if any.
pub fn check_k_convexity(g: &[f64], grid: &InventoryGrid, k: f64, tolerance: f64) -> Option<KConvexityViolation> {
    let step = grid.step();
    for i in 1..g.len() {
        let slope = (g[i] - g[i - 1]) / step;
        for j in i + 1..g.len() {
            let delta = (j - i) as f64 * step;
            let excess = g[i] + delta * slope - (k + g[j]);
            if excess > tolerance {
                return Some(KConvexityViolation {
                    left: grid.point(i - 1),
                    y: grid.point(i),
                    right: grid.point(j),
                    excess,
                });
            }
        }
    }
    None
}

/// Grid step for benchmark oracles: the largest of a few round values that
/// resolves the smallest positive standard deviation into at least four steps.
pub fn auto_step(instance: &Instance) -> f64 {
    let min_sd = instance
        .demands
        .iter()
        .map(|d| d.std_dev)
        .filter(|s| *s > 0.0)
        .fold(f64::INFINITY, f64::min);
    [1.0, 0.5, 0.25, 0.2, 0.1, 0.05]
        .into_iter()
        .find(|s| *s <= min_sd / 4.0)
        .unwrap_or(0.05)
}
