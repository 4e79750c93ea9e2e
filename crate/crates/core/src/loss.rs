//! First-order loss functions of normal random variables and their
//! piecewise-linear approximations.
//!
//! A [`Partition`] splits the standard normal support into cells. Replacing
//! the variable by its cell-conditional means gives a piecewise-linear lower
//! bound of the complementary loss (Jensen); adding the maximal gap `e_W`
//! gives an upper bound. [`PiecewiseLoss`] rescales both to `N(mean, sd)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normal::{cdf, pdf, quantile};

/// Expected shortfall `E[max(w - x, 0)]` for `w ~ N(mean, std_dev)`.
pub fn loss(x: f64, mean: f64, std_dev: f64) -> f64 {
    if std_dev <= 0.0 {
        return (mean - x).max(0.0);
    }
    let z = (x - mean) / std_dev;
    std_dev * (pdf(z) - z * cdf(-z))
}

/// Expected overage `E[max(x - w, 0)]` for `w ~ N(mean, std_dev)`.
pub fn complementary_loss(x: f64, mean: f64, std_dev: f64) -> f64 {
    if std_dev <= 0.0 {
        return (x - mean).max(0.0);
    }
    let z = (x - mean) / std_dev;
    std_dev * (pdf(z) + z * cdf(z))
}

/// How cell boundaries are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PartitionStrategy {
    /// Every cell carries probability `1/N`.
    EqualProbability,
    /// Boundaries equalize the per-cell Jensen gap, which minimizes `e_W`.
    #[default]
    Minimax,
}

impl std::str::FromStr for PartitionStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "equal-probability" | "equal" => Ok(Self::EqualProbability),
            "minimax" => Ok(Self::Minimax),
            other => Err(Error::InvalidArgument(format!(
                "unknown partition strategy `{other}`"
            ))),
        }
    }
}

/// Partition of the standard normal support into consecutive cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    boundaries: Vec<f64>,
    probabilities: Vec<f64>,
    conditional_means: Vec<f64>,
}

fn cell_probability(a: f64, b: f64) -> f64 {
    // use the upper tail when the cell sits right of zero to keep precision
    if a >= 0.0 {
        cdf(-a) - cdf(-b)
    } else {
        cdf(b) - cdf(a)
    }
}

fn conditional_mean(a: f64, b: f64) -> f64 {
    (pdf(a) - pdf(b)) / cell_probability(a, b)
}

/// Jensen gap of the cell `(a, b)` at its own conditional mean:
/// `int_a^E (E - z) phi(z) dz`.
fn cell_error(a: f64, b: f64) -> f64 {
    let e = conditional_mean(a, b);
    let mass = if a == f64::NEG_INFINITY {
        cdf(e)
    } else {
        cell_probability(a, e)
    };
    e * mass + pdf(e) - pdf(a)
}

impl Partition {
    /// Builds a partition from the interior cell boundaries (strictly increasing).
    pub fn from_boundaries(interior: &[f64]) -> Result<Self> {
        if interior.windows(2).any(|w| w[0] >= w[1]) || interior.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidArgument(
                "partition boundaries must be finite and strictly increasing".into(),
            ));
        }
        let mut edges = Vec::with_capacity(interior.len() + 2);
        edges.push(f64::NEG_INFINITY);
        edges.extend_from_slice(interior);
        edges.push(f64::INFINITY);
        let probabilities: Vec<f64> = edges
            .windows(2)
            .map(|w| cell_probability(w[0], w[1]))
            .collect();
        let conditional_means = edges
            .windows(2)
            .map(|w| conditional_mean(w[0], w[1]))
            .collect();
        Ok(Self {
            boundaries: interior.to_vec(),
            probabilities,
            conditional_means,
        })
    }

    pub fn cells(&self) -> usize {
        self.probabilities.len()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn conditional_means(&self) -> &[f64] {
        &self.conditional_means
    }

    /// Interior boundaries between consecutive cells.
    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    /// Per-cell Jensen gaps; their maximum is `e_W`.
    pub fn cell_errors(&self) -> Vec<f64> {
        let mut edges = vec![f64::NEG_INFINITY];
        edges.extend_from_slice(&self.boundaries);
        edges.push(f64::INFINITY);
        edges.windows(2).map(|w| cell_error(w[0], w[1])).collect()
    }

    /// Jensen lower bound of the standard complementary loss at `z`.
    pub fn jensen(&self, z: f64) -> f64 {
        self.probabilities
            .iter()
            .zip(&self.conditional_means)
            .map(|(p, e)| p * (z - e).max(0.0))
            .sum()
    }
}

/// Builds a partition of the standard normal into `cells` cells.
pub fn make_partition(cells: usize, strategy: PartitionStrategy) -> Result<Partition> {
    if cells < 2 {
        return Err(Error::InvalidArgument(format!(
            "a partition needs at least 2 cells, got {cells}"
        )));
    }
    let interior = match strategy {
        PartitionStrategy::EqualProbability => (1..cells)
            .map(|i| quantile(i as f64 / cells as f64))
            .collect::<Vec<_>>(),
        PartitionStrategy::Minimax => minimax_boundaries(cells),
    };
    Partition::from_boundaries(&interior)
}

/// Right edge `b > a` at which the cell `(a, b)` reaches gap `eps`, if any.
fn edge_for_error(a: f64, eps: f64) -> Option<f64> {
    const FAR: f64 = 12.0;
    let start = if a.is_finite() { a } else { -FAR };
    let mut lo = start;
    let mut hi = start + 0.25;
    while cell_error(a, hi) < eps {
        lo = hi;
        hi += 0.5;
        if hi > FAR {
            return None;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if cell_error(a, mid) < eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Sweeps left to right with every cell gap equal to `eps`.
fn sweep(cells: usize, eps: f64) -> Option<Vec<f64>> {
    let mut a = f64::NEG_INFINITY;
    let mut out = Vec::with_capacity(cells - 1);
    for _ in 0..cells - 1 {
        let b = edge_for_error(a, eps)?;
        out.push(b);
        a = b;
    }
    Some(out)
}

fn minimax_boundaries(cells: usize) -> Vec<f64> {
    // Too large an eps leaves nothing for the last cell; too small leaves it too wide.
    let (mut lo, mut hi) = (1e-14, 0.4);
    let mut best = None;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        match sweep(cells, mid) {
            None => hi = mid,
            Some(b) => {
                if cell_error(*b.last().unwrap(), f64::INFINITY) > mid {
                    lo = mid;
                } else {
                    hi = mid;
                    best = Some(b);
                }
            }
        }
    }
    let b = best.or_else(|| sweep(cells, lo)).expect("bisection brackets a sweep");
    // the optimum is symmetric; average out the bisection residue
    let n = b.len();
    (0..n).map(|i| 0.5 * (b[i] - b[n - 1 - i])).collect()
}

/// Maximal gap between the standard complementary loss and its Jensen bound.
///
/// The gap is convex between conditional means and monotone outside them,
/// so the maximum is attained at a conditional mean, where it equals that
/// cell's own gap.
pub fn approximation_error(partition: &Partition) -> f64 {
    partition
        .cell_errors()
        .into_iter()
        .fold(0.0_f64, f64::max)
}

/// Value at zero of the upper approximation of a symmetric partition,
/// computed from the central cells as a closed form.
pub fn closed_form_anchor(partition: &Partition) -> f64 {
    let n = partition.cells();
    let pe: Vec<f64> = partition
        .probabilities
        .iter()
        .zip(&partition.conditional_means)
        .map(|(p, e)| p * e)
        .collect();
    let head = |m: usize| pe[..m].iter().sum::<f64>();
    let e_w = approximation_error(partition);
    if n % 2 == 0 {
        -head(n / 2) + e_w
    } else {
        -0.5 * (head((n - 1) / 2) + head((n + 1) / 2)) + e_w
    }
}

/// Piecewise-linear approximation of the complementary loss of `N(mean, sd)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLoss {
    mean: f64,
    std_dev: f64,
    probabilities: Vec<f64>,
    breakpoints: Vec<f64>,
    slopes: Vec<f64>,
    error_bound: f64,
}

impl PiecewiseLoss {
    pub fn new(partition: &Partition, mean: f64, std_dev: f64) -> Self {
        // a degenerate variable keeps the piece count but collapses every
        // breakpoint onto the mean, which makes the approximation exact
        let std_dev = std_dev.max(0.0);
        let breakpoints = partition
            .conditional_means
            .iter()
            .map(|e| mean + std_dev * e)
            .collect();
        let mut slopes = Vec::with_capacity(partition.cells() + 1);
        let mut acc = 0.0;
        slopes.push(0.0);
        for p in &partition.probabilities[..partition.cells() - 1] {
            acc += p;
            slopes.push(acc);
        }
        slopes.push(1.0);
        Self {
            mean,
            std_dev,
            probabilities: partition.probabilities.clone(),
            breakpoints,
            slopes,
            error_bound: std_dev * approximation_error(partition),
        }
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn std_dev(&self) -> f64 {
        self.std_dev
    }

    /// Slopes of the linear pieces, `0 = l_1 < ... < l_last = 1`.
    /// Breakpoints coincide when the standard deviation is zero.
    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// Error shift `sd * e_W` separating the lower and upper bounds.
    pub fn error_bound(&self) -> f64 {
        self.error_bound
    }

    /// Jensen lower bound of the complementary loss at `x`.
    pub fn lower(&self, x: f64) -> f64 {
        self.probabilities
            .iter()
            .zip(&self.breakpoints)
            .map(|(p, b)| p * (x - b).max(0.0))
            .sum()
    }

    /// Upper bound: Jensen value plus the error shift.
    pub fn upper(&self, x: f64) -> f64 {
        self.lower(x) + self.error_bound
    }

    /// Value of the upper approximation at `x = 0`.
    pub fn anchor_value(&self) -> f64 {
        self.upper(0.0)
    }

    /// Upper approximation of the first-order loss, `upper(x) - (x - mean)`.
    pub fn penalty_upper(&self, x: f64) -> f64 {
        self.upper(x) - (x - self.mean)
    }

    /// Slopes of the shortfall side, rising from -1 to 0.
    pub fn penalty_slopes(&self) -> Vec<f64> {
        self.slopes.iter().map(|l| l - 1.0).collect()
    }

    /// Supporting lines `(slope, intercept)` of the upper approximation; the
    /// function is their pointwise maximum.
    pub fn lines(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.slopes.len());
        let mut intercept = self.error_bound;
        out.push((0.0, intercept));
        for (i, (p, b)) in self.probabilities.iter().zip(&self.breakpoints).enumerate() {
            intercept -= p * b;
            out.push((self.slopes[i + 1], intercept));
        }
        out
    }
}
