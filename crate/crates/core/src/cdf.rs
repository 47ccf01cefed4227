//! Tabulated CDFs and distances between an analytic CDF and samples.

use crate::error::{Error, Result};

/// Slack allowed when checking that a tabulated CDF never decreases.
const MONOTONE_SLACK: f64 = 1e-12;

/// A CDF sampled on an ascending grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfCurve {
    points: Vec<(f64, f64)>,
    support_low: f64,
    support_note: String,
}

impl CdfCurve {
    pub fn new(points: Vec<(f64, f64)>, support_low: f64, support_note: impl Into<String>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Domain("cdf curve needs at least one point".into()));
        }
        for (i, w) in points.windows(2).enumerate() {
            if !(w[1].0 >= w[0].0) {
                return Err(Error::Domain(format!("abscissae not ascending at index {}", i + 1)));
            }
            if w[1].1 < w[0].1 - MONOTONE_SLACK {
                return Err(Error::NonMonotone { index: i + 1 });
            }
        }
        if points.iter().any(|p| !(-MONOTONE_SLACK..=1.0 + MONOTONE_SLACK).contains(&p.1)) {
            return Err(Error::Domain("probabilities must lie in [0, 1]".into()));
        }
        Ok(Self { points, support_low, support_note: support_note.into() })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn support_low(&self) -> f64 {
        self.support_low
    }

    pub fn support_note(&self) -> &str {
        &self.support_note
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Largest pointwise gap to another curve on the same grid.
    pub fn sup_distance(&self, other: &CdfCurve) -> Result<f64> {
        if self.points.len() != other.points.len() {
            return Err(Error::Domain("curves are tabulated on different grids".into()));
        }
        Ok(self
            .points
            .iter()
            .zip(&other.points)
            .map(|(a, b)| (a.1 - b.1).abs())
            .fold(0.0, f64::max))
    }

    /// Smallest abscissa with `F >= p`, interpolating linearly between grid points.
    pub fn quantile(&self, p: f64) -> Option<f64> {
        let idx = self.points.iter().position(|pt| pt.1 >= p)?;
        if idx == 0 {
            return Some(self.points[0].0);
        }
        let (x0, p0) = self.points[idx - 1];
        let (x1, p1) = self.points[idx];
        if p1 - p0 <= 0.0 {
            return Some(x1);
        }
        Some(x0 + (p - p0) / (p1 - p0) * (x1 - x0))
    }
}

/// Evaluates `evaluator` on an ascending grid; a decrease is an error, never clamped.
pub fn tabulate_cdf<F>(evaluator: F, s_grid: &[f64], support_low: f64, note: &str) -> Result<CdfCurve>
where
    F: Fn(f64) -> Result<f64>,
{
    if s_grid.is_empty() {
        return Err(Error::Domain("empty evaluation grid".into()));
    }
    if s_grid.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::Domain("evaluation grid must be sorted ascending".into()));
    }
    let points = s_grid
        .iter()
        .map(|&s| evaluator(s).map(|p| (s, p)))
        .collect::<Result<Vec<_>>>()?;
    CdfCurve::new(points, support_low, note)
}

/// `n` geometrically spaced points from `lo` to `hi` inclusive.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::Domain(format!("geometric grid needs 0 < lo < hi, got {lo}..{hi}")));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    if n == 0 {
        return Err(Error::Domain("grid needs at least one point".into()));
    }
    let ratio = (hi / lo).ln() / (n - 1) as f64;
    let mut grid: Vec<f64> = (0..n).map(|k| lo * (ratio * k as f64).exp()).collect();
    grid[n - 1] = hi;
    Ok(grid)
}

/// Default grid for the benchmark: from just above `a` to `max(10 M, 50 a)`, with `M`
/// and its left neighbour inserted so the unlocalizable atom is resolved.
pub fn default_s_grid(a: f64, m: Option<f64>, n: usize) -> Result<Vec<f64>> {
    let hi = m.map_or(50.0 * a, |m| (10.0 * m).max(50.0 * a));
    let mut grid = geometric_grid(a * (1.0 + 1e-6), hi, n)?;
    if let Some(m) = m {
        grid.push(m);
        grid.push(m.next_down());
        grid.sort_by(f64::total_cmp);
        grid.dedup();
    }
    Ok(grid)
}

/// Kolmogorov distance between sorted samples and a CDF, checked on both sides of every
/// sample. `cdf_left(x)` must return the left limit `F(x-)`; pass `cdf` itself when `F`
/// is continuous.
pub fn ks_distance<F, G>(sorted: &[f64], cdf: F, cdf_left: G) -> f64
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let n = sorted.len() as f64;
    let mut sup: f64 = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let x = sorted[i];
        let mut j = i;
        while j < sorted.len() && sorted[j] == x {
            j += 1;
        }
        let below = i as f64 / n;
        let at = j as f64 / n;
        sup = sup.max((at - cdf(x)).abs()).max((below - cdf_left(x)).abs());
        i = j;
    }
    sup
}
