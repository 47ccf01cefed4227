//! Monte Carlo ground truth.
//!
//! Each network realization drops a Poisson number of anchors uniformly in a
//! disk around a target at the origin, assigns bands, load and log-normal
//! shadowing per link, and computes every anchor's SIR against the full sum of
//! active same-band interferers. Anchors clearing `β/γ` are hearable; the `N`
//! strongest participate and the exact benchmark is computed from their
//! directions.
//!
//! Every realization (and every chunk of conditional draws) owns a ChaCha
//! stream selected by its index, so results do not depend on how rayon splits
//! the work.

use std::f64::consts::{LN_10, PI, TAU};
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use rayon::prelude::*;

use crate::analytic::MAX_SUPPORTED_ANCHORS;
use crate::cdf::CdfCurve;
use crate::error::{Error, Result};
use crate::geometry::{
    benchmark_from_d, compute_d_internodal, compute_s_from_angles, internodal_from_angles,
    sample_uniform_angles_with, AnchorAngles,
};
use crate::localizability::{pmf_with_reuse, NetworkParams};

/// Default expected number of anchors dropped per realization.
pub const DEFAULT_MEAN_ANCHORS: f64 = 1000.0;
/// Hearable anchors beyond this fraction of the disk radius flag a realization.
const EDGE_RING: f64 = 0.98;
/// Abort when more than this fraction of realizations is flagged.
const EDGE_ABORT_FRACTION: f64 = 0.005;
/// Draws per RNG stream in the conditional and gap samplers.
const CHUNK: usize = 4096;

/// Network Monte Carlo configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub network: NetworkParams,
    pub sigma_r: f64,
    /// Most anchors tasked per fix.
    pub n_max: usize,
    /// Placeholder error for fewer than three hearable anchors.
    pub m: f64,
    pub n_realizations: usize,
    pub mean_anchors: f64,
    pub seed: u64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        self.network.validate()?;
        if self.n_realizations == 0 {
            return Err(Error::Config("need at least one realization".into()));
        }
        if !(self.sigma_r > 0.0) || !(self.m > 0.0) {
            return Err(Error::Config("sigma_r and M must be positive".into()));
        }
        if self.n_max < 3 || self.n_max > MAX_SUPPORTED_ANCHORS {
            return Err(Error::Config(format!("N must lie in 3..={MAX_SUPPORTED_ANCHORS}")));
        }
        if !(self.mean_anchors >= 1.0) {
            return Err(Error::Config("mean anchor count must be at least 1".into()));
        }
        if self.network.q > 0.0 {
            let expected = pmf_with_reuse(&self.network, self.n_max + 25)?.mean_lower_bound();
            if self.mean_anchors < 10.0 * expected {
                return Err(Error::Config(format!(
                    "disk too small: {} anchors per realization for {expected:.2} expected hearable",
                    self.mean_anchors
                )));
            }
        }
        Ok(())
    }

    /// Radius of the disk holding `mean_anchors` anchors on average at the raw density.
    pub fn disk_radius(&self) -> f64 {
        (self.mean_anchors / (self.network.lambda * PI)).sqrt()
    }
}

/// What one positioning scenario produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RealizationOutcome {
    pub l_heard: usize,
    /// Benchmark in meters; `M` when fewer than three anchors are heard, infinite for a
    /// singular participant geometry.
    pub s_value: f64,
    /// Directions of the participating anchors (at most `N`).
    pub selected_angles: Vec<f64>,
    pub edge_flagged: bool,
    pub degenerate: bool,
}

/// Empirical distribution of the benchmark plus the anchor-count histogram.
#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    sorted_samples: Vec<f64>,
    per_realization: Vec<(usize, f64)>,
    l_histogram: Vec<u64>,
    pub seed: u64,
    pub n: usize,
    pub degenerate: usize,
    pub edge_flagged: usize,
}

impl McEstimate {
    fn from_outcomes(outcomes: Vec<(usize, f64)>, seed: u64, degenerate: usize, edge_flagged: usize) -> Self {
        let max_l = outcomes.iter().map(|o| o.0).max().unwrap_or(0);
        let mut l_histogram = vec![0u64; max_l + 1];
        for (l, _) in &outcomes {
            l_histogram[*l] += 1;
        }
        let mut sorted_samples: Vec<f64> = outcomes.iter().map(|o| o.1).collect();
        sorted_samples.sort_by(f64::total_cmp);
        Self {
            n: outcomes.len(),
            sorted_samples,
            per_realization: outcomes,
            l_histogram,
            seed,
            degenerate,
            edge_flagged,
        }
    }

    pub fn sorted_samples(&self) -> &[f64] {
        &self.sorted_samples
    }

    /// `(l_heard, s)` in realization order.
    pub fn per_realization(&self) -> &[(usize, f64)] {
        &self.per_realization
    }

    pub fn l_histogram(&self) -> &[u64] {
        &self.l_histogram
    }

    /// Empirical `P[L = ell]`.
    pub fn l_frequency(&self, ell: usize) -> f64 {
        self.l_histogram.get(ell).copied().unwrap_or(0) as f64 / self.n as f64
    }

    /// Fraction of realizations with at least three hearable anchors.
    pub fn localizable_fraction(&self) -> f64 {
        self.l_histogram.iter().skip(3).sum::<u64>() as f64 / self.n as f64
    }

    /// Fraction of samples exactly equal to `m`.
    pub fn atom_at(&self, m: f64) -> f64 {
        let lo = self.sorted_samples.partition_point(|&x| x < m);
        let hi = self.sorted_samples.partition_point(|&x| x <= m);
        (hi - lo) as f64 / self.n as f64
    }

    /// Empirical CDF at `x` (right-continuous).
    pub fn cdf_at(&self, x: f64) -> f64 {
        self.sorted_samples.partition_point(|&v| v <= x) as f64 / self.n as f64
    }

    /// Writes `realization,l_heard,s_meters`.
    pub fn write_samples_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "realization,l_heard,s_meters")?;
        for (i, (l, s)) in self.per_realization.iter().enumerate() {
            writeln!(out, "{i},{l},{s}")?;
        }
        Ok(())
    }

    /// Writes `ell,count`.
    pub fn write_histogram_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "ell,count")?;
        for (ell, c) in self.l_histogram.iter().enumerate() {
            writeln!(out, "{ell},{c}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy)]
struct Anchor {
    r2: f64,
    power: f64,
    band: usize,
    active: bool,
}

/// Simulates realization `index` of `cfg`.
pub fn simulate_realization(cfg: &SimConfig, index: u64) -> Result<RealizationOutcome> {
    let np = &cfg.network;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index);

    let radius = cfg.disk_radius();
    let r2_max = radius * radius;
    let sigma_ln = np.shadow_sigma_db * LN_10 / 10.0;
    let half_alpha = 0.5 * np.alpha;
    let bands = np.reuse as usize;

    let count_dist = Poisson::new(cfg.mean_anchors).map_err(|e| Error::Config(e.to_string()))?;
    let count = count_dist.sample(&mut rng) as usize;

    let mut anchors = Vec::with_capacity(count);
    let mut band_total = vec![0.0; bands];
    let mut band_active = vec![0usize; bands];
    for _ in 0..count {
        // (0, 1] keeps the log finite
        let u = 1.0 - rng.random::<f64>();
        let r2 = r2_max * u;
        let band = if bands == 1 { 0 } else { rng.random_range(0..bands) };
        let active = rng.random::<f64>() < np.q;
        let z: f64 = StandardNormal.sample(&mut rng);
        let power = (-half_alpha * r2.ln() + sigma_ln * z).exp();
        if active {
            band_total[band] += power;
            band_active[band] += 1;
        }
        anchors.push(Anchor { r2, power, band, active });
    }

    let threshold = np.beta / np.gamma;
    let mut heard: Vec<(f64, f64)> = Vec::new();
    let mut edge_flagged = false;
    let edge_r2 = EDGE_RING * EDGE_RING * r2_max;
    for a in &anchors {
        let interference = if a.active {
            if band_active[a.band] == 1 {
                0.0
            } else {
                band_total[a.band] - a.power
            }
        } else {
            band_total[a.band]
        };
        let sir = if interference > 0.0 { a.power / interference } else { f64::INFINITY };
        if sir >= threshold {
            heard.push((sir, a.r2));
            if a.r2 >= edge_r2 {
                edge_flagged = true;
            }
        }
    }

    let l_heard = heard.len();
    heard.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.total_cmp(&y.1)));
    heard.truncate(cfg.n_max);
    // directions are independent of distance, shadowing, band and load
    let selected_angles: Vec<f64> = heard.iter().map(|_| rng.random::<f64>() * TAU).collect();

    let (s_value, degenerate) = if l_heard >= 3 {
        match compute_s_from_angles(&AnchorAngles::new(selected_angles.iter().copied())?, cfg.sigma_r) {
            Ok(b) => (b.s, false),
            Err(Error::SingularGeometry { .. }) => (f64::INFINITY, true),
            Err(e) => return Err(e),
        }
    } else {
        (cfg.m, false)
    };

    Ok(RealizationOutcome { l_heard, s_value, selected_angles, edge_flagged, degenerate })
}

/// Runs `cfg.n_realizations` independent network realizations.
pub fn run_network_mc(cfg: &SimConfig) -> Result<McEstimate> {
    cfg.validate()?;
    let outcomes = (0..cfg.n_realizations as u64)
        .into_par_iter()
        .map(|i| simulate_realization(cfg, i))
        .collect::<Result<Vec<_>>>()?;
    let edge = outcomes.iter().filter(|o| o.edge_flagged).count();
    let degenerate = outcomes.iter().filter(|o| o.degenerate).count();
    let fraction = edge as f64 / outcomes.len() as f64;
    if edge > 0 {
        log::info!("{edge} realizations had a hearable anchor near the disk edge");
    }
    // with no load every in-disk anchor is heard, so the disk edge is expected to be reached
    if cfg.network.q > 0.0 && fraction > EDGE_ABORT_FRACTION {
        return Err(Error::EdgeEffect { fraction });
    }
    if degenerate > 0 {
        log::warn!("{degenerate} realizations had singular participant geometry");
    }
    Ok(McEstimate::from_outcomes(
        outcomes.into_iter().map(|o| (o.l_heard, o.s_value)).collect(),
        cfg.seed,
        degenerate,
        edge,
    ))
}

fn chunked<T, F>(n: usize, seed: u64, per_draw: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> T + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = CHUNK.min(n - c * CHUNK);
            (0..len).map(|_| per_draw(&mut rng)).collect::<Vec<T>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// `n` draws of the exact benchmark for `l` uniformly placed anchors, via the gap form.
pub fn run_conditional_mc(l: usize, sigma_r: f64, n: usize, seed: u64) -> Result<McEstimate> {
    if l < 3 {
        return Err(Error::Domain(format!("conditional sampling needs L >= 3, got {l}")));
    }
    if n == 0 || !(sigma_r > 0.0) {
        return Err(Error::Domain("need n >= 1 and positive sigma_r".into()));
    }
    let draws = chunked(n, seed, |rng| -> Result<f64> {
        let angles = sample_uniform_angles_with(l, rng)?;
        let d = compute_d_internodal(&internodal_from_angles(&angles))?;
        match benchmark_from_d(d, l, sigma_r) {
            Ok(b) => Ok(b.s),
            Err(Error::SingularGeometry { .. }) => Ok(f64::INFINITY),
            Err(e) => Err(e),
        }
    });
    let samples = draws.into_iter().collect::<Result<Vec<_>>>()?;
    let degenerate = samples.iter().filter(|s| s.is_infinite()).count();
    Ok(McEstimate::from_outcomes(samples.into_iter().map(|s| (l, s)).collect(), seed, degenerate, 0))
}

/// Joint samples of `D`, the three largest `sin^2` gap terms and the second largest gap.
#[derive(Debug, Clone, PartialEq)]
pub struct GapSamples {
    pub l: usize,
    pub d: Vec<f64>,
    /// `sin^2` of the largest gap.
    pub w_largest: Vec<f64>,
    /// `sin^2` of the second largest gap.
    pub w_second: Vec<f64>,
    /// `sin^2` of the third largest gap.
    pub w_third: Vec<f64>,
    /// The second largest gap itself.
    pub angle_second: Vec<f64>,
    pub seed: u64,
}

impl GapSamples {
    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }
}

/// `n` joint draws of `D` and the order-statistic terms for `l` uniform anchors.
pub fn run_d_mc(l: usize, n: usize, seed: u64) -> Result<GapSamples> {
    if l < 3 {
        return Err(Error::Domain(format!("gap sampling needs L >= 3, got {l}")));
    }
    let draws = chunked(n, seed, |rng| -> Result<[f64; 5]> {
        let gaps = internodal_from_angles(&sample_uniform_angles_with(l, rng)?);
        let d = compute_d_internodal(&gaps)?;
        let s = gaps.sorted();
        let sin2 = |x: f64| x.sin().powi(2);
        Ok([d, sin2(s[l - 1]), sin2(s[l - 2]), sin2(s[l - 3]), s[l - 2]])
    });
    let mut out = GapSamples {
        l,
        d: Vec::with_capacity(n),
        w_largest: Vec::with_capacity(n),
        w_second: Vec::with_capacity(n),
        w_third: Vec::with_capacity(n),
        angle_second: Vec::with_capacity(n),
        seed,
    };
    for row in draws {
        let [d, w1, w2, w3, a2] = row?;
        out.d.push(d);
        out.w_largest.push(w1);
        out.w_second.push(w2);
        out.w_third.push(w3);
        out.angle_second.push(a2);
    }
    Ok(out)
}

/// Right-continuous empirical CDF of `est` on `s_grid`.
pub fn empirical_cdf(est: &McEstimate, s_grid: &[f64]) -> Result<CdfCurve> {
    if s_grid.is_empty() {
        return Err(Error::Domain("empty evaluation grid".into()));
    }
    let points = s_grid.iter().map(|&s| (s, est.cdf_at(s))).collect();
    let low = est.sorted_samples.first().copied().unwrap_or(0.0);
    CdfCurve::new(points, low, "empirical")
}
