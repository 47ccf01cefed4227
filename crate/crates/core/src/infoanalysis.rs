//! Plug-in histogram estimates of differential entropy and mutual information
//! between the benchmark denominator `D` and single gap terms.
//!
//! Used to pick which order statistic of the gaps carries the most information
//! about `D`. Estimates are binned, not bias corrected, so only orderings and
//! stability are meaningful.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::d_max;
use crate::simulator::{run_d_mc, GapSamples};

/// Default bin width as a fraction of each axis' support.
pub const DEFAULT_BIN_WIDTH: f64 = 0.01;
/// Sample count below which estimates are flagged as unreliable.
pub const MIN_RELIABLE_SAMPLES: usize = 100_000;
/// Negative MI within this margin is treated as estimator noise.
const NEGATIVE_SLACK: f64 = 0.01;
const SHARD: usize = 1 << 16;

/// Bin layout for a `(D, W)` pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Binning {
    pub d_max: f64,
    pub w_max: f64,
    pub d_bins: usize,
    pub w_bins: usize,
}

impl Binning {
    /// `d` over `[0, d_max]` and `w` over `[0, w_max]`, each split into bins of
    /// `bin_width` times its support.
    pub fn new(d_max: f64, w_max: f64, bin_width: f64) -> Result<Self> {
        if !(bin_width > 0.0 && bin_width <= 1.0) {
            return Err(Error::Domain(format!("bin width {bin_width} outside (0, 1]")));
        }
        if !(d_max > 0.0 && w_max > 0.0 && d_max.is_finite() && w_max.is_finite()) {
            return Err(Error::Domain("supports must be positive and finite".into()));
        }
        let bins = (1.0 / bin_width - 1e-9).ceil() as usize;
        Ok(Self { d_max, w_max, d_bins: bins, w_bins: bins })
    }

    /// `D` over `[0, L²/4]` and a `sin²` term over `[0, 1]`.
    pub fn for_order_stats(l: usize, bin_width: f64) -> Result<Self> {
        if l < 2 {
            return Err(Error::Domain(format!("need L >= 2, got {l}")));
        }
        Self::new(d_max(l)?, 1.0, bin_width)
    }

    pub fn d_width(&self) -> f64 {
        self.d_max / self.d_bins as f64
    }

    pub fn w_width(&self) -> f64 {
        self.w_max / self.w_bins as f64
    }

    fn index(x: f64, max: f64, bins: usize) -> Result<usize> {
        // small overshoot from rounding in the sample itself is tolerated
        if !(x >= 0.0 && x <= max * (1.0 + 1e-9)) {
            return Err(Error::Domain(format!("sample {x} outside [0, {max}]")));
        }
        Ok(((x / max * bins as f64) as usize).min(bins - 1))
    }
}

/// Joint histogram of `(D, W)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hist2D {
    binning: Binning,
    counts: Vec<u64>,
    n_samples: u64,
}

impl Hist2D {
    pub fn empty(binning: Binning) -> Self {
        Self { binning, counts: vec![0; binning.d_bins * binning.w_bins], n_samples: 0 }
    }

    pub fn insert(&mut self, d: f64, w: f64) -> Result<()> {
        let b = &self.binning;
        let i = Binning::index(d, b.d_max, b.d_bins)?;
        let j = Binning::index(w, b.w_max, b.w_bins)?;
        self.counts[j * b.d_bins + i] += 1;
        self.n_samples += 1;
        Ok(())
    }

    /// Fills a histogram in parallel shards.
    pub fn from_samples(binning: Binning, d: &[f64], w: &[f64]) -> Result<Self> {
        if d.len() != w.len() {
            return Err(Error::Domain("D and W sample counts differ".into()));
        }
        let shards = d
            .par_chunks(SHARD)
            .zip(w.par_chunks(SHARD))
            .map(|(ds, ws)| {
                let mut h = Hist2D::empty(binning);
                for (&x, &y) in ds.iter().zip(ws) {
                    h.insert(x, y)?;
                }
                Ok(h)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut total = Hist2D::empty(binning);
        for s in shards {
            total.n_samples += s.n_samples;
            for (a, b) in total.counts.iter_mut().zip(s.counts) {
                *a += b;
            }
        }
        Ok(total)
    }

    pub fn binning(&self) -> &Binning {
        &self.binning
    }

    pub fn n_samples(&self) -> u64 {
        self.n_samples
    }

    pub fn count(&self, d_bin: usize, w_bin: usize) -> u64 {
        self.counts[w_bin * self.binning.d_bins + d_bin]
    }

    /// Counts along `D` summed over `W`.
    pub fn d_marginal(&self) -> Vec<u64> {
        let mut m = vec![0; self.binning.d_bins];
        for row in self.counts.chunks(self.binning.d_bins) {
            for (a, c) in m.iter_mut().zip(row) {
                *a += c;
            }
        }
        m
    }

    /// Counts along `W` summed over `D`.
    pub fn w_marginal(&self) -> Vec<u64> {
        self.counts.chunks(self.binning.d_bins).map(|row| row.iter().sum()).collect()
    }

    /// `Σ p_k log2(Δ_D / p_k)` over the `D` marginal.
    pub fn entropy_d(&self) -> f64 {
        let n = self.n_samples as f64;
        let delta = self.binning.d_width();
        self.d_marginal()
            .into_iter()
            .filter(|&c| c > 0)
            .map(|c| {
                let p = c as f64 / n;
                p * (delta / p).log2()
            })
            .sum()
    }

    /// `Σ p_jk log2(p_j Δ_D / p_jk)` with `p_j` the `W` marginal.
    pub fn conditional_entropy_d(&self) -> f64 {
        let n = self.n_samples as f64;
        let delta = self.binning.d_width();
        let mut acc = 0.0;
        for (row, wc) in self.counts.chunks(self.binning.d_bins).zip(self.w_marginal()) {
            if wc == 0 {
                continue;
            }
            let pj = wc as f64 / n;
            for &c in row.iter().filter(|&&c| c > 0) {
                let p = c as f64 / n;
                acc += p * (pj * delta / p).log2();
            }
        }
        acc
    }

    /// Entropy difference, with small negative noise clamped to zero.
    pub fn mutual_information(&self) -> Result<f64> {
        let mi = self.entropy_d() - self.conditional_entropy_d();
        if mi < -NEGATIVE_SLACK {
            return Err(Error::Validation(format!("mutual information estimate {mi} bits is negative")));
        }
        if mi < 0.0 {
            log::warn!("clamping negative mutual information estimate {mi} to 0");
            return Ok(0.0);
        }
        Ok(mi)
    }
}

fn warn_if_few(n: usize) {
    if n < MIN_RELIABLE_SAMPLES {
        log::warn!("only {n} samples; plug-in estimates need at least {MIN_RELIABLE_SAMPLES}");
    }
}

/// Differential entropy of `D` in bits.
pub fn entropy_d(d: &[f64], binning: &Binning) -> Result<f64> {
    warn_if_few(d.len());
    let zeros = vec![0.0; d.len()];
    Ok(Hist2D::from_samples(*binning, d, &zeros)?.entropy_d())
}

/// Conditional differential entropy of `D` given `W` in bits.
pub fn conditional_entropy_d_given_w(d: &[f64], w: &[f64], binning: &Binning) -> Result<f64> {
    warn_if_few(d.len());
    Ok(Hist2D::from_samples(*binning, d, w)?.conditional_entropy_d())
}

/// `I(D; W)` in bits.
pub fn mutual_information(d: &[f64], w: &[f64], binning: &Binning) -> Result<f64> {
    warn_if_few(d.len());
    Hist2D::from_samples(*binning, d, w)?.mutual_information()
}

/// One row of the order-statistic study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiRow {
    pub l: usize,
    /// Order index of the gap term: `L` is the largest gap.
    pub i: usize,
    pub mi_bits: f64,
    pub n_samples: usize,
    pub bin_width: f64,
}

/// MI between `D` and each of the three largest `sin²` gap terms, for every `L`.
pub fn mi_study(l_values: &[usize], n_samples: usize, seed: u64, bin_width: f64) -> Result<Vec<MiRow>> {
    let mut rows = Vec::new();
    for &l in l_values {
        let g: GapSamples = run_d_mc(l, n_samples, seed)?;
        let binning = Binning::for_order_stats(l, bin_width)?;
        for (i, w) in [(l, &g.w_largest), (l - 1, &g.w_second), (l - 2, &g.w_third)] {
            let mi_bits = mutual_information(&g.d, w, &binning)?;
            rows.push(MiRow { l, i, mi_bits, n_samples, bin_width });
        }
    }
    Ok(rows)
}

/// `L` values where the second largest gap term does not carry strictly the most information.
pub fn ordering_violations(rows: &[MiRow]) -> Vec<usize> {
    let mut ls: Vec<usize> = rows.iter().map(|r| r.l).collect();
    ls.dedup();
    ls.into_iter()
        .filter(|&l| {
            let of = |i: usize| rows.iter().find(|r| r.l == l && r.i == i).map(|r| r.mi_bits);
            match (of(l), of(l - 1), of(l - 2)) {
                (Some(a), Some(b), Some(c)) => !(b > a && b > c),
                _ => true,
            }
        })
        .collect()
}

/// Writes `L,i,mi_bits,n_samples,bin_width`.
pub fn write_mi_csv<W: Write>(rows: &[MiRow], out: &mut W) -> Result<()> {
    writeln!(out, "L,i,mi_bits,n_samples,bin_width")?;
    for r in rows {
        writeln!(out, "{},{},{},{},{}", r.l, r.i, r.mi_bits, r.n_samples, r.bin_width)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn uniform(n: usize, hi: f64, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.random::<f64>() * hi).collect()
    }

    #[test]
    fn entropy_of_uniforms() {
        // L = 2 gives a unit D support, L = 4 gives [0, 4]
        let b = Binning::for_order_stats(2, 0.01).unwrap();
        assert!(entropy_d(&uniform(1_000_000, 1.0, 1), &b).unwrap().abs() < 0.01);
        let b = Binning::for_order_stats(4, 0.01).unwrap();
        assert!((entropy_d(&uniform(1_000_000, 4.0, 2), &b).unwrap() - 2.0).abs() < 0.01);
    }

    #[test]
    fn deterministic_pair_hits_floor() {
        let b = Binning::for_order_stats(2, 0.01).unwrap();
        let d = uniform(200_000, 1.0, 3);
        let h = conditional_entropy_d_given_w(&d, &d, &b).unwrap();
        assert!((h - 0.01f64.log2()).abs() < 1e-9);
    }

    #[test]
    fn independent_pair_has_no_information() {
        let b = Binning::for_order_stats(4, 0.01).unwrap();
        let d = uniform(1_000_000, 4.0, 4);
        let w = uniform(1_000_000, 1.0, 5);
        let hd = entropy_d(&d, &b).unwrap();
        let hc = conditional_entropy_d_given_w(&d, &w, &b).unwrap();
        assert!((hd - hc).abs() < 0.03);
        assert!(mutual_information(&d, &w, &b).unwrap() < 0.03);
    }

    #[test]
    fn conditioning_reduces_entropy() {
        let g = run_d_mc(4, 200_000, 6).unwrap();
        let b = Binning::for_order_stats(4, 0.01).unwrap();
        assert!(conditional_entropy_d_given_w(&g.d, &g.w_second, &b).unwrap() <= entropy_d(&g.d, &b).unwrap());
    }

    #[test]
    fn histogram_totals_and_edges() {
        let b = Binning::new(2.0, 1.0, 0.25).unwrap();
        let h = Hist2D::from_samples(b, &[0.0, 2.0, 1.0, 0.49], &[1.0, 0.0, 0.5, 0.2]).unwrap();
        assert_eq!(h.n_samples(), 4);
        assert_eq!(h.d_marginal().iter().sum::<u64>(), 4);
        assert_eq!(h.count(3, 0), 1);
        assert_eq!(h.count(0, 3), 1);
        assert_eq!(h.count(0, 0), 1);
        assert!((b.d_width() * b.d_bins as f64 - 2.0).abs() < 1e-15);
        assert!(Hist2D::from_samples(b, &[2.5], &[0.0]).is_err());
    }

    #[test]
    fn study_csv() {
        let rows = mi_study(&[4], 20_000, 1, 0.05).unwrap();
        assert_eq!(rows.iter().map(|r| r.i).collect::<Vec<_>>(), vec![4, 3, 2]);
        let mut buf = Vec::new();
        write_mi_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("L,i,mi_bits,n_samples,bin_width\n4,4,"));
        assert_eq!(text.lines().count(), 4);
    }
}
