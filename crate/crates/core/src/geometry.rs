//! Anchor angle bookkeeping and the position error bound of a fixed anchor set.
//!
//! With the target at the origin and a common range-error standard deviation
//! `sigma_r`, the Fisher information of a 2-D TOA fix depends only on the
//! directions of the participating anchors. The square root of the trace of
//! its inverse is
//!
//! ```text
//! S = sigma_r * sqrt(L) / sqrt(C*S2 - X^2),   C = sum cos^2, S2 = sum sin^2, X = sum cos*sin
//! ```
//!
//! and the determinant term `D = C*S2 - X^2` can equally be written through the
//! gaps between angularly consecutive anchors, `D = sum_{i<j} sin^2(gap_i + .. + gap_{j-1})`.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Determinants at or below this are reported as singular geometry.
pub const SINGULAR_THRESHOLD: f64 = 1e-12;

/// Tolerance on the gap sum of [`InternodalAngles`].
const GAP_SUM_TOLERANCE: f64 = 1e-9;

/// Sums longer than this switch to pairwise summation.
const PAIRWISE_CUTOFF: usize = 32;

fn reduce_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Sum with pairwise reduction for long inputs.
pub(crate) fn stable_sum(values: &[f64]) -> f64 {
    if values.len() <= PAIRWISE_CUTOFF {
        values.iter().sum()
    } else {
        let mid = values.len() / 2;
        stable_sum(&values[..mid]) + stable_sum(&values[mid..])
    }
}

/// Directions (radians, in `[0, 2π)`) from the target to each participating anchor.
#[derive(Debug, Clone, PartialEq)]
pub struct AnchorAngles {
    angles: Vec<f64>,
}

impl AnchorAngles {
    /// Builds an anchor set, reducing every angle mod 2π.
    pub fn new(angles: impl IntoIterator<Item = f64>) -> Result<Self> {
        let angles: Vec<f64> = angles.into_iter().map(reduce_angle).collect();
        if angles.is_empty() {
            return Err(Error::Domain("anchor set must contain at least one angle".into()));
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::Domain("anchor angles must be finite".into()));
        }
        Ok(Self { angles })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// Rotates every anchor by `offset` radians.
    pub fn rotated(&self, offset: f64) -> Self {
        Self {
            angles: self.angles.iter().map(|a| reduce_angle(a + offset)).collect(),
        }
    }
}

/// Angles between angularly consecutive anchors, in anchor order, plus a sorted copy.
#[derive(Debug, Clone, PartialEq)]
pub struct InternodalAngles {
    gaps: Vec<f64>,
    sorted: Vec<f64>,
}

impl InternodalAngles {
    /// Wraps an explicit gap list. The gaps must be non-negative and sum to 2π.
    pub fn new(gaps: Vec<f64>) -> Result<Self> {
        if gaps.is_empty() {
            return Err(Error::Domain("gap list is empty".into()));
        }
        if gaps.iter().any(|g| !(*g >= 0.0)) {
            return Err(Error::Domain("gaps must be non-negative".into()));
        }
        let total: f64 = stable_sum(&gaps);
        if (total - TAU).abs() > GAP_SUM_TOLERANCE {
            return Err(Error::Domain(format!("gaps sum to {total}, expected 2π")));
        }
        Ok(Self::from_gaps_unchecked(gaps))
    }

    fn from_gaps_unchecked(gaps: Vec<f64>) -> Self {
        let mut sorted = gaps.clone();
        sorted.sort_by(f64::total_cmp);
        Self { gaps, sorted }
    }

    /// Gaps in angular order: `gaps()[k]` spans anchor `k` to anchor `k + 1`, the last one wraps.
    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }

    /// Gap order statistics, ascending.
    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    pub fn len(&self) -> usize {
        self.gaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gaps.is_empty()
    }

    /// Second largest gap; requires at least two anchors.
    pub fn second_largest(&self) -> Option<f64> {
        let n = self.sorted.len();
        (n >= 2).then(|| self.sorted[n - 2])
    }
}

/// One evaluation of the benchmark for a fixed anchor set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchmarkValue {
    /// Position error bound in meters.
    pub s: f64,
    /// Determinant term `D`.
    pub d: f64,
    pub sigma_r: f64,
    pub anchors: usize,
}

/// Sorts the anchors by angle and returns the consecutive gaps, closing the wrap-around gap.
pub fn internodal_from_angles(angles: &AnchorAngles) -> InternodalAngles {
    let mut sorted = angles.as_slice().to_vec();
    // stable: ties keep input order
    sorted.sort_by(f64::total_cmp);
    let l = sorted.len();
    let mut gaps = Vec::with_capacity(l);
    for k in 0..l - 1 {
        gaps.push(sorted[k + 1] - sorted[k]);
    }
    gaps.push(TAU - (sorted[l - 1] - sorted[0]));
    InternodalAngles::from_gaps_unchecked(gaps)
}

/// Closed-form benchmark from anchor directions.
pub fn compute_s_from_angles(angles: &AnchorAngles, sigma_r: f64) -> Result<BenchmarkValue> {
    let l = angles.len();
    if l < 3 {
        return Err(Error::Domain(format!("need at least 3 anchors, got {l}")));
    }
    if !(sigma_r > 0.0) {
        return Err(Error::Domain("sigma_r must be positive".into()));
    }
    let mut cc = Vec::with_capacity(l);
    let mut ss = Vec::with_capacity(l);
    let mut cs = Vec::with_capacity(l);
    for &theta in angles.as_slice() {
        let (s, c) = theta.sin_cos();
        cc.push(c * c);
        ss.push(s * s);
        cs.push(c * s);
    }
    let cross = stable_sum(&cs);
    let d = stable_sum(&cc) * stable_sum(&ss) - cross * cross;
    benchmark_from_d(d, l, sigma_r)
}

/// `S = sigma_r * sqrt(L / D)` with the singular-geometry policy applied.
pub fn benchmark_from_d(d: f64, anchors: usize, sigma_r: f64) -> Result<BenchmarkValue> {
    if !(d > SINGULAR_THRESHOLD) {
        return Err(Error::SingularGeometry { determinant: d });
    }
    Ok(BenchmarkValue {
        s: sigma_r * (anchors as f64 / d).sqrt(),
        d,
        sigma_r,
        anchors,
    })
}

/// `D` as the row-wise double sum of `sin^2` over runs of consecutive gaps.
pub fn compute_d_internodal(gaps: &InternodalAngles) -> Result<f64> {
    let g = gaps.gaps();
    let l = g.len();
    if l < 2 {
        return Err(Error::Domain(format!("need at least 2 anchors, got {l}")));
    }
    let mut terms = Vec::with_capacity(l * (l - 1) / 2);
    for i in 0..l - 1 {
        let mut run = 0.0;
        for k in i..l - 1 {
            run += g[k];
            let s = run.sin();
            terms.push(s * s);
        }
    }
    Ok(stable_sum(&terms))
}

/// `D` regrouped along diagonals: the sorted single-gap terms plus runs of length 2..L-2.
pub fn compute_d_proposition1(gaps: &InternodalAngles) -> Result<f64> {
    let g = gaps.gaps();
    let l = g.len();
    if l < 2 {
        return Err(Error::Domain(format!("need at least 2 anchors, got {l}")));
    }
    let mut terms: Vec<f64> = gaps
        .sorted()
        .iter()
        .map(|a| {
            let s = a.sin();
            s * s
        })
        .collect();
    if l == 2 {
        // the first and last diagonals coincide: one pair, one term
        return Ok(terms[0]);
    }
    for run_len in 2..l - 1 {
        for start in 0..l - run_len {
            let run: f64 = g[start..start + run_len].iter().sum();
            let s = run.sin();
            terms.push(s * s);
        }
    }
    Ok(stable_sum(&terms))
}

/// Maximum of `D` over all placements of `l` anchors.
pub fn d_max(l: usize) -> Result<f64> {
    if l < 2 {
        return Err(Error::Domain(format!("need at least 2 anchors, got {l}")));
    }
    Ok((l * l) as f64 / 4.0)
}

/// I.i.d. uniform directions drawn from the caller's generator.
pub fn sample_uniform_angles_with<R: Rng + ?Sized>(l: usize, rng: &mut R) -> Result<AnchorAngles> {
    if l == 0 {
        return Err(Error::Domain("cannot sample zero anchors".into()));
    }
    AnchorAngles::new((0..l).map(|_| rng.random::<f64>() * TAU))
}

/// I.i.d. uniform directions, reproducible from `seed`.
pub fn sample_uniform_angles(l: usize, seed: u64) -> Result<AnchorAngles> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_uniform_angles_with(l, &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn equally_spaced(l: usize) -> AnchorAngles {
        AnchorAngles::new((0..l).map(|k| k as f64 * TAU / l as f64)).unwrap()
    }

    #[test]
    fn equally_spaced_gaps() {
        let gaps = internodal_from_angles(&equally_spaced(4));
        for g in gaps.gaps() {
            assert!((g - FRAC_PI_2).abs() < 1e-15);
        }
    }

    #[test]
    fn single_angle_wraps() {
        let a = AnchorAngles::new([1.3]).unwrap();
        assert_eq!(internodal_from_angles(&a).gaps(), &[TAU]);
    }

    #[test]
    fn empty_angles_rejected() {
        assert!(matches!(AnchorAngles::new(Vec::new()), Err(Error::Domain(_))));
    }

    #[test]
    fn relabel_by_increasing_angle() {
        // four anchors supplied out of angular order
        let a = AnchorAngles::new([5.0, 0.5, 3.0, 1.0]).unwrap();
        let gaps = internodal_from_angles(&a);
        let expect = [0.5, 2.0, 2.0, TAU - 4.5];
        for (g, e) in gaps.gaps().iter().zip(expect) {
            assert!((g - e).abs() < 1e-12);
        }
        let mut sorted = expect.to_vec();
        sorted.sort_by(f64::total_cmp);
        assert_eq!(gaps.sorted().len(), 4);
        for (g, e) in gaps.sorted().iter().zip(sorted) {
            assert!((g - e).abs() < 1e-12);
        }
    }

    #[test]
    fn angles_reduced_mod_two_pi() {
        let a = AnchorAngles::new([-FRAC_PI_2, TAU, 3.0 * PI]).unwrap();
        let v = a.as_slice();
        assert!((v[0] - 1.5 * PI).abs() < 1e-12);
        assert_eq!(v[1], 0.0);
        assert!((v[2] - PI).abs() < 1e-12);
    }

    #[test]
    fn equilateral_benchmark() {
        let b = compute_s_from_angles(&equally_spaced(3), 20.0).unwrap();
        assert!((b.s - 40.0 / 3f64.sqrt()).abs() < 1e-12);
        assert!((b.d - 2.25).abs() < 1e-12);
    }

    #[test]
    fn collinear_is_singular() {
        let a = AnchorAngles::new([0.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            compute_s_from_angles(&a, 20.0),
            Err(Error::SingularGeometry { .. })
        ));
        // opposite directions are collinear too
        let a = AnchorAngles::new([0.0, PI, 0.0, PI]).unwrap();
        assert!(compute_s_from_angles(&a, 1.0).is_err());
    }

    #[test]
    fn fewer_than_three_anchors_rejected() {
        let a = AnchorAngles::new([0.0, 1.0]).unwrap();
        assert!(matches!(compute_s_from_angles(&a, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn d_at_maximum() {
        let four = internodal_from_angles(&equally_spaced(4));
        assert!((compute_d_internodal(&four).unwrap() - 4.0).abs() < 1e-12);
        assert!((compute_d_proposition1(&four).unwrap() - 4.0).abs() < 1e-12);
        let three = InternodalAngles::new(vec![TAU / 3.0; 3]).unwrap();
        assert!((compute_d_internodal(&three).unwrap() - 2.25).abs() < 1e-12);
        assert!((compute_d_proposition1(&three).unwrap() - 2.25).abs() < 1e-12);
        assert_eq!(d_max(4).unwrap(), 4.0);
        assert_eq!(d_max(3).unwrap(), 2.25);
    }

    #[test]
    fn closed_form_matches_gap_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let a = sample_uniform_angles_with(6, &mut rng).unwrap();
            let direct = compute_s_from_angles(&a, 20.0).unwrap();
            let gaps = internodal_from_angles(&a);
            let d = compute_d_internodal(&gaps).unwrap();
            let via_gaps = 20.0 * (6.0 / d).sqrt();
            assert!(((direct.s - via_gaps) / via_gaps).abs() < 1e-10);
        }
    }

    #[test]
    fn diagonal_regrouping_matches() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for l in [2, 3, 4, 5, 7] {
            for _ in 0..100 {
                let gaps = internodal_from_angles(&sample_uniform_angles_with(l, &mut rng).unwrap());
                let a = compute_d_internodal(&gaps).unwrap();
                let b = compute_d_proposition1(&gaps).unwrap();
                assert!((a - b).abs() < 1e-10, "l={l}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn random_search_never_exceeds_dmax() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let cap = d_max(5).unwrap();
        for _ in 0..20_000 {
            let gaps = internodal_from_angles(&sample_uniform_angles_with(5, &mut rng).unwrap());
            assert!(compute_d_internodal(&gaps).unwrap() <= cap + 1e-12);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        assert_eq!(sample_uniform_angles(7, 99).unwrap(), sample_uniform_angles(7, 99).unwrap());
        assert_ne!(sample_uniform_angles(7, 99).unwrap(), sample_uniform_angles(7, 100).unwrap());
        assert!(sample_uniform_angles(0, 1).is_err());
    }

    #[test]
    fn gap_validation() {
        assert!(InternodalAngles::new(vec![1.0, 1.0]).is_err());
        assert!(InternodalAngles::new(vec![-0.1, TAU + 0.1]).is_err());
        assert!(InternodalAngles::new(vec![PI, PI]).is_ok());
    }

    #[test]
    fn pairwise_sum_matches_naive_for_long_inputs() {
        let v: Vec<f64> = (0..1000).map(|k| (k as f64).sin().powi(2)).collect();
        let naive: f64 = v.iter().sum();
        assert!((stable_sum(&v) - naive).abs() < 1e-9);
    }
}
