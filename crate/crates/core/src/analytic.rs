//! Closed-form distributions of the position error bound.
//!
//! The benchmark is approximated through the second largest gap between
//! consecutive anchors, `S ≈ a / sin(g_(L-1))` with `a = sigma_r * sqrt(4/L)`.
//! The CDF of that order statistic is a finite alternating sum, which gives the
//! conditional CDF of `S` given `L` in closed form. Mixing the conditional CDFs
//! over the pmf of `L` (with `L >= N` capped at `N` and `L <= 2` sent to a fixed
//! placeholder error `M`) yields the network-wide CDF.
//!
//! The alternating sums lose precision as `L` grows; counts up to
//! [`MAX_SUPPORTED_ANCHORS`] are supported.

use std::f64::consts::{PI, TAU};

use crate::cdf::{default_s_grid, tabulate_cdf, CdfCurve};
use crate::error::{Error, Result};
use crate::localizability::{NetworkParams, Pmf};

/// Largest anchor count accepted by the alternating-sum evaluators.
pub const MAX_SUPPORTED_ANCHORS: usize = 30;

/// Relative guard on `2π/φ` so that `φ = 2π/n` falls in bucket `n`.
const FLOOR_GUARD: f64 = 1e-12;

fn check_count(l: usize, min: usize) -> Result<()> {
    if l < min || l > MAX_SUPPORTED_ANCHORS {
        return Err(Error::Domain(format!(
            "anchor count {l} outside supported range {min}..={MAX_SUPPORTED_ANCHORS}"
        )));
    }
    Ok(())
}

/// Exact binomial coefficient (fits in u64 for n <= 60).
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

fn sign(n: usize) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// CDF of the second largest gap among `l` uniform anchors.
pub fn angle2_cdf(phi: f64, l: usize) -> Result<f64> {
    check_count(l, 2)?;
    if !(0.0..=PI).contains(&phi) {
        return Err(Error::Domain(format!("angle {phi} outside [0, π]")));
    }
    if phi == 0.0 {
        return Ok(0.0);
    }
    let buckets = ((TAU / phi) * (1.0 + FLOOR_GUARD)).floor() as usize;
    let upper = l.min(buckets);
    // terms reach ~1e9 at L = 30 while the sum can be ~1e-10, so the sum is carried in
    // double-double
    let x = phi / TAU;
    // n = 0 contributes (-1)^{-1} * 1 * (-1) * 1 = +1; n = 1 vanishes
    let mut acc = Dd::from(1.0);
    for n in 2..=upper {
        let base = Dd::from(1.0).sub(Dd::prod(n as f64, x));
        if base.hi <= 0.0 {
            continue;
        }
        let coeff = sign(n - 1) * (binomial(l, n) * (n as u64 - 1)) as f64;
        acc = acc.add(base.powi(l as u32 - 1).scale(coeff));
    }
    Ok(acc.value().clamp(0.0, 1.0))
}

/// Unevaluated sum `hi + lo` with roughly twice the precision of `f64`.
#[derive(Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl From<f64> for Dd {
    fn from(hi: f64) -> Self {
        Dd { hi, lo: 0.0 }
    }
}

impl Dd {
    fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        Dd { hi: s, lo: (a - (s - bb)) + (b - bb) }
    }

    fn prod(a: f64, b: f64) -> Dd {
        let p = a * b;
        Dd { hi: p, lo: a.mul_add(b, -p) }
    }

    fn renorm(hi: f64, lo: f64) -> Dd {
        let s = hi + lo;
        Dd { hi: s, lo: lo - (s - hi) }
    }

    fn add(self, o: Dd) -> Dd {
        let s = Dd::two_sum(self.hi, o.hi);
        let t = Dd::two_sum(self.lo, o.lo);
        let r = Dd::renorm(s.hi, s.lo + t.hi);
        Dd::renorm(r.hi, r.lo + t.lo)
    }

    fn sub(self, o: Dd) -> Dd {
        self.add(Dd { hi: -o.hi, lo: -o.lo })
    }

    fn mul(self, o: Dd) -> Dd {
        let p = Dd::prod(self.hi, o.hi);
        Dd::renorm(p.hi, p.lo + (self.hi * o.lo + self.lo * o.hi))
    }

    fn scale(self, c: f64) -> Dd {
        let p = Dd::prod(self.hi, c);
        Dd::renorm(p.hi, p.lo + self.lo * c)
    }

    fn powi(self, mut e: u32) -> Dd {
        let mut base = self;
        let mut acc = Dd::from(1.0);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(base);
            }
            base = base.mul(base);
            e >>= 1;
        }
        acc
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

/// Expected second largest gap.
pub fn angle2_mean(l: usize) -> Result<f64> {
    check_count(l, 2)?;
    let lf = l as f64;
    Ok((2..=l)
        .map(|n| {
            let nf = n as f64;
            sign(n) * binomial(l, n) as f64 * TAU * (nf - 1.0) / (nf * lf)
        })
        .sum())
}

/// Variance of the second largest gap.
///
/// The second moment is `Σ (-1)^n C(L,n) 8π²(n-1) / (n² L (L+1))`; subtracting the
/// squared mean gives the bracketed form below with `c = Σ (-1)^{m+1} C(L,m)(m-1)/m`.
pub fn angle2_var(l: usize) -> Result<f64> {
    check_count(l, 2)?;
    let lf = l as f64;
    let c: f64 = (2..=l)
        .map(|m| sign(m + 1) * binomial(l, m) as f64 * (m as f64 - 1.0) / m as f64)
        .sum();
    let sum: f64 = (2..=l)
        .map(|n| {
            let nf = n as f64;
            sign(n) * binomial(l, n) as f64 * ((nf - 1.0) / nf) * (2.0 / (nf * (lf + 1.0)) + c / lf)
        })
        .sum();
    Ok(4.0 * PI * PI / lf * sum)
}

/// Parameters of the conditional CDF of `S` given `L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CondCdfParams {
    l: usize,
    sigma_r: f64,
}

impl CondCdfParams {
    pub fn new(l: usize, sigma_r: f64) -> Result<Self> {
        check_count(l, 2)?;
        if !(sigma_r > 0.0) || !sigma_r.is_finite() {
            return Err(Error::Domain("sigma_r must be positive".into()));
        }
        Ok(Self { l, sigma_r })
    }

    pub fn anchors(&self) -> usize {
        self.l
    }

    pub fn sigma_r(&self) -> f64 {
        self.sigma_r
    }

    /// Lower edge of the support, `sigma_r * sqrt(4/L)`.
    pub fn a(&self) -> f64 {
        self.sigma_r * (4.0 / self.l as f64).sqrt()
    }
}

/// The two angles bracketing `{a / sin(g) <= s}`.
pub fn phi_bounds(s: f64, p: &CondCdfParams) -> Option<(f64, f64)> {
    let a = p.a();
    if s < a {
        return None;
    }
    let phi1 = (a / s).min(1.0).asin();
    Some((phi1, PI - phi1))
}

/// Conditional CDF of `S` given `L` anchors.
pub fn cond_cdf_s(s: f64, p: &CondCdfParams) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::Domain(format!("s must be positive, got {s}")));
    }
    match phi_bounds(s, p) {
        None => Ok(0.0),
        Some((phi1, phi2)) => {
            let v = angle2_cdf(phi2, p.l)? - angle2_cdf(phi1, p.l)?;
            Ok(v.clamp(0.0, 1.0))
        }
    }
}

/// Everything the network-wide CDF needs besides the pmf of `L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginalParams {
    pub network: NetworkParams,
    pub sigma_r: f64,
    /// Placeholder error for unlocalizable targets.
    pub m: f64,
    /// Most anchors tasked per fix.
    pub n: usize,
}

impl MarginalParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.m > 0.0) {
            return Err(Error::Config("placeholder error M must be positive".into()));
        }
        if self.n < 3 || self.n > MAX_SUPPORTED_ANCHORS {
            return Err(Error::Config(format!(
                "N must lie in 3..={MAX_SUPPORTED_ANCHORS}, got {}",
                self.n
            )));
        }
        if !(self.sigma_r > 0.0) {
            return Err(Error::Config("sigma_r must be positive".into()));
        }
        Ok(())
    }
}

/// Step function with `u(0) = 1`.
pub fn unit_step(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Conditional CDF with the anchor cap and the unlocalizable placeholder applied.
pub fn cond_cdf_s_modified(s: f64, l: usize, mp: &MarginalParams) -> Result<f64> {
    mp.validate()?;
    if !(s > 0.0) {
        return Err(Error::Domain(format!("s must be positive, got {s}")));
    }
    match l {
        0..=2 => Ok(unit_step(s - mp.m)),
        _ => cond_cdf_s(s, &CondCdfParams::new(l.min(mp.n), mp.sigma_r)?),
    }
}

/// Network-wide CDF of the benchmark: the modified conditional CDFs mixed over `pmf`.
pub fn marginal_cdf_s(s: f64, mp: &MarginalParams, pmf: &Pmf) -> Result<f64> {
    let terms = MarginalTerms::new(mp, pmf)?;
    terms.eval(s)
}

/// Precomputed weights of the mixture; evaluate many points without re-checking the pmf.
#[derive(Debug, Clone)]
pub struct MarginalTerms {
    sigma_r: f64,
    m: f64,
    /// `(L, weight)` for every localizable branch, `L = N` carrying `P[L >= N]`.
    branches: Vec<(CondCdfParams, f64)>,
    unlocalizable: f64,
}

impl MarginalTerms {
    pub fn new(mp: &MarginalParams, pmf: &Pmf) -> Result<Self> {
        mp.validate()?;
        pmf.check_normalized()?;
        let n = mp.n;
        if pmf.tail_mass() > 1e-12 && pmf.ell_max() + 1 < n {
            return Err(Error::Domain(format!(
                "pmf truncated at {} with tail mass; need entries up to N - 1 = {}",
                pmf.ell_max(),
                n - 1
            )));
        }
        let p = |ell: usize| pmf.prob(ell).unwrap_or(0.0);
        let unlocalizable = (0..=2).map(p).sum();
        let mut branches = Vec::with_capacity(n - 2);
        for ell in 3..n {
            branches.push((CondCdfParams::new(ell, mp.sigma_r)?, p(ell)));
        }
        let capped = 1.0 - (0..n).map(p).sum::<f64>();
        branches.push((CondCdfParams::new(n, mp.sigma_r)?, capped.max(0.0)));
        Ok(Self { sigma_r: mp.sigma_r, m: mp.m, branches, unlocalizable })
    }

    /// Mass of the atom at `M`.
    pub fn unlocalizable_mass(&self) -> f64 {
        self.unlocalizable
    }

    /// `P[L >= 3]`.
    pub fn localizable_fraction(&self) -> f64 {
        self.branches.iter().map(|b| b.1).sum()
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn sigma_r(&self) -> f64 {
        self.sigma_r
    }

    /// Lowest point of the support.
    pub fn support_low(&self) -> f64 {
        self.branches
            .iter()
            .filter(|b| b.1 > 0.0)
            .map(|b| b.0.a())
            .fold(if self.unlocalizable > 0.0 { self.m } else { f64::INFINITY }, f64::min)
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        if !(s > 0.0) {
            return Err(Error::Domain(format!("s must be positive, got {s}")));
        }
        let mut acc = unit_step(s - self.m) * self.unlocalizable;
        for (p, w) in &self.branches {
            if *w > 0.0 {
                acc += w * cond_cdf_s(s, p)?;
            }
        }
        Ok(acc.clamp(0.0, 1.0))
    }

    /// Smallest `s` with `F(s) >= p`, by bisection.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::Domain(format!("quantile level {p} outside [0, 1)")));
        }
        let mut lo = self.support_low().min(self.m) * 0.5;
        let mut hi = self.m.max(self.sigma_r) * 2.0;
        while self.eval(hi)? < p {
            hi *= 2.0;
            if hi > 1e15 {
                return Err(Error::Domain("quantile beyond representable range".into()));
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.eval(mid)? >= p {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-12 * hi {
                break;
            }
        }
        Ok(hi)
    }

    /// Tabulates on the default geometric grid.
    pub fn tabulate(&self, points: usize) -> Result<CdfCurve> {
        let a_min = self.support_low().min(self.m);
        let grid = default_s_grid(a_min, Some(self.m), points)?;
        tabulate_cdf(|s| self.eval(s), &grid, a_min, "atom at M of mass P[L <= 2]")
    }
}

/// Tabulates the conditional CDF on the default grid for `L` anchors.
pub fn tabulate_cond_cdf(p: &CondCdfParams, points: usize) -> Result<CdfCurve> {
    let grid = default_s_grid(p.a(), None, points)?;
    tabulate_cdf(|s| cond_cdf_s(s, p), &grid, p.a(), "support [a, inf)")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localizability::db_to_linear;

    fn reference_marginal() -> MarginalParams {
        MarginalParams {
            network: NetworkParams {
                alpha: 4.0,
                lambda: 2.0 / (3f64.sqrt() * 500.0 * 500.0),
                shadow_sigma_db: 8.0,
                q: 1.0,
                gamma: db_to_linear(20.0),
                beta: db_to_linear(10.0),
                reuse: 1,
            },
            sigma_r: 20.0,
            m: 200.0,
            n: 10,
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(30, 15), 155_117_520);
        assert_eq!(binomial(3, 4), 0);
    }

    #[test]
    fn cdf_support_edges() {
        assert_eq!(angle2_cdf(0.0, 5).unwrap(), 0.0);
        assert!((angle2_cdf(PI, 5).unwrap() - 1.0).abs() < 1e-12);
        assert!(angle2_cdf(-0.1, 5).is_err());
        assert!(angle2_cdf(PI + 0.1, 5).is_err());
        assert!(angle2_cdf(1.0, 1).is_err());
        assert!(angle2_cdf(1.0, 31).is_err());
    }

    #[test]
    fn two_anchor_gap_is_uniform() {
        for phi in [0.1, 1.0, 2.5] {
            assert!((angle2_cdf(phi, 2).unwrap() - phi / PI).abs() < 1e-14);
        }
    }

    #[test]
    fn bucket_boundaries_are_continuous() {
        for l in 3..10 {
            for n in 2..=l {
                let phi = TAU / n as f64;
                if phi > PI {
                    continue;
                }
                let at = angle2_cdf(phi, l).unwrap();
                let below = angle2_cdf(phi * (1.0 - 1e-10), l).unwrap();
                let above = angle2_cdf((phi * (1.0 + 1e-10)).min(PI), l).unwrap();
                assert!((at - below).abs() < 1e-7 && (at - above).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn cdf_monotone_on_fine_grid() {
        for l in 2..=30 {
            let mut prev = 0.0;
            for k in 0..=10_000 {
                let v = angle2_cdf(PI * k as f64 / 10_000.0, l).unwrap();
                assert!(v >= prev - 1e-12, "l={l} k={k}: {v} < {prev}");
                prev = v;
            }
            assert!((prev - 1.0).abs() < 1e-12, "l={l}: {prev}");
        }
    }

    #[test]
    fn mean_and_variance_small_case() {
        assert!((angle2_mean(2).unwrap() - PI / 2.0).abs() < 1e-14);
        assert!((angle2_var(2).unwrap() - PI * PI / 12.0).abs() < 1e-13);
    }

    #[test]
    fn printed_variance_bracket_disagrees() {
        // with (L-1) in place of (L+1) the two-anchor case gives 3π²/4, not π²/12
        let l = 2.0;
        let c = -0.5;
        let printed = 4.0 * PI * PI / l * (0.5 * (2.0 / (2.0 * (l - 1.0)) + c / l));
        assert!((printed - 0.75 * PI * PI).abs() < 1e-12);
        assert!((printed - angle2_var(2).unwrap()).abs() > 1.0);
    }

    #[test]
    fn mean_matches_integrated_survival() {
        use crate::quadrature::GaussLegendre;
        let rule = GaussLegendre::new(64);
        for l in 2..=12 {
            // the cdf has kinks at 2π/n; integrate piecewise between them
            let mut knots: Vec<f64> = (2..=l).map(|n| TAU / n as f64).filter(|k| *k < PI).collect();
            knots.push(0.0);
            knots.push(PI);
            knots.sort_by(f64::total_cmp);
            let mean: f64 = knots
                .windows(2)
                .map(|w| rule.integrate(w[0], w[1], |x| 1.0 - angle2_cdf(x, l).unwrap()))
                .sum();
            assert!((mean - angle2_mean(l).unwrap()).abs() < 1e-6, "l={l}");
        }
    }

    #[test]
    fn variance_shrinks_with_anchors() {
        let v: Vec<f64> = (3..=10).map(|l| angle2_var(l).unwrap()).collect();
        assert!(v.windows(2).all(|w| w[1] < w[0]), "{v:?}");
        for l in 2..=10 {
            let m = angle2_mean(l).unwrap();
            assert!(m > 0.0 && m < PI);
        }
    }

    #[test]
    fn conditional_cdf_support() {
        let p = CondCdfParams::new(4, 20.0).unwrap();
        assert_eq!(cond_cdf_s(p.a(), &p).unwrap(), 0.0);
        assert_eq!(cond_cdf_s(0.5 * p.a(), &p).unwrap(), 0.0);
        assert!(cond_cdf_s(1e6, &p).unwrap() > 0.999_99);
        let (p1, p2) = phi_bounds(30.0, &p).unwrap();
        assert!((p1 + p2 - PI).abs() < 1e-15);
    }

    #[test]
    fn sigma_is_a_scale_parameter() {
        for l in [3, 5, 8] {
            let base = CondCdfParams::new(l, 20.0).unwrap();
            let scaled = CondCdfParams::new(l, 60.0).unwrap();
            for s in [21.0, 25.0, 40.0, 100.0] {
                let a = cond_cdf_s(3.0 * s, &scaled).unwrap();
                let b = cond_cdf_s(s, &base).unwrap();
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn modified_branches() {
        let mp = reference_marginal();
        assert_eq!(cond_cdf_s_modified(100.0, 1, &mp).unwrap(), 0.0);
        assert_eq!(cond_cdf_s_modified(200.0, 0, &mp).unwrap(), 1.0);
        for s in [15.0, 20.0, 35.0, 90.0] {
            assert_eq!(
                cond_cdf_s_modified(s, 13, &mp).unwrap(),
                cond_cdf_s_modified(s, 10, &mp).unwrap()
            );
            assert_eq!(
                cond_cdf_s_modified(s, 5, &mp).unwrap(),
                cond_cdf_s(s, &CondCdfParams::new(5, 20.0).unwrap()).unwrap()
            );
        }
    }

    #[test]
    fn degenerate_mixtures() {
        let mp = reference_marginal();
        let four = Pmf::point_mass(4);
        let cond = CondCdfParams::new(4, 20.0).unwrap();
        for s in [18.0, 21.0, 30.0, 199.0, 200.0, 500.0] {
            assert_eq!(marginal_cdf_s(s, &mp, &four).unwrap(), cond_cdf_s(s, &cond).unwrap());
        }
        let none = Pmf::point_mass(0);
        assert_eq!(marginal_cdf_s(199.9, &mp, &none).unwrap(), 0.0);
        assert_eq!(marginal_cdf_s(200.0, &mp, &none).unwrap(), 1.0);
    }

    #[test]
    fn truncated_pmf_rejected() {
        let mp = reference_marginal();
        let truncated = Pmf::new(vec![0.5, 0.2, 0.1], 0.2).unwrap();
        assert!(marginal_cdf_s(30.0, &mp, &truncated).is_err());
    }

    #[test]
    fn marginal_atom_and_limit() {
        let mp = reference_marginal();
        let pmf = crate::localizability::pmf_with_reuse(&mp.network, 35).unwrap();
        let terms = MarginalTerms::new(&mp, &pmf).unwrap();
        let jump = terms.eval(200.0).unwrap() - terms.eval(200f64.next_down()).unwrap();
        let p_le2: f64 = pmf.probs()[..3].iter().sum();
        assert!((jump - p_le2).abs() < 1e-9);
        assert!(terms.eval(1e9).unwrap() > 1.0 - 1e-6);
        let curve = terms.tabulate(2000).unwrap();
        assert!(curve.points().windows(2).all(|w| w[1].1 >= w[0].1));
    }

    #[test]
    fn quantile_inverts() {
        let mp = reference_marginal();
        let pmf = crate::localizability::pmf_with_reuse(&NetworkParams { reuse: 2, ..mp.network }, 35)
            .unwrap();
        let terms = MarginalTerms::new(&mp, &pmf).unwrap();
        let p80 = terms.quantile(0.8).unwrap();
        assert!((terms.eval(p80).unwrap() - 0.8).abs() < 1e-6);
    }
}
