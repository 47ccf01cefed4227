//! How many anchors a target can hear.
//!
//! Anchors form a homogeneous PPP; log-normal shadowing is folded into the
//! density (`λ̃ = λ E[S^{2/α}]`). The probability of hearing at least `ℓ`
//! anchors follows from a dominant-interferer analysis of the SIR of the
//! `ℓ`-th nearest anchor: with `Ω ~ Binomial(ℓ-1, q)` of the closer anchors
//! active, the nearest active one at `r_1` is kept exact, the remaining `Ω-1`
//! are replaced by their mean over the annulus `(r_1, r_ℓ)`, and everything
//! beyond `r_ℓ` by the mean far-field interference.
//!
//! Substituting `t = λ̃ π r_ℓ²` and `x = r_1 / r_ℓ` makes the double integral
//! scale free:
//!
//! ```text
//! P[L ≥ ℓ] = P[Poisson(μ) ≥ ℓ]·f_Ω(0)
//!          + Σ_{ω≥1} f_Ω(ω) ∫ Gamma(ℓ,1)(t) ∫_{x*(t)}^1 2ω x (1-x²)^{ω-1} dx dt
//! μ = (α-2) / (2 q β/γ)
//! ```
//!
//! where `x*(t)` is where the inverse SIR `G_ω(x) + 2qt/(α-2)` meets `γ/β`.
//! `G_ω` is strictly decreasing on `(0, 1)`, so the feasible set is the
//! interval `[x*, 1]` and is found by bisection.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_adaptive, GaussLegendre};

/// Outer integration stops at `λ̃ π r_ℓ² = 40 + ℓ + 8√ℓ`, past which the Gamma(ℓ) weight is negligible.
const T_TRUNCATION: f64 = 40.0;
/// Absolute tolerance of the outer integral.
const OUTER_TOLERANCE: f64 = 1e-11;
/// Pmf entries above `-CLAMP_NOISE` are treated as quadrature noise.
const CLAMP_NOISE: f64 = 1e-6;
/// Allowed deviation of `sum(probs) + tail` from one.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;

fn inner_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(64))
}

/// Converts a dB quantity to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Physical and network parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkParams {
    /// Pathloss exponent, strictly greater than 2.
    pub alpha: f64,
    /// Anchor density in anchors per m².
    pub lambda: f64,
    /// Log-normal shadowing standard deviation in dB.
    pub shadow_sigma_db: f64,
    /// Load: probability that an anchor is transmitting.
    pub q: f64,
    /// Processing gain (linear).
    pub gamma: f64,
    /// Post-processing SIR threshold (linear).
    pub beta: f64,
    /// Frequency reuse factor.
    pub reuse: u32,
}

impl NetworkParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 2.0) || !self.alpha.is_finite() {
            return Err(Error::Config(format!("alpha must exceed 2, got {}", self.alpha)));
        }
        if !(self.lambda > 0.0) {
            return Err(Error::Config("lambda must be positive".into()));
        }
        if !(self.shadow_sigma_db >= 0.0) {
            return Err(Error::Config("shadowing sigma must be non-negative".into()));
        }
        if !(0.0..=1.0).contains(&self.q) {
            return Err(Error::Config(format!("load q must lie in [0, 1], got {}", self.q)));
        }
        if !(self.gamma > 0.0) || !(self.beta > 0.0) {
            return Err(Error::Config("gamma and beta must be positive".into()));
        }
        if self.reuse == 0 {
            return Err(Error::Config("reuse factor must be at least 1".into()));
        }
        Ok(())
    }

    /// Shadowing-transformed density.
    pub fn lambda_tilde(&self) -> f64 {
        shadow_transform(self.lambda, self.alpha, self.shadow_sigma_db)
    }

    /// Parameters seen by a single band: density `λ̃ / K`.
    pub fn band(&self) -> BandParams {
        BandParams {
            alpha: self.alpha,
            lambda_tilde: self.lambda_tilde() / self.reuse as f64,
            q: self.q,
            gamma: self.gamma,
            beta: self.beta,
        }
    }
}

/// Parameters of one band after shadowing is folded into the density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandParams {
    pub alpha: f64,
    pub lambda_tilde: f64,
    pub q: f64,
    pub gamma: f64,
    pub beta: f64,
}

impl BandParams {
    fn validate(&self) -> Result<()> {
        if !(self.alpha > 2.0) {
            return Err(Error::Config(format!("alpha must exceed 2, got {}", self.alpha)));
        }
        if !(self.lambda_tilde > 0.0) {
            return Err(Error::Config("density must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.q) {
            return Err(Error::Config("load q must lie in [0, 1]".into()));
        }
        if !(self.gamma > 0.0) || !(self.beta > 0.0) {
            return Err(Error::Config("gamma and beta must be positive".into()));
        }
        Ok(())
    }
}

/// `λ E[S^{2/α}]` for zero-median log-normal shadowing with `sigma_db` spread.
pub fn shadow_transform(lambda: f64, alpha: f64, shadow_sigma_db: f64) -> f64 {
    let sigma_ln = shadow_sigma_db * std::f64::consts::LN_10 / 10.0;
    let k = 2.0 / alpha;
    lambda * (0.5 * k * k * sigma_ln * sigma_ln).exp()
}

/// Distribution of the number of hearable anchors, truncated at `ell_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    probs: Vec<f64>,
    tail_mass: f64,
}

impl Pmf {
    /// Builds a pmf; entries must be non-negative and sum with the tail to one.
    pub fn new(probs: Vec<f64>, tail_mass: f64) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Domain("pmf needs at least one entry".into()));
        }
        if let Some((ell, &value)) = probs.iter().enumerate().find(|(_, p)| !(**p >= 0.0)) {
            return Err(Error::NegativeProbability { ell, value });
        }
        if !(tail_mass >= 0.0) {
            return Err(Error::NegativeProbability { ell: probs.len(), value: tail_mass });
        }
        let pmf = Self { probs, tail_mass };
        pmf.check_normalized()?;
        Ok(pmf)
    }

    /// All mass on a single count.
    pub fn point_mass(ell: usize) -> Self {
        let mut probs = vec![0.0; ell + 1];
        probs[ell] = 1.0;
        Self { probs, tail_mass: 0.0 }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn ell_max(&self) -> usize {
        self.probs.len() - 1
    }

    /// `P[L = ell]`; `None` beyond the truncation point.
    pub fn prob(&self, ell: usize) -> Option<f64> {
        self.probs.get(ell).copied()
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum::<f64>() + self.tail_mass
    }

    pub fn check_normalized(&self) -> Result<()> {
        let total = self.total();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::NotNormalized { total });
        }
        Ok(())
    }

    /// `P[L <= x]`; for `x` beyond the truncation point the tail is ambiguous, so
    /// this is only exact when `tail_mass` is zero.
    pub fn cdf(&self, x: usize) -> f64 {
        self.probs.iter().take(x + 1).sum()
    }

    /// `P[L >= x]`, including the tail.
    pub fn survival(&self, x: usize) -> f64 {
        self.probs.iter().skip(x).sum::<f64>() + self.tail_mass
    }

    /// Expected count over the truncated range plus `(ell_max + 1) * tail`, a lower bound.
    pub fn mean_lower_bound(&self) -> f64 {
        self.probs.iter().enumerate().map(|(l, p)| l as f64 * p).sum::<f64>()
            + self.tail_mass * self.probs.len() as f64
    }
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `P[Poisson(mu) >= ell]`, summed from the upper side to avoid `1 - (1 - ε)` cancellation.
fn poisson_upper_tail(ell: usize, mu: f64) -> f64 {
    if ell == 0 {
        return 1.0;
    }
    if mu.is_infinite() {
        return 1.0;
    }
    if mu <= 0.0 {
        return 0.0;
    }
    if (ell as f64) <= mu {
        // the lower sum is small relative to one here; compute it and subtract
        let mut term = (-mu).exp();
        let mut lower = 0.0;
        for n in 0..ell {
            if n > 0 {
                term *= mu / n as f64;
            }
            lower += term;
        }
        return (1.0 - lower).clamp(0.0, 1.0);
    }
    let mut term = (-mu + ell as f64 * mu.ln() - ln_factorial(ell)).exp();
    let mut acc: f64 = 0.0;
    let mut n = ell;
    while term > 1e-20 * acc.max(1e-300) {
        acc += term;
        n += 1;
        term *= mu / n as f64;
    }
    acc.min(1.0)
}

/// Binomial pmf `P[Binomial(n, q) = k]`.
fn binomial_pmf(n: usize, k: usize, q: f64) -> f64 {
    if k > n {
        return 0.0;
    }
    let ln_choose = ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k);
    let hit = if k == 0 { 1.0 } else { q.powi(k as i32) };
    let miss = if n == k { 1.0 } else { (1.0 - q).powi((n - k) as i32) };
    ln_choose.exp() * hit * miss
}

/// Mean of `r^{-α}` over an annulus `(x, 1)` with area weighting, times `2/(α-2)`:
/// `(x^{2-α} - 1) / (1 - x²)`, evaluated without cancellation near `x = 1`.
fn annulus_mean(x: f64, alpha: f64) -> f64 {
    if x >= 1.0 - 1e-12 {
        return 0.5 * (alpha - 2.0);
    }
    let lx = x.ln();
    let num = ((2.0 - alpha) * lx).exp_m1();
    let den = -(2.0 * lx).exp_m1();
    num / den
}

/// Inverse SIR of the `ℓ`-th nearest anchor from the near interferers, normalized by its
/// own received power: `x^{-α} + 2(ω-1)/(α-2) · (x^{2-α}-1)/(1-x²)`.
fn near_interference(x: f64, omega: usize, alpha: f64) -> f64 {
    x.powf(-alpha) + 2.0 * (omega as f64 - 1.0) / (alpha - 2.0) * annulus_mean(x, alpha)
}

/// Smallest `x` in `(0, 1]` with `near_interference(x) <= budget`; `None` if infeasible.
fn feasibility_boundary(budget: f64, omega: usize, alpha: f64) -> Option<f64> {
    // value at x = 1 is exactly ω
    if !(budget > omega as f64) {
        return None;
    }
    let mut hi = 1.0;
    // x^{-α} alone exceeds the budget below budget^{-1/α}
    let mut lo = 0.5 * budget.powf(-1.0 / alpha);
    debug_assert!(near_interference(lo, omega, alpha) > budget);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if near_interference(mid, omega, alpha) > budget {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Some(hi)
}

/// Conditional probability that the `ω`-active configuration clears the threshold at `t`:
/// the inner integral over the nearest active interferer's relative distance.
fn inner_mass(t: f64, omega: usize, p: &BandParams) -> f64 {
    let budget = p.gamma / p.beta - 2.0 * p.q * t / (p.alpha - 2.0);
    match feasibility_boundary(budget, omega, p.alpha) {
        None => 0.0,
        Some(x_star) => {
            let w = omega as f64;
            inner_rule().integrate(x_star, 1.0, |x| {
                2.0 * w * x * (1.0 - x * x).powi(omega as i32 - 1)
            })
        }
    }
}

/// `P[L >= ell]` for one band.
pub fn p_l_geq(ell: usize, p: &BandParams) -> Result<f64> {
    p.validate()?;
    if ell == 0 {
        return Ok(1.0);
    }
    if p.q == 0.0 {
        // no active interferers: every anchor is heard
        return Ok(1.0);
    }
    let mu = (p.alpha - 2.0) / (2.0 * p.q * p.beta / p.gamma);
    let mut total = poisson_upper_tail(ell, mu) * binomial_pmf(ell - 1, 0, p.q);

    let ln_gamma_norm = ln_factorial(ell - 1);
    let gamma_density = |t: f64| {
        if t <= 0.0 {
            return if ell == 1 { 1.0 } else { 0.0 };
        }
        ((ell as f64 - 1.0) * t.ln() - t - ln_gamma_norm).exp()
    };

    for omega in 1..ell {
        let weight = binomial_pmf(ell - 1, omega, p.q);
        if weight == 0.0 {
            continue;
        }
        // beyond t_max even x = 1 is infeasible
        let t_max = (p.gamma / p.beta - omega as f64) * (p.alpha - 2.0) / (2.0 * p.q);
        if t_max <= 0.0 {
            continue;
        }
        let upper = t_max.min(T_TRUNCATION + ell as f64 + 8.0 * (ell as f64).sqrt());
        let integral = integrate_adaptive(
            |t| gamma_density(t) * inner_mass(t, omega, p),
            0.0,
            upper,
            OUTER_TOLERANCE,
            1e-10,
            2000,
        )?;
        total += weight * integral.value;
    }
    Ok(total.clamp(0.0, 1.0))
}

/// Pmf of `L` for one band from the telescoped tail probabilities.
pub fn pmf_of_l(p: &BandParams, ell_max: usize) -> Result<Pmf> {
    if ell_max < 3 {
        return Err(Error::Domain(format!("ell_max must be at least 3, got {ell_max}")));
    }
    let tails = (0..=ell_max + 1)
        .map(|ell| p_l_geq(ell, p))
        .collect::<Result<Vec<_>>>()?;
    let mut probs = Vec::with_capacity(ell_max + 1);
    let mut clamped = false;
    for ell in 0..=ell_max {
        let v = tails[ell] - tails[ell + 1];
        if v < -CLAMP_NOISE {
            return Err(Error::NegativeProbability { ell, value: v });
        }
        if v < 0.0 {
            log::warn!("pmf entry {ell} = {v:e} clamped to zero (quadrature noise)");
            clamped = true;
        }
        probs.push(v.max(0.0));
    }
    let mut tail = tails[ell_max + 1];
    if clamped {
        let total: f64 = probs.iter().sum::<f64>() + tail;
        probs.iter_mut().for_each(|v| *v /= total);
        tail /= total;
    }
    Pmf::new(probs, tail)
}

/// Discrete convolution of two pmfs truncated at `ell_max`; the excess joins the tail.
pub fn convolve(a: &Pmf, b: &Pmf, ell_max: usize) -> Result<Pmf> {
    let mut probs = vec![0.0; ell_max + 1];
    for (i, pa) in a.probs.iter().enumerate() {
        for (j, pb) in b.probs.iter().enumerate() {
            if i + j <= ell_max {
                probs[i + j] += pa * pb;
            }
        }
    }
    // entries up to ell_max are exact only if neither input was truncated below ell_max
    if (a.tail_mass > 0.0 && a.ell_max() < ell_max) || (b.tail_mass > 0.0 && b.ell_max() < ell_max) {
        return Err(Error::Domain("input pmf truncated below the output range".into()));
    }
    let tail = (1.0 - probs.iter().sum::<f64>()).max(0.0);
    Pmf::new(probs, tail)
}

/// Pmf of the total over `K` independent bands, each of density `λ̃ / K`.
pub fn pmf_with_reuse(np: &NetworkParams, ell_max: usize) -> Result<Pmf> {
    np.validate()?;
    let per_band = pmf_of_l(&np.band(), ell_max)?;
    let mut acc = per_band.clone();
    for _ in 1..np.reuse {
        acc = convolve(&acc, &per_band, ell_max)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn reference(reuse: u32) -> NetworkParams {
        NetworkParams {
            alpha: 4.0,
            lambda: 2.0 / (3f64.sqrt() * 500.0 * 500.0),
            shadow_sigma_db: 8.0,
            q: 1.0,
            gamma: db_to_linear(20.0),
            beta: db_to_linear(10.0),
            reuse,
        }
    }

    #[test]
    fn no_shadowing_keeps_density() {
        assert_eq!(shadow_transform(3e-6, 4.0, 0.0), 3e-6);
    }

    #[test]
    fn shadow_factor_at_eight_db() {
        let ratio = shadow_transform(1.0, 4.0, 8.0);
        let expect = (0.5 * 0.25 * (8.0 * std::f64::consts::LN_10 / 10.0f64).powi(2)).exp();
        assert!((ratio - expect).abs() < 1e-14);
        assert!((ratio - 1.5283).abs() < 1e-4);
        assert!(shadow_transform(1.0, 3.0, 4.0) >= 1.0);
    }

    #[test]
    fn zero_anchors_always_heard() {
        assert_eq!(p_l_geq(0, &reference(1).band()).unwrap(), 1.0);
    }

    #[test]
    fn one_anchor_is_poisson_term() {
        let b = reference(1).band();
        let mu: f64 = (4.0 - 2.0) / (2.0 * 1.0 * 0.1);
        assert!((p_l_geq(1, &b).unwrap() - (1.0 - (-mu).exp())).abs() < 1e-14);
    }

    #[test]
    fn inner_quadrature_matches_closed_form() {
        let p = reference(1).band();
        for omega in 1..6 {
            for t in [0.1, 1.0, 3.0, 7.5] {
                let budget = p.gamma / p.beta - 2.0 * p.q * t / (p.alpha - 2.0);
                let closed = feasibility_boundary(budget, omega, p.alpha)
                    .map_or(0.0, |x| (1.0 - x * x).powi(omega as i32));
                assert!((inner_mass(t, omega, &p) - closed).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn boundary_inverts_interference() {
        for omega in 1..5 {
            let x = feasibility_boundary(8.0, omega, 4.0).unwrap();
            assert!((near_interference(x, omega, 4.0) - 8.0).abs() < 1e-9);
        }
        assert!(feasibility_boundary(3.0, 3, 4.0).is_none());
    }

    #[test]
    fn interference_is_decreasing() {
        for omega in [1, 2, 5] {
            for alpha in [2.5, 4.0, 6.0] {
                let vals: Vec<f64> = (1..=1000)
                    .map(|k| near_interference(k as f64 / 1000.0, omega, alpha))
                    .collect();
                assert!(vals.windows(2).all(|w| w[1] <= w[0]));
                assert!((vals[999] - omega as f64).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn tails_are_monotone() {
        for np in [reference(1), NetworkParams { q: 0.5, ..reference(1) }] {
            let b = np.band();
            let tails: Vec<f64> = (0..12).map(|l| p_l_geq(l, &b).unwrap()).collect();
            assert!(tails.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{tails:?}");
        }
    }

    #[test]
    fn pmf_normalized() {
        let pmf = pmf_of_l(&reference(1).band(), 35).unwrap();
        assert!((pmf.total() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn huge_threshold_hears_nothing() {
        let np = NetworkParams { beta: 1e9, ..reference(1) };
        let pmf = pmf_with_reuse(&np, 10).unwrap();
        assert!((pmf.probs()[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn reuse_one_is_plain_pmf() {
        let np = reference(1);
        assert_eq!(pmf_with_reuse(&np, 20).unwrap(), pmf_of_l(&np.band(), 20).unwrap());
    }

    #[test]
    fn reuse_two_is_self_convolution() {
        let np = reference(2);
        let per = pmf_of_l(&np.band(), 20).unwrap();
        let two = pmf_with_reuse(&np, 20).unwrap();
        for ell in 0..=20 {
            let expect: f64 = (0..=ell).map(|j| per.probs()[j] * per.probs()[ell - j]).sum();
            assert!((two.probs()[ell] - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn density_scale_does_not_matter() {
        let b = reference(1).band();
        let b2 = BandParams { lambda_tilde: 7.0 * b.lambda_tilde, ..b };
        for l in 0..8 {
            assert_eq!(p_l_geq(l, &b).unwrap(), p_l_geq(l, &b2).unwrap());
        }
    }

    #[test]
    fn published_localizable_fractions() {
        let one = pmf_with_reuse(&reference(1), 35).unwrap().survival(3);
        let two = pmf_with_reuse(&reference(2), 35).unwrap().survival(3);
        assert!((0.20..=0.30).contains(&one), "K=1: {one}");
        assert!((0.80..=0.90).contains(&two), "K=2: {two}");
    }

    #[test]
    fn rejects_bad_params() {
        assert!(pmf_with_reuse(&NetworkParams { alpha: 2.0, ..reference(1) }, 5).is_err());
        assert!(pmf_with_reuse(&NetworkParams { q: 1.5, ..reference(1) }, 5).is_err());
        assert!(pmf_with_reuse(&NetworkParams { reuse: 0, ..reference(1) }, 5).is_err());
        assert!(pmf_of_l(&reference(1).band(), 2).is_err());
    }

    #[test]
    fn pmf_constructor_checks() {
        assert!(matches!(Pmf::new(vec![0.5, 0.4], 0.0), Err(Error::NotNormalized { .. })));
        assert!(matches!(
            Pmf::new(vec![1.1, -0.1], 0.0),
            Err(Error::NegativeProbability { ell: 1, .. })
        ));
        let p = Pmf::point_mass(4);
        assert_eq!(p.prob(4), Some(1.0));
        assert_eq!(p.survival(3), 1.0);
        assert_eq!(p.cdf(3), 0.0);
    }

    #[test]
    fn poisson_tail_both_branches() {
        // P[Poisson(2) >= 3] = 1 - e^-2 (1 + 2 + 2)
        let expect = 1.0 - (-2f64).exp() * 5.0;
        assert!((poisson_upper_tail(3, 2.0) - expect).abs() < 1e-15);
        let expect = 1.0 - (-10f64).exp() * (1.0 + 10.0 + 50.0);
        assert!((poisson_upper_tail(3, 10.0) - expect).abs() < 1e-14);
    }
}
