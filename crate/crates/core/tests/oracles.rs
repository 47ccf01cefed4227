//! Independent oracles: sampling checks, values frozen from a separate
//! scripted implementation of the hearing-probability integral (itself checked
//! against a vectorized network simulation), and a brute-force composition.

use std::f64::consts::TAU;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use netpeb::analytic::{angle2_mean, angle2_var};
use netpeb::cdf::ks_distance;
use netpeb::cli::Config;
use netpeb::localizability::{db_to_linear, p_l_geq, pmf_of_l, pmf_with_reuse, shadow_transform, NetworkParams, Pmf};
use netpeb::simulator::{run_conditional_mc, run_d_mc, run_network_mc, SimConfig, DEFAULT_MEAN_ANCHORS};
use netpeb::geometry::sample_uniform_angles_with;

fn reference(reuse: u32) -> NetworkParams {
    NetworkParams { reuse, ..Config::default().network }
}

fn sim(network: NetworkParams, n: usize, seed: u64) -> SimConfig {
    SimConfig { network, sigma_r: 20.0, n_max: 10, m: 200.0, n_realizations: n, mean_anchors: DEFAULT_MEAN_ANCHORS, seed }
}

#[test]
fn sampled_angles_are_uniform() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut xs: Vec<f64> = (0..100_000)
        .flat_map(|_| sample_uniform_angles_with(10, &mut rng).unwrap().as_slice().to_vec())
        .collect();
    xs.sort_by(f64::total_cmp);
    let d = ks_distance(&xs, |x| x / TAU, |x| x / TAU);
    assert!(d < 0.002, "{d}");
}

#[test]
fn gap_moments_within_three_standard_errors() {
    for l in [3, 5, 9] {
        let g = run_d_mc(l, 400_000, 8 + l as u64).unwrap().angle_second;
        let n = g.len() as f64;
        let mean = g.iter().sum::<f64>() / n;
        let m2 = g.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        let m4 = g.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
        assert!((mean - angle2_mean(l).unwrap()).abs() < 3.0 * (m2 / n).sqrt(), "L={l}");
        let var = m2 * n / (n - 1.0);
        assert!((var - angle2_var(l).unwrap()).abs() < 3.0 * ((m4 - m2 * m2) / n).sqrt(), "L={l}");
    }
}

#[test]
fn shadowing_density_factor() {
    // exp(0.5 * (2/alpha)^2 * (8 ln10 / 10)^2) at alpha = 4
    let f = shadow_transform(1.0, 4.0, 8.0);
    assert!((f - 1.528_295).abs() < 1e-5, "{f}");
}

#[test]
fn single_band_pmf_matches_frozen_values() {
    // separate scripted quadrature, rounded to 4 digits
    let frozen = [0.0, 0.3598, 0.3540, 0.2168, 0.0623, 0.0068, 0.0002];
    let pmf = pmf_of_l(&reference(1).band(), 12).unwrap();
    for (ell, want) in frozen.iter().enumerate() {
        let got = pmf.prob(ell).unwrap();
        assert!((got - want).abs() < 1e-4, "ell={ell}: {got} vs {want}");
    }
    assert!((pmf.survival(3) - 0.2862).abs() < 5e-4);
    assert!((pmf_with_reuse(&reference(2), 30).unwrap().survival(3) - 0.8705).abs() < 5e-4);
}

#[test]
fn pmf_agrees_with_network_simulation() {
    for (reuse, seed) in [(1, 31), (3, 33)] {
        let np = reference(reuse);
        let pmf = pmf_with_reuse(&np, 30).unwrap();
        let est = run_network_mc(&sim(np, 20_000, seed)).unwrap();
        for ell in 0..=30 {
            let (a, e) = (pmf.prob(ell).unwrap(), est.l_frequency(ell));
            assert!((a - e).abs() < 0.02, "K={reuse} ell={ell}: {a} vs {e}");
        }
    }
}

#[test]
fn coverage_probability_matches_simulation() {
    // threshold 1: hearing at least one anchor is plain SIR coverage
    let np = NetworkParams { beta: db_to_linear(20.0), ..reference(1) };
    let analytic = p_l_geq(1, &np.band()).unwrap();
    let est = run_network_mc(&sim(np, 20_000, 41)).unwrap();
    let empirical = 1.0 - est.l_frequency(0);
    assert!((analytic - empirical).abs() < 0.015, "{analytic} vs {empirical}");
    assert!(analytic > 0.3 && analytic < 0.9);
}

#[test]
fn unloaded_network_hears_everything() {
    let np = NetworkParams { q: 0.0, ..reference(1) };
    let pmf = pmf_with_reuse(&np, 12).unwrap();
    assert!(pmf.probs().iter().all(|&p| p == 0.0));
    assert_eq!(pmf.tail_mass(), 1.0);

    // without interference the ten strongest anchors are ten uniform directions
    let net = run_network_mc(&SimConfig { mean_anchors: 200.0, ..sim(np, 20_000, 51) }).unwrap();
    assert!(net.l_histogram().iter().take(11).all(|&c| c == 0));
    let cond = run_conditional_mc(10, 20.0, 200_000, 52).unwrap();
    let cdf = |x: f64| cond.cdf_at(x);
    let left = |x: f64| cond.sorted_samples().partition_point(|&v| v < x) as f64 / cond.n as f64;
    let d = ks_distance(net.sorted_samples(), cdf, left);
    assert!(d < 0.02, "{d}");
}

/// `P[X_1 + ... + X_k = ell]` by recursion over the first band's count.
fn compose(per_band: &Pmf, k: u32, ell: usize) -> f64 {
    if k == 1 {
        return per_band.prob(ell).unwrap_or(0.0);
    }
    (0..=ell).map(|j| per_band.prob(j).unwrap_or(0.0) * compose(per_band, k - 1, ell - j)).sum()
}

#[test]
fn reuse_matches_recursive_composition() {
    for k in 1..=3 {
        let np = reference(k);
        let per_band = pmf_of_l(&np.band(), 20).unwrap();
        let fast = pmf_with_reuse(&np, 20).unwrap();
        for ell in 0..=8 {
            let slow = compose(&per_band, k, ell);
            assert!((fast.prob(ell).unwrap() - slow).abs() < 1e-14, "K={k} ell={ell}");
        }
    }
}
