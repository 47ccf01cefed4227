//! Network-wide CDF of the benchmark against a Poisson network simulation.
//!
//! Run with `cargo run --release --example network_marginal [realizations]`.

use netpeb::analytic::MarginalTerms;
use netpeb::cli::{marginal_sup_norm, Config};
use netpeb::localizability::pmf_with_reuse;
use netpeb::simulator::{run_network_mc, SimConfig, DEFAULT_MEAN_ANCHORS};

fn main() -> netpeb::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(10_000);
    let mut cfg = Config::default();
    cfg.network.reuse = 2;

    let pmf = pmf_with_reuse(&cfg.network, 40)?;
    let terms = MarginalTerms::new(&cfg.marginal(), &pmf)?;
    let sim = SimConfig {
        network: cfg.network,
        sigma_r: cfg.sigma_r,
        n_max: cfg.n,
        m: cfg.m,
        n_realizations: n,
        mean_anchors: DEFAULT_MEAN_ANCHORS,
        seed: 2024,
    };
    let est = run_network_mc(&sim)?;

    println!("{n} realizations, K = 2");
    println!("atom at M: analytic {:.4}, simulated {:.4}", terms.unlocalizable_mass(), est.atom_at(cfg.m));
    for s in [20.0, 25.0, 30.0, 40.0, 60.0, 100.0, 199.0, 200.0] {
        println!("F({s:5.1}) = {:.4}   simulated {:.4}", terms.eval(s)?, est.cdf_at(s));
    }
    for q in [0.5, 0.8, 0.9] {
        println!("{:.0}th percentile: {:.2} m", q * 100.0, terms.quantile(q)?);
    }
    println!("sup-norm {:.4}", marginal_sup_norm(&terms, &est));
    Ok(())
}
