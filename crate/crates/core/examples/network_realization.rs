//! A single simulated positioning scenario, and the CSV dumps of a short run.
//!
//! Run with `cargo run --release --example network_realization`.

use netpeb::cli::Config;
use netpeb::simulator::{run_network_mc, simulate_realization, SimConfig, DEFAULT_MEAN_ANCHORS};

fn main() -> netpeb::Result<()> {
    let cfg = Config::default();
    let sim = SimConfig {
        network: cfg.network,
        sigma_r: cfg.sigma_r,
        n_max: cfg.n,
        m: cfg.m,
        n_realizations: 20,
        mean_anchors: DEFAULT_MEAN_ANCHORS,
        seed: 9,
    };
    println!("disk radius {:.0} m", sim.disk_radius());
    for i in 0..5 {
        let o = simulate_realization(&sim, i)?;
        let deg: Vec<String> = o.selected_angles.iter().map(|a| format!("{:.0}", a.to_degrees())).collect();
        println!("realization {i}: heard {} anchors at [{}] deg, S = {:.2} m", o.l_heard, deg.join(", "), o.s_value);
    }

    let est = run_network_mc(&sim)?;
    let mut out = std::io::stdout().lock();
    est.write_histogram_csv(&mut out)?;
    est.write_samples_csv(&mut out)?;
    Ok(())
}
