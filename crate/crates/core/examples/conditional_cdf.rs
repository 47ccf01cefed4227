//! Closed-form CDF of the benchmark for a fixed anchor count, against samples of
//! the exact benchmark and of the gap approximation it is built on.
//!
//! Run with `cargo run --release --example conditional_cdf`.

use netpeb::analytic::{cond_cdf_s, CondCdfParams};
use netpeb::cdf::ks_distance;
use netpeb::simulator::run_conditional_mc;

fn main() -> netpeb::Result<()> {
    let sigma_r = 20.0;
    let draws = 200_000;
    for l in [3, 4, 6] {
        let p = CondCdfParams::new(l, sigma_r)?;
        let f = |s: f64| cond_cdf_s(s, &p).unwrap();

        let exact = run_conditional_mc(l, sigma_r, draws, 1)?;
        let mut approx: Vec<f64> = netpeb::simulator::run_d_mc(l, draws, 1)?
            .angle_second
            .iter()
            .map(|g| p.a() / g.sin())
            .collect();
        approx.sort_by(f64::total_cmp);

        println!("L = {l}, support starts at {:.3} m", p.a());
        for s in [p.a() * 1.05, 25.0, 30.0, 40.0, 60.0, 100.0] {
            println!("  F({s:7.3}) = {:.4}   exact mc {:.4}", f(s), exact.cdf_at(s));
        }
        println!(
            "  sup-norm vs exact S {:.4}, vs approximation {:.4}",
            ks_distance(exact.sorted_samples(), f, f),
            ks_distance(&approx, f, f)
        );
    }
    Ok(())
}
