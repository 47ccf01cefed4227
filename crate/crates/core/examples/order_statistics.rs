//! Second largest gap between uniformly placed anchors: closed form vs sampling.
//!
//! Run with `cargo run --release --example order_statistics`.

use std::f64::consts::PI;

use netpeb::analytic::{angle2_cdf, angle2_mean, angle2_var};
use netpeb::cdf::ks_distance;
use netpeb::simulator::run_d_mc;

fn main() -> netpeb::Result<()> {
    let draws = 200_000;
    println!("{:>3} {:>9} {:>9} {:>9} {:>9} {:>8}", "L", "mean", "mc mean", "var", "mc var", "ks");
    for l in [3, 4, 6, 8, 10] {
        let mut g = run_d_mc(l, draws, 42)?.angle_second;
        g.sort_by(f64::total_cmp);
        let n = g.len() as f64;
        let mean = g.iter().sum::<f64>() / n;
        let var = g.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let cdf = |x: f64| angle2_cdf(x.clamp(0.0, PI), l).unwrap();
        let ks = ks_distance(&g, cdf, cdf);
        println!(
            "{l:>3} {:>9.5} {mean:>9.5} {:>9.5} {var:>9.5} {ks:>8.4}",
            angle2_mean(l)?,
            angle2_var(l)?
        );
    }
    Ok(())
}
