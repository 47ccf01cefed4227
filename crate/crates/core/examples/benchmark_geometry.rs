//! Exact benchmark for a handful of anchor layouts around a target.
//!
//! Run with `cargo run --example benchmark_geometry`.

use std::f64::consts::TAU;

use netpeb::geometry::{
    compute_d_internodal, compute_d_proposition1, compute_s_from_angles, d_max, internodal_from_angles,
    sample_uniform_angles, AnchorAngles,
};

fn main() -> netpeb::Result<()> {
    let sigma_r = 20.0;
    let layouts: Vec<(&str, Vec<f64>)> = vec![
        ("equally spaced, 3", (0..3).map(|k| k as f64 * TAU / 3.0).collect()),
        ("equally spaced, 6", (0..6).map(|k| k as f64 * TAU / 6.0).collect()),
        ("clustered in 30 deg", vec![0.0, 0.2, 0.35, 0.5]),
        ("two opposite pairs", vec![0.0, 0.05, 3.14, 3.2]),
        ("random, 5", sample_uniform_angles(5, 7)?.as_slice().to_vec()),
    ];

    println!("{:<22} {:>3} {:>10} {:>10} {:>10}", "layout", "L", "D", "D_max", "S [m]");
    for (name, angles) in layouts {
        let anchors = AnchorAngles::new(angles)?;
        let gaps = internodal_from_angles(&anchors);
        let d = compute_d_internodal(&gaps)?;
        // the diagonal regrouping must agree with the pairwise form
        assert!((d - compute_d_proposition1(&gaps)?).abs() <= 1e-9 * d.max(1.0));
        match compute_s_from_angles(&anchors, sigma_r) {
            Ok(b) => println!("{name:<22} {:>3} {d:>10.4} {:>10.4} {:>10.3}", anchors.len(), d_max(anchors.len())?, b.s),
            Err(e) => println!("{name:<22} {:>3} {d:>10.4} {:>10.4} {e}", anchors.len(), d_max(anchors.len())?),
        }
    }

    // collinear anchors give no fix
    let collinear = AnchorAngles::new([0.0, std::f64::consts::PI, 0.0])?;
    println!("collinear: {}", compute_s_from_angles(&collinear, sigma_r).unwrap_err());
    Ok(())
}
