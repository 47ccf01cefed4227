//! Localizability and error percentiles while one network parameter changes.
//!
//! Run with `cargo run --release --example parameter_sweep`.

use netpeb::cli::{marginal_summary, Config};

fn main() -> netpeb::Result<()> {
    let studies: [(&str, &[&str], fn(&mut Config)); 4] = [
        ("reuse", &["1", "2", "3", "4"], |_| {}),
        ("q", &["1", "0.75", "0.5", "0.25"], |c| c.network.reuse = 2),
        ("gamma_db", &["15", "20", "25", "30"], |c| {
            c.network.reuse = 2;
            c.sigma_r = 30.0;
            c.set("beta_db", "5").unwrap();
        }),
        ("sigma_r", &["20", "40", "60", "80"], |c| c.network.reuse = 3),
    ];

    for (param, values, setup) in studies {
        println!("{param:>9} {:>8} {:>8} {:>8} {:>8}", "P[L>=3]", "p50", "p80", "p90");
        for v in values {
            let mut cfg = Config::default();
            setup(&mut cfg);
            cfg.set(param, v)?;
            let (_, terms) = marginal_summary(&cfg, 100, 40)?;
            println!(
                "{v:>9} {:>8.4} {:>8.2} {:>8.2} {:>8.2}",
                terms.localizable_fraction(),
                terms.quantile(0.5)?,
                terms.quantile(0.8)?,
                terms.quantile(0.9)?
            );
        }
        println!();
    }
    Ok(())
}
