//! Which gap term says the most about the benchmark denominator.
//!
//! Run with `cargo run --release --example mutual_information [samples]`.

use netpeb::infoanalysis::{mi_study, ordering_violations, DEFAULT_BIN_WIDTH};

fn main() -> netpeb::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(300_000);
    let rows = mi_study(&[4, 5, 6, 7, 8], n, 3, DEFAULT_BIN_WIDTH)?;
    println!("{:>3} {:>10} {:>10} {:>10}", "L", "I(D;W_L)", "I(D;W_L-1)", "I(D;W_L-2)");
    for chunk in rows.chunks(3) {
        println!(
            "{:>3} {:>10.4} {:>10.4} {:>10.4}",
            chunk[0].l, chunk[0].mi_bits, chunk[1].mi_bits, chunk[2].mi_bits
        );
    }
    let bad = ordering_violations(&rows);
    if bad.is_empty() {
        println!("second largest gap term is the most informative everywhere");
    } else {
        println!("second largest gap term is not the most informative at L = {bad:?}");
    }
    Ok(())
}
