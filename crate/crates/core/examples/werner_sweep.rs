//! Werner states: both bounds against the closed form.
//!
//! ```text
//! cargo run --release --example werner_sweep -- 3
//! ```

use erbound::experiment::{self, Settings};

fn main() -> erbound::Result<()> {
    let d: usize = std::env::args().nth(1).map(|s| s.parse().expect("dimension")).unwrap_or(2);
    let settings = Settings::desk();
    let alphas = experiment::parse_grid("0.4:1.0:0.1")?;
    let records = experiment::werner_sweep(d, &alphas, &settings)?;

    println!("{:>6} {:>10} {:>10} {:>10}", "alpha", "exact", "ppt", "cha");
    for r in &records {
        println!(
            "{:>6} {:>10.5} {:>10.5} {:>10.5}",
            r.alpha.unwrap(),
            r.analytic_bits.unwrap(),
            r.ppt_bits.unwrap_or(f64::NAN),
            r.cha_bits.unwrap_or(f64::NAN),
        );
    }
    Ok(())
}
