//! Gap between the separable upper bound and the PPT value on random
//! entangled states, written as CSV to stdout.
//!
//! ```text
//! cargo run --release --example random_gap_study -- 2 3 10
//! ```

use erbound::experiment::{self, Settings, Timings};

fn main() -> erbound::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).map(|s| s.parse().expect("integer argument")).collect();
    let (da, db, count) = match args.as_slice() {
        [a, b, n] => (*a, *b, *n),
        [a, b] => (*a, *b, 10),
        _ => (2, 2, 10),
    };
    let settings = Settings { seed: 2024, ..Settings::desk() };
    let records = experiment::random_study(da, db, count, &settings)?;
    experiment::write_csv(std::io::stdout(), &records, &settings, Timings::Include)?;

    let mut gaps: Vec<f64> = records.iter().filter_map(|r| r.gap_bits()).collect();
    gaps.sort_by(f64::total_cmp);
    if !gaps.is_empty() {
        eprintln!("gap min {:.2e}  median {:.2e}  max {:.2e}", gaps[0], gaps[gaps.len() / 2], gaps[gaps.len() - 1]);
    }
    Ok(())
}
