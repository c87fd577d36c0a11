//! The tiles bound-entangled state mixed with white noise.
//!
//! Every member is PPT, so the PPT value is zero throughout, while the
//! separable upper bound leaves zero once the state becomes entangled.

use erbound::experiment::{self, Settings};
use erbound::states;

fn main() -> erbound::Result<()> {
    let tiles = states::tiles_state();
    println!("min eigenvalue of the partial transpose: {:.2e}", tiles.min_pt_eigenvalue());

    let settings = Settings::desk();
    let alphas = experiment::parse_grid("0.7:1.0:0.05")?;
    let (records, summary) = experiment::tiles_sweep(&alphas, &settings)?;
    for r in &records {
        println!("alpha {:<5} ppt {:>9.2e}  cha {:.5}", r.alpha.unwrap(), r.ppt_bits.unwrap(), r.cha_bits.unwrap());
    }
    if let Some(a) = summary.onset_alpha {
        println!("bound leaves zero near alpha = {a:.4}");
    }
    Ok(())
}
