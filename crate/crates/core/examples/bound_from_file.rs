//! Bounds for a state stored as a JSON matrix file. Without an argument a
//! Bell-state file is written to a temporary directory first.

use std::path::PathBuf;

use erbound::experiment::{self, Settings};
use erbound::states;

fn main() -> erbound::Result<()> {
    let path = match std::env::args().nth(1) {
        Some(p) => PathBuf::from(p),
        None => {
            let p = std::env::temp_dir().join("erbound_bell.json");
            experiment::write_matrix_file(&p, &states::max_entangled(2)?)?;
            p
        }
    };
    let ev = experiment::bound_file(&path, &Settings::desk())?;
    let r = &ev.record;
    println!("{} ({})", path.display(), r.state);
    println!("ppt {:?}  cha {:?}", r.ppt_bits, r.cha_bits);
    if let Some(cha) = &ev.cha {
        for p in cha.best_support.iter().take(5) {
            println!("  weight {:.4}", p.weight);
        }
    }
    Ok(())
}
