//! Isotropic states on 3 ⊗ 3. The closed form has a `log d` leading term;
//! the last column shows what a leading `log 2` would predict instead.

use erbound::analytic;
use erbound::experiment::{self, Settings};

fn main() -> erbound::Result<()> {
    let d = 3;
    let settings = Settings::desk();
    let records = experiment::isotropic_sweep(d, &[0.25, 0.5, 0.75, 1.0], &settings)?;

    println!("{:>6} {:>8} {:>8} {:>8} {:>10}", "alpha", "exact", "ppt", "cha", "log2-read");
    for r in &records {
        let a = r.alpha.unwrap();
        println!(
            "{:>6} {:>8.4} {:>8.4} {:>8.4} {:>10.4}",
            a,
            r.analytic_bits.unwrap(),
            r.ppt_bits.unwrap_or(f64::NAN),
            r.cha_bits.unwrap_or(f64::NAN),
            analytic::isotropic_er_log2_leading(d, a)?,
        );
    }
    println!("separable up to alpha = {}", analytic::isotropic_threshold(d));
    Ok(())
}
