//! The inner solver on a hand-built pool: the hull of the 2 ⊗ 2 basis states
//! alone, then with random product states added.

use erbound::cha::{solve_simplex, ActiveLearningConfig, CandidatePool};
use erbound::states;

fn main() -> erbound::Result<()> {
    let rho = states::werner(2, 0.9)?;
    let cfg = ActiveLearningConfig::desk();

    let basis = CandidatePool::anchors_only(2, 2);
    let sol = solve_simplex(&rho, &basis, &cfg)?;
    println!("basis only: {:.5} bits, FW gap {:.1e} nats", sol.objective_bits(), sol.fw_gap_nats);

    for size in [50, 200, 800] {
        let pool = CandidatePool::with_fresh(2, 2, size, 7);
        let sol = solve_simplex(&rho, &pool, &cfg)?;
        println!(
            "{size:>4} candidates: {:.5} bits with {} in the support",
            sol.objective_bits(),
            sol.support().count()
        );
    }
    Ok(())
}
