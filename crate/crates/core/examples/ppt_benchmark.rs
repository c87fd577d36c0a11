//! The PPT solver on its own: closed-form agreement on 2 ⊗ 2 Werner states
//! and the Dykstra projection of a Bell state.

use erbound::{analytic, ppt, states};

fn main() -> erbound::Result<()> {
    for k in 5..=10 {
        let a = k as f64 / 10.0;
        let sol = ppt::ppt_relative_entropy(&states::werner(2, a)?, 1e-7, 3000)?;
        println!(
            "werner {a:.1}: ppt {:.6} exact {:.6} ({} steps, converged {})",
            sol.value_bits,
            analytic::werner_er(2, a)?.value_bits,
            sol.iterations,
            sol.converged
        );
    }

    let bell = states::max_entangled(2)?;
    let proj = ppt::project_feasible(bell.op(), 2, 2, 1e-12, 10_000)?;
    println!(
        "Bell projects at Frobenius distance {:.6} after {} sweeps",
        (&proj.matrix - bell.op()).frobenius_norm(),
        proj.sweeps
    );
    Ok(())
}
