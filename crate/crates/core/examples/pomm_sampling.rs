//! Turn an elimination pass into a directly samplable surrogate and draw
//! from it.

use binmrf::models::build_ising;
use binmrf::{eliminate, EliminationConfig, LatticeSpec, Mode, PommVariant};

fn main() -> binmrf::Result<()> {
    let model = build_ising(LatticeSpec::new(5, 5)?, 0.4);
    let cfg = EliminationConfig::with_mode(Mode::Approximate, 3).pomm(PommVariant::PostApproximation);
    let result = eliminate(&model.energy, &cfg)?;
    let pomm = result.pomm.expect("requested a surrogate");
    println!("ln c approx {:.6}, at most {} dependencies per variable", result.log_value, pomm.max_dependencies());

    let batch = pomm.sample(42, 10_000);
    let mean: f64 = batch.states.iter().flatten().map(|&v| f64::from(v)).sum::<f64>()
        / (batch.len() * model.n()) as f64;
    println!("mean site value {mean:.4}");
    for (x, ld) in batch.states.iter().zip(&batch.log_densities).take(3) {
        let s: String = x.iter().map(|v| char::from(b'0' + v)).collect();
        println!("{s} ln q = {ld:.4}");
    }
    Ok(())
}
