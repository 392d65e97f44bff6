//! Systematic-scan Gibbs sampling of a higher-order lattice model.

use binmrf::apps::gibbs_sampler;
use binmrf::models::build_higher_order;
use binmrf::LatticeSpec;

fn main() -> binmrf::Result<()> {
    let potentials = [0.5, 0.0, 0.0, -1.0, 0.0, -1.5, 0.0, 0.0, -0.5, -0.5];
    let model = build_higher_order(LatticeSpec::new(10, 10)?, &potentials)?;
    let batch = gibbs_sampler(&model, 2_000, 200, 20, 5)?;
    for (x, energy) in batch.states.iter().zip(&batch.log_densities).step_by(20) {
        let ones = x.iter().filter(|&&v| v == 1).count();
        println!("{ones:>3} ones, energy {energy:.3}");
    }
    Ok(())
}
