//! Exact samples from an Ising model by rejection from a capped surrogate.

use binmrf::apps::{rejection_sampler, RejectionOptions};
use binmrf::models::build_ising;
use binmrf::LatticeSpec;

fn main() -> binmrf::Result<()> {
    let model = build_ising(LatticeSpec::new(6, 6)?, 0.4);
    for nu in [2, 4, 6] {
        let out = rejection_sampler(&model, nu, 7, 2_000, RejectionOptions::default())?;
        println!(
            "nu {nu}: acceptance {:.4} over {} trials, ln k = {:.4}",
            out.acceptance_rate, out.trials, out.ln_k
        );
    }
    Ok(())
}
