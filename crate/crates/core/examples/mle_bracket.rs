//! Bracket the maximum-likelihood interaction parameter of an Ising model
//! from lower and upper bounds on the log normalising constant.

use binmrf::apps::{gibbs_sampler, mle_bracket};
use binmrf::models::{build_ising, ModelFamily};
use binmrf::LatticeSpec;

fn main() -> binmrf::Result<()> {
    let lattice = LatticeSpec::new(8, 8)?;
    let truth = build_ising(lattice, 0.5);
    let observed = gibbs_sampler(&truth, 1_000, 500, 1, 11)?.states.pop().unwrap();
    let grid: Vec<f64> = (0..11).map(|k| 0.1 * k as f64).collect();
    let bracket = mle_bracket(&observed, ModelFamily::Ising, lattice, &grid, &[3, 5, 8], 11)?;
    for (k, round) in bracket.rounds.iter().enumerate() {
        println!(
            "round {k} (nu {}): [{:.4}, {:.4}]",
            round.nu, round.theta_lo, round.theta_hi
        );
    }
    println!("final bracket [{:.4}, {:.4}]", bracket.theta_lo, bracket.theta_hi);
    Ok(())
}
