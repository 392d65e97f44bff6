//! Acceptance rate of an independence Metropolis-Hastings sampler that
//! proposes from the surrogate, for growing interaction strength.

use binmrf::apps::{mh_acceptance_rate, GibbsReference};
use binmrf::models::build_ising;
use binmrf::{eliminate, EliminationConfig, LatticeSpec, Mode, PommVariant};

fn main() -> binmrf::Result<()> {
    let reference = GibbsReference { burn_in: 200 };
    for theta in [0.2, 0.4, 0.6, 0.8] {
        let model = build_ising(LatticeSpec::new(6, 6)?, theta);
        let mut line = format!("theta {theta:.1}:");
        for nu in [1, 3, 5] {
            let cfg = EliminationConfig::with_mode(Mode::Approximate, nu).pomm(PommVariant::PreApproximation);
            let pomm = eliminate(&model.energy, &cfg)?.pomm.unwrap();
            let rate = mh_acceptance_rate(&model, &pomm, &reference, 2_000, 1)?;
            line.push_str(&format!("  nu {nu} -> {rate:.3}"));
        }
        println!("{line}");
    }
    Ok(())
}
