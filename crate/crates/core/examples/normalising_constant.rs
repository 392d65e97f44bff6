//! Exact, approximate and bounded log normalising constants of an Ising
//! model as the neighbourhood cap grows.

use binmrf::approx::BoundDirection;
use binmrf::elimination::{eliminate_approx, eliminate_bound, eliminate_exact_sum};
use binmrf::models::build_ising;
use binmrf::LatticeSpec;

fn main() -> binmrf::Result<()> {
    let model = build_ising(LatticeSpec::new(6, 6)?, 0.6);
    let exact = eliminate_exact_sum(&model)?;
    println!("exact ln c = {:.10} (largest neighbourhood {})", exact.log_value, exact.max_eta_before());
    println!("{:>3} {:>14} {:>14} {:>14} {:>10}", "nu", "approx", "lower", "upper", "gap");
    for nu in 1..=6 {
        let approx = eliminate_approx(&model, nu)?.log_value;
        let lower = eliminate_bound(&model, nu, BoundDirection::Lower)?.log_value;
        let upper = eliminate_bound(&model, nu, BoundDirection::Upper)?.log_value;
        println!("{nu:>3} {approx:>14.8} {lower:>14.8} {upper:>14.8} {:>10.2e}", upper - lower);
    }
    Ok(())
}
