//! Most probable state of a random lattice model, exactly and through bounds.

use binmrf::elimination::eliminate_max;
use binmrf::models::build_2x2_rotinv;
use binmrf::{LatticeSpec, Mode};

fn main() -> binmrf::Result<()> {
    let model = build_2x2_rotinv(LatticeSpec::new(6, 6)?, &[0.4, -0.3, 0.6, -1.2, 0.2])?;
    let exact = eliminate_max(&model.energy, Mode::Exact, 36)?;
    println!("max energy {:.6}", exact.log_value);
    for r in exact.argmax.unwrap().chunks(6) {
        println!("{}", r.iter().map(|v| if *v == 1 { '#' } else { '.' }).collect::<String>());
    }
    for nu in 1..=3 {
        let lo = eliminate_max(&model.energy, Mode::LowerBound, nu)?.log_value;
        let hi = eliminate_max(&model.energy, Mode::UpperBound, nu)?.log_value;
        println!("nu {nu}: [{lo:.6}, {hi:.6}]");
    }
    Ok(())
}
