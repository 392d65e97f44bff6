//! Upper and lower polynomial bounds that drop all interactions on a pair.

use binmrf::approx::{bound_remove_pair_with, BoundDirection};
use binmrf::elimination::TruncatedScoreSplit;
use binmrf::{InteractionSet, PseudoBooleanFunction};

fn main() -> binmrf::Result<()> {
    let f = PseudoBooleanFunction::from_terms(
        5,
        [
            (InteractionSet::pair(0, 1), 1.0),
            (InteractionSet::new([0, 1, 2])?, -1.5),
            (InteractionSet::new([0, 1, 3])?, 0.7),
            (InteractionSet::new([0, 1, 2, 4])?, 0.9),
        ],
    )?;
    for (dir, cap) in [(BoundDirection::Upper, 25), (BoundDirection::Lower, 25), (BoundDirection::Upper, 1)] {
        let (b, report) = bound_remove_pair_with(&f, 0, 1, dir, cap, &TruncatedScoreSplit)?;
        let mut worst = f64::INFINITY;
        for mask in 0..32usize {
            let x: Vec<u8> = (0..5).map(|k| ((mask >> k) & 1) as u8).collect();
            let gap = match dir {
                BoundDirection::Upper => b.evaluate(&x)? - f.evaluate(&x)?,
                BoundDirection::Lower => f.evaluate(&x)? - b.evaluate(&x)?,
            };
            worst = worst.min(gap);
        }
        println!(
            "{dir:?} cap {cap}: {} parts, splits {:?}, {} terms, smallest slack {worst:.3e}",
            report.parts,
            report.splits,
            b.len()
        );
    }
    Ok(())
}
