//! Build a small pseudo-Boolean polynomial, evaluate it and round-trip it
//! through its value table.

use binmrf::pbf::DenseLocalFunction;
use binmrf::{InteractionSet, PseudoBooleanFunction};

fn main() -> binmrf::Result<()> {
    // f(x) = 0.5 + x0 - 2 x0 x1 + 0.75 x0 x1 x2
    let f = PseudoBooleanFunction::from_terms(
        3,
        [
            (InteractionSet::empty(), 0.5),
            (InteractionSet::singleton(0), 1.0),
            (InteractionSet::pair(0, 1), -2.0),
            (InteractionSet::new([0, 1, 2])?, 0.75),
        ],
    )?;
    println!("degree {}, {} stored sets, dense: {}", f.degree(), f.len(), f.is_dense());
    for mask in 0..8usize {
        let x: Vec<u8> = (0..3).map(|k| ((mask >> k) & 1) as u8).collect();
        println!("f({x:?}) = {}", f.evaluate(&x)?);
    }

    let table = DenseLocalFunction::from_interactions(&f, vec![0, 1, 2])?;
    let back = table.to_interactions(3)?;
    println!("values {:?}", table.values());
    println!("x0 x1 coefficient after round trip: {}", back.beta(&InteractionSet::pair(0, 1)));
    println!("neighbours of x2: {:?}", f.neighbours(2));
    println!("{}", f.to_json());
    Ok(())
}
