//! Remove every interaction containing a chosen pair, in the least-squares
//! sense, and compare the closed form with the generic projection.

use binmrf::approx::{least_squares_project, sse, soir};
use binmrf::{InteractionSet, PseudoBooleanFunction};

fn main() -> binmrf::Result<()> {
    let f = PseudoBooleanFunction::from_terms(
        4,
        [
            (InteractionSet::singleton(0), 0.3),
            (InteractionSet::pair(0, 1), 1.2),
            (InteractionSet::pair(1, 2), -0.4),
            (InteractionSet::new([0, 1, 3])?, 0.8),
            (InteractionSet::new([0, 1, 2, 3])?, -0.5),
        ],
    )?;
    let (g, report) = soir(&f, 0, 1)?;
    println!("removed {:?}", report.removed.iter().map(|s| s.to_string()).collect::<Vec<_>>());
    println!("reported SSE {:?}, exhaustive SSE {}", report.sse, sse(&f, &g)?);

    let keep: Vec<InteractionSet> = f
        .terms()
        .into_iter()
        .map(|(s, _)| s)
        .filter(|s| !(s.contains(0) && s.contains(1)))
        .collect();
    let projected = least_squares_project(&f, &keep)?;
    for (s, b) in g.terms() {
        println!("{s:>12}: closed form {b:+.6}, projection {:+.6}", projected.beta(&s));
    }
    Ok(())
}
