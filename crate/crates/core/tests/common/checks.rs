//! Reusable checks returning a description of the first discrepancy.

use binmrf::approx::{
    bound_remove_pair, least_squares_project, remove_interactions, remove_single_interaction,
    soir, BoundDirection,
};
use binmrf::{InteractionSet, PseudoBooleanFunction};
use rand::rngs::StdRng;
use rand::Rng;

use super::{omega_sum, random_dense_subfamily, random_pbf, MaskPoly};

pub type Check = Result<(), String>;

fn coefficients_match(a: &PseudoBooleanFunction, b: &PseudoBooleanFunction, tol: f64) -> Check {
    let mut sets: Vec<InteractionSet> = a
        .terms()
        .into_iter()
        .chain(b.terms())
        .map(|(s, _)| s)
        .collect();
    sets.sort();
    sets.dedup();
    for s in sets {
        let (x, y) = (a.beta(&s), b.beta(&s));
        if (x - y).abs() > tol {
            return Err(format!("coefficient of {s}: {x} vs {y}"));
        }
    }
    Ok(())
}

fn close_rel(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-12)
}

/// A random function with `{i, j}` present, plus the pair.
pub fn random_with_pair(rng: &mut StdRng, max_n: usize) -> (PseudoBooleanFunction, usize, usize) {
    let n = rng.gen_range(2..=max_n);
    let mut f = random_pbf(rng, n, 10, 4, 2.0);
    let i = rng.gen_range(0..n);
    let mut j = rng.gen_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    let pair = InteractionSet::pair(i, j);
    f.add_term(&pair, rng.gen_range(-1.0..1.0)).unwrap();
    (f, i, j)
}

/// SOIR equals the projection onto the complement of `S_ij`, its pointwise
/// error is `(x_i - 1/2)(x_j - 1/2)` times the stripped sum, and its reported
/// SSE is the exhaustive one.
pub fn soir_against_oracles(f: &PseudoBooleanFunction, i: usize, j: usize) -> Check {
    let pair = InteractionSet::pair(i, j);
    let (g, report) = soir(f, i, j).map_err(|e| e.to_string())?;
    let target: Vec<InteractionSet> = f
        .terms()
        .into_iter()
        .map(|(s, _)| s)
        .filter(|s| !pair.is_subset_of(s))
        .collect();
    let oracle = least_squares_project(f, &target).map_err(|e| e.to_string())?;
    coefficients_match(&g, &oracle, 1e-10)?;

    let n = f.n();
    let (pf, pg) = (MaskPoly::new(f), MaskPoly::new(&g));
    let removed: Vec<(InteractionSet, f64)> = f
        .terms()
        .into_iter()
        .filter(|(s, _)| pair.is_subset_of(s))
        .collect();
    let mut sse = 0.0;
    for m in 0..1usize << n {
        let on = |k: usize| (m >> k & 1) as f64;
        let stripped: f64 = removed
            .iter()
            .filter(|(s, _)| s.indices().iter().all(|&k| m >> k & 1 == 1 || k == i || k == j))
            .map(|(_, b)| b)
            .sum();
        let expected = (on(i) * on(j) + 0.25 - 0.5 * on(i) - 0.5 * on(j)) * stripped;
        let err = pf.at(m) - pg.at(m);
        if (err - expected).abs() > 1e-10 {
            return Err(format!("pointwise error at state {m:#b}: {err} vs {expected}"));
        }
        sse += err * err;
    }
    match report.sse {
        Some(s) if close_rel(s, sse, 1e-8) || (s - sse).abs() < 1e-12 => Ok(()),
        other => Err(format!("reported SSE {other:?} vs exhaustive {sse}")),
    }
}

/// Removing one maximal interaction equals the projection onto the rest.
pub fn single_removal_against_oracle(rng: &mut StdRng, max_n: usize) -> Check {
    let n = rng.gen_range(1..=max_n);
    let f = random_pbf(rng, n, 10, 4, 2.0);
    let maximal: Vec<InteractionSet> = f
        .terms()
        .into_iter()
        .map(|(s, _)| s)
        .filter(|s| !s.is_empty() && f.children(s).is_empty())
        .collect();
    let Some(lambda) = maximal.get(rng.gen_range(0..maximal.len().max(1))).cloned() else {
        return Ok(());
    };
    let (g, report) = remove_single_interaction(&f, &lambda).map_err(|e| e.to_string())?;
    let target: Vec<InteractionSet> = f
        .terms()
        .into_iter()
        .map(|(s, _)| s)
        .filter(|s| *s != lambda)
        .collect();
    let oracle = least_squares_project(&f, &target).map_err(|e| e.to_string())?;
    coefficients_match(&g, &oracle, 1e-10)?;
    let exhaustive = binmrf::approx::sse(&f, &g).map_err(|e| e.to_string())?;
    let reported = report.sse.ok_or("SSE not reported")?;
    if !close_rel(reported, exhaustive, 1e-8) && (reported - exhaustive).abs() > 1e-12 {
        return Err(format!("SSE {reported} vs {exhaustive}"));
    }
    Ok(())
}

fn project(f: &PseudoBooleanFunction, target: &[InteractionSet]) -> Result<PseudoBooleanFunction, String> {
    least_squares_project(f, target).map_err(|e| e.to_string())
}

fn sse(f: &PseudoBooleanFunction, g: &PseudoBooleanFunction) -> f64 {
    binmrf::approx::sse(f, g).unwrap()
}

/// Linearity of the projection.
pub fn projection_linearity(rng: &mut StdRng) -> Check {
    let n = rng.gen_range(2..=6);
    let g = random_pbf(rng, n, 8, 4, 2.0);
    let h = random_pbf(rng, n, 8, 4, 2.0);
    let (a, b) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    // Put g, h and the combination on one common dense support.
    let sets: Vec<InteractionSet> = g.terms().into_iter().chain(h.terms()).map(|(s, _)| s).collect();
    let widen = |f: &PseudoBooleanFunction| {
        let mut w = f.clone();
        for s in &sets {
            w.add_term(s, 0.0).unwrap();
        }
        w
    };
    let (g, h) = (widen(&g), widen(&h));
    let comb = widen(&PseudoBooleanFunction::add_scaled(&g, &h, a, b).unwrap());
    let support = g.clone();
    let target = random_dense_subfamily(rng, &support, 2);
    let lhs = project(&comb, &target)?;
    let rhs = PseudoBooleanFunction::add_scaled(&project(&g, &target)?, &project(&h, &target)?, a, b)
        .unwrap();
    coefficients_match(&lhs, &rhs, 1e-10)
}

/// Projecting in two nested steps equals projecting directly; the
/// sequential single-removal scheme agrees too.
pub fn projection_nesting(rng: &mut StdRng) -> Check {
    let n = rng.gen_range(2..=6);
    let f = random_pbf(rng, n, 10, 4, 2.0);
    let outer = random_dense_subfamily(rng, &f, 1);
    let outer_f = project(&f, &outer)?;
    let inner = random_dense_subfamily(rng, &outer_f, 1);
    let two_step = project(&outer_f, &inner)?;
    let direct = project(&f, &inner)?;
    coefficients_match(&two_step, &direct, 1e-10)?;
    let removed: Vec<InteractionSet> = f
        .terms()
        .into_iter()
        .map(|(s, _)| s)
        .filter(|s| !inner.contains(s))
        .collect();
    let (seq, _) = remove_interactions(&f, &removed).map_err(|e| e.to_string())?;
    coefficients_match(&seq, &direct, 1e-10)
}

/// SSE splits across nested approximations.
pub fn check_sse_additivity(rng: &mut StdRng) -> Check {
    let n = rng.gen_range(2..=6);
    let f = random_pbf(rng, n, 10, 4, 2.0);
    let outer = random_dense_subfamily(rng, &f, 1);
    let f1 = project(&f, &outer)?;
    let inner = random_dense_subfamily(rng, &f1, 1);
    let f2 = project(&f, &inner)?;
    let (lhs, rhs) = (sse(&f, &f2), sse(&f, &f1) + sse(&f1, &f2));
    if close_rel(lhs, rhs, 1e-8) || (lhs - rhs).abs() < 1e-12 {
        Ok(())
    } else {
        Err(format!("SSE {lhs} vs {rhs}"))
    }
}

/// SSE equals the sum over removed sets of `beta` times the error summed over
/// the states where that set is on.
pub fn check_sse_from_removed(rng: &mut StdRng) -> Check {
    let n = rng.gen_range(2..=6);
    let f = random_pbf(rng, n, 10, 4, 2.0);
    let target = random_dense_subfamily(rng, &f, 2);
    let g = project(&f, &target)?;
    let diff: Vec<f64> = {
        let (pf, pg) = (MaskPoly::new(&f), MaskPoly::new(&g));
        (0..1usize << n).map(|m| pf.at(m) - pg.at(m)).collect()
    };
    let rhs: f64 = f
        .terms()
        .into_iter()
        .filter(|(s, _)| !target.contains(s))
        .map(|(s, b)| b * omega_sum(&diff, &s))
        .sum();
    let lhs: f64 = diff.iter().map(|d| d * d).sum();
    if close_rel(lhs, rhs, 1e-8) || (lhs - rhs).abs() < 1e-12 {
        Ok(())
    } else {
        Err(format!("SSE {lhs} vs removed-term sum {rhs}"))
    }
}

/// `f_L <= f <= f_U` everywhere and neither bound keeps an `{i, j}` interaction.
pub fn bound_sandwich(f: &PseudoBooleanFunction, i: usize, j: usize, cap: usize) -> Check {
    let pair = InteractionSet::pair(i, j);
    let upper = bound_remove_pair(f, i, j, BoundDirection::Upper, cap).map_err(|e| e.to_string())?;
    let lower = bound_remove_pair(f, i, j, BoundDirection::Lower, cap).map_err(|e| e.to_string())?;
    for b in [&upper, &lower] {
        if let Some((s, _)) = b.terms().into_iter().find(|(s, _)| pair.is_subset_of(s)) {
            return Err(format!("bound keeps {s}"));
        }
        if !b.is_dense() {
            return Err("bound is not dense".into());
        }
    }
    let (pf, pu, pl) = (MaskPoly::new(f), MaskPoly::new(&upper), MaskPoly::new(&lower));
    for m in 0..1usize << f.n() {
        let (v, u, l) = (pf.at(m), pu.at(m), pl.at(m));
        if l > v + 1e-10 || v > u + 1e-10 {
            return Err(format!("state {m:#b}: {l} <= {v} <= {u} fails"));
        }
    }
    Ok(())
}
