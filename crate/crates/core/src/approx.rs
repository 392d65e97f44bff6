//! Least-squares approximation and bounding of pseudo-Boolean functions.
//!
//! All approximations minimise the error sum of squares over `{0,1}^n`
//! among functions represented on a dense subfamily of `S`.
//!
//! - [`least_squares_project`] solves the normal equations directly. It is
//!   an oracle for the closed forms below and is capped at 15 variables.
//! - [`remove_single_interaction`] drops one maximal interaction and pushes
//!   its weight onto all its proper subsets.
//! - [`soir`] removes every interaction containing a pair `{i, j}` at once.
//! - [`bound_remove_pair`] removes the same interactions but returns an
//!   upper or lower bound instead of the least-squares fit, splitting the
//!   bounded term when it spans more variables than a table cap allows.

use std::collections::HashSet;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pbf::{
    add_local_coefficients, local_coefficients, mobius, subset_sum, DenseLocalFunction,
    InteractionSet, PseudoBooleanFunction, PRUNE_TOL, TABLE_CAP,
};

/// Largest `n` accepted by [`least_squares_project`].
pub const PROJECTION_MAX_VARS: usize = 15;

/// What an approximation step removed and what it cost.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApproximationReport {
    pub removed: Vec<InteractionSet>,
    /// Error sum of squares; `None` when it could not be computed within the table cap
    /// or overflows.
    pub sse: Option<f64>,
    pub partner: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundDirection {
    Upper,
    Lower,
}

/// Least-squares projection of `f` onto functions represented on `target`.
pub fn least_squares_project(
    f: &PseudoBooleanFunction,
    target: &[InteractionSet],
) -> Result<PseudoBooleanFunction> {
    let n = f.n();
    if n > PROJECTION_MAX_VARS {
        return Err(Error::TooManyVariables {
            n,
            limit: PROJECTION_MAX_VARS,
        });
    }
    let mut target: Vec<InteractionSet> = target.to_vec();
    target.sort();
    target.dedup();
    check_dense(&target)?;
    for set in &target {
        if !f.contains(set) {
            return Err(Error::NotSubset(set.to_string()));
        }
    }
    let m = target.len();
    if m == 0 {
        return Ok(PseudoBooleanFunction::new(n));
    }
    // Normal equations scaled by 2^-n: sum_{x in Omega_a} prod_{k in b} x_k = 2^{n - |a ∪ b|}.
    let weight = |a: &InteractionSet, b: &InteractionSet| 0.5f64.powi(a.union(b).len() as i32);
    let gram = DMatrix::from_fn(m, m, |r, c| weight(&target[r], &target[c]));
    let terms = f.terms();
    let rhs = DVector::from_fn(m, |r, _| {
        terms
            .iter()
            .map(|(set, beta)| beta * weight(&target[r], set))
            .sum::<f64>()
    });
    let solution = gram
        .cholesky()
        .ok_or_else(|| Error::InvalidArgument("singular normal equations".into()))?
        .solve(&rhs);
    PseudoBooleanFunction::from_terms(n, target.into_iter().zip(solution.iter().copied()))
}

fn check_dense(family: &[InteractionSet]) -> Result<()> {
    let members: HashSet<&InteractionSet> = family.iter().collect();
    for set in family {
        for &k in set.indices() {
            if !members.contains(&set.without(k)) {
                return Err(Error::NotDense(set.to_string()));
            }
        }
    }
    Ok(())
}

/// Removes the maximal interaction `lambda`, distributing its coefficient onto
/// every proper subset: `beta_L += (-1)^{|lambda|-1-|L|} 2^{|L|-|lambda|} beta_lambda`.
pub fn remove_single_interaction(
    f: &PseudoBooleanFunction,
    lambda: &InteractionSet,
) -> Result<(PseudoBooleanFunction, ApproximationReport)> {
    let mut out = f.clone();
    let report = remove_single_in_place(&mut out, lambda)?;
    Ok((out, report))
}

fn remove_single_in_place(
    f: &mut PseudoBooleanFunction,
    lambda: &InteractionSet,
) -> Result<ApproximationReport> {
    if !f.contains(lambda) {
        return Err(Error::MissingInteraction(lambda.to_string()));
    }
    if !f.children(lambda).is_empty() {
        return Err(Error::HasSuperset(lambda.to_string()));
    }
    let removed = f.remove_supersets(lambda);
    let beta = removed[0].1;
    let d = lambda.len();
    for mask in 0..(1usize << d) - 1 {
        let sub = lambda.subset_from_mask(mask);
        let gap = d - sub.len();
        let sign = if (gap - 1).is_multiple_of(2) { 1.0 } else { -1.0 };
        f.add_unchecked(&sub, sign * 0.5f64.powi(gap as i32) * beta);
    }
    // The residual is beta * prod_{k in lambda} (x_k - 1/2), so the SSE is beta^2 2^n 4^-|lambda|.
    let sse = beta * beta * 2f64.powi(f.n() as i32 - 2 * d as i32);
    Ok(ApproximationReport {
        removed: vec![lambda.clone()],
        sse: sse.is_finite().then_some(sse),
        partner: None,
    })
}

/// Removes every interaction in `to_remove` one at a time, highest degree
/// first and lexicographically smallest first among equal degrees. The
/// removed family must be closed under supersets within `S`.
pub fn remove_interactions(
    f: &PseudoBooleanFunction,
    to_remove: &[InteractionSet],
) -> Result<(PseudoBooleanFunction, ApproximationReport)> {
    let mut order: Vec<InteractionSet> = to_remove.to_vec();
    order.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.indices().cmp(b.indices())));
    order.dedup();
    let mut out = f.clone();
    let mut total = Some(0.0);
    for lambda in &order {
        let report = remove_single_in_place(&mut out, lambda)?;
        total = match (total, report.sse) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
    }
    Ok((
        out,
        ApproximationReport {
            removed: order,
            sse: total,
            partner: None,
        },
    ))
}

/// Second-order interaction removal: the least-squares approximation of `f`
/// on `S \ S_{i,j}`.
pub fn soir(
    f: &PseudoBooleanFunction,
    i: usize,
    j: usize,
) -> Result<(PseudoBooleanFunction, ApproximationReport)> {
    let mut out = f.clone();
    let removed = soir_in_place(&mut out, i, j)?;
    let sse = soir_sse(f.n(), i, j, &removed);
    Ok((
        out,
        ApproximationReport {
            removed: removed.into_iter().map(|(s, _)| s).collect(),
            sse,
            partner: Some(j),
        },
    ))
}

/// In-place SOIR. Returns the removed `S_{i,j}` terms.
pub(crate) fn soir_in_place(
    f: &mut PseudoBooleanFunction,
    i: usize,
    j: usize,
) -> Result<Vec<(InteractionSet, f64)>> {
    let pair = checked_pair(f, i, j)?;
    let removed = f.remove_supersets(&pair);
    let mut touched = Vec::with_capacity(3 * removed.len());
    // x_i x_j = (x_i - 1/2)(x_j - 1/2) + x_i/2 + x_j/2 - 1/4; the first product is the residual.
    for (set, beta) in &removed {
        let rest = set.difference(&pair);
        let with_i = rest.with(i);
        let with_j = rest.with(j);
        f.add_unchecked(&with_i, 0.5 * beta);
        f.add_unchecked(&with_j, 0.5 * beta);
        f.add_unchecked(&rest, -0.25 * beta);
        touched.extend([with_i, with_j, rest]);
    }
    f.prune_sets(&touched, PRUNE_TOL);
    Ok(removed)
}

/// `(1/4) sum_{x in Omega_{ij}} g(x)^2` where `g` is the stripped `S_{ij}` sum,
/// evaluated over the `d` extra variables only.
fn soir_sse(n: usize, i: usize, j: usize, removed: &[(InteractionSet, f64)]) -> Option<f64> {
    let pair = InteractionSet::pair(i, j);
    let (vars, mut values) = local_coefficients(removed, &pair).ok()?;
    subset_sum(&mut values);
    let sum_sq: f64 = values.iter().map(|v| v * v).sum();
    let sse = 0.25 * sum_sq * 2f64.powi(n as i32 - 2 - vars.len() as i32);
    sse.is_finite().then_some(sse)
}

fn checked_pair(f: &PseudoBooleanFunction, i: usize, j: usize) -> Result<InteractionSet> {
    if i == j {
        return Err(Error::InvalidArgument(format!("pair needs i != j, got {i}")));
    }
    let pair = InteractionSet::pair(i, j);
    if !f.contains(&pair) {
        return Err(Error::MissingInteraction(pair.to_string()));
    }
    Ok(pair)
}

/// Error sum of squares over all of `{0,1}^n`.
pub fn sse(f: &PseudoBooleanFunction, g: &PseudoBooleanFunction) -> Result<f64> {
    if f.n() > TABLE_CAP {
        return Err(Error::TooManyVariables {
            n: f.n(),
            limit: TABLE_CAP,
        });
    }
    let diff = PseudoBooleanFunction::add_scaled(f, g, 1.0, -1.0)?;
    let table = DenseLocalFunction::from_interactions(&diff, (0..f.n()).collect())?;
    Ok(table.values().iter().map(|v| v * v).sum())
}

/// One group of bounded terms during recursive splitting.
pub struct SplitPart<'a> {
    /// Variables common to every term of the part, including `i` and `j`.
    pub fixed: &'a InteractionSet,
    /// The terms with `fixed` stripped off.
    pub terms: &'a [(InteractionSet, f64)],
    /// 0 for the first split, increasing with nesting.
    pub depth: usize,
}

impl SplitPart<'_> {
    /// Sorted variables of the part's stripped terms.
    pub fn variables(&self) -> Vec<usize> {
        let mut vars: Vec<usize> = self
            .terms
            .iter()
            .flat_map(|(s, _)| s.indices().iter().copied())
            .collect();
        vars.sort_unstable();
        vars.dedup();
        vars
    }
}

/// Chooses the variable on which an oversized bound term is split.
pub trait SplitHeuristic {
    /// Must return one of `part.variables()`.
    fn choose(&self, part: &SplitPart<'_>) -> usize;
}

/// Splits on the smallest-index variable of the part.
#[derive(Clone, Copy, Debug, Default)]
pub struct SmallestIndexSplit;

impl SplitHeuristic for SmallestIndexSplit {
    fn choose(&self, part: &SplitPart<'_>) -> usize {
        part.variables()[0]
    }
}

/// Outcome of a bound construction.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct BoundReport {
    pub removed: Vec<InteractionSet>,
    /// Number of `max`/`min` terms canonicalised (1 when no split was needed).
    pub parts: usize,
    /// Variables split on, in the order chosen.
    pub splits: Vec<usize>,
}

/// Upper or lower bound of `f` with no interaction containing both `i` and `j`,
/// splitting on the smallest-index variable when needed.
pub fn bound_remove_pair(
    f: &PseudoBooleanFunction,
    i: usize,
    j: usize,
    dir: BoundDirection,
    table_cap: usize,
) -> Result<PseudoBooleanFunction> {
    bound_remove_pair_with(f, i, j, dir, table_cap, &SmallestIndexSplit).map(|(g, _)| g)
}

/// As [`bound_remove_pair`] with a caller-supplied split heuristic.
pub fn bound_remove_pair_with(
    f: &PseudoBooleanFunction,
    i: usize,
    j: usize,
    dir: BoundDirection,
    table_cap: usize,
    heuristic: &dyn SplitHeuristic,
) -> Result<(PseudoBooleanFunction, BoundReport)> {
    let mut out = f.clone();
    let report = bound_in_place(&mut out, i, j, dir, table_cap, heuristic)?;
    Ok((out, report))
}

pub(crate) fn bound_in_place(
    f: &mut PseudoBooleanFunction,
    i: usize,
    j: usize,
    dir: BoundDirection,
    table_cap: usize,
    heuristic: &dyn SplitHeuristic,
) -> Result<BoundReport> {
    let pair = checked_pair(f, i, j)?;
    let removed = f.remove_supersets(&pair);
    let stripped: Vec<(InteractionSet, f64)> = removed
        .iter()
        .map(|(s, b)| (s.difference(&pair), *b))
        .collect();
    let mut report = BoundReport {
        removed: removed.into_iter().map(|(s, _)| s).collect(),
        ..Default::default()
    };
    let mut touched: Vec<InteractionSet> = report
        .removed
        .iter()
        .flat_map(|s| [s.without(i), s.without(j)])
        .collect();
    let cap = table_cap.min(TABLE_CAP);
    let anchor = InteractionSet::singleton(i);
    bound_part(
        f,
        &anchor,
        &pair,
        stripped,
        dir,
        cap,
        heuristic,
        0,
        &mut report,
        &mut touched,
    );
    f.prune_sets(&touched, PRUNE_TOL);
    Ok(report)
}

/// Replaces `x_fixed * h(x)` by `x_anchor * max{0, h(x)}` (or `min`), splitting
/// `h` on a chosen variable `v` into `x_v h_1 + h_2` while it spans more than `cap`
/// variables. Each split drops `v` from both halves, so the recursion terminates.
#[allow(clippy::too_many_arguments)]
fn bound_part(
    f: &mut PseudoBooleanFunction,
    anchor: &InteractionSet,
    fixed: &InteractionSet,
    terms: Vec<(InteractionSet, f64)>,
    dir: BoundDirection,
    cap: usize,
    heuristic: &dyn SplitHeuristic,
    depth: usize,
    report: &mut BoundReport,
    touched: &mut Vec<InteractionSet>,
) {
    if terms.is_empty() {
        return;
    }
    let part = SplitPart {
        fixed,
        terms: &terms,
        depth,
    };
    let vars = part.variables();
    if vars.len() <= cap {
        let (vars, mut values) =
            local_coefficients(&terms, &InteractionSet::empty()).expect("within table cap");
        subset_sum(&mut values);
        for v in values.iter_mut() {
            *v = match dir {
                BoundDirection::Upper => v.max(0.0),
                BoundDirection::Lower => v.min(0.0),
            };
        }
        mobius(&mut values);
        touched.extend(add_local_coefficients(f, &vars, &values, anchor));
        report.parts += 1;
        return;
    }
    let mut v = heuristic.choose(&part);
    if vars.binary_search(&v).is_err() {
        v = vars[0];
    }
    report.splits.push(v);
    let (with_v, rest): (Vec<_>, Vec<_>) = terms.into_iter().partition(|(s, _)| s.contains(v));
    let with_v = with_v.into_iter().map(|(s, b)| (s.without(v), b)).collect();
    bound_part(
        f,
        anchor,
        &fixed.with(v),
        with_v,
        dir,
        cap,
        heuristic,
        depth + 1,
        report,
        touched,
    );
    bound_part(
        f, anchor, fixed, rest, dir, cap, heuristic, depth + 1, report, touched,
    );
}
