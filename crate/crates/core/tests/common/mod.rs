//! Brute-force oracles shared by the integration tests. None of them go
//! through the DAG evaluator or the elimination engine.

#![allow(dead_code)]

pub mod checks;

use binmrf::models::ModelFamily;
use binmrf::{InteractionSet, LatticeSpec, MarkovRandomField, PseudoBooleanFunction};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn state(mask: usize, n: usize) -> Vec<u8> {
    (0..n).map(|k| (mask >> k & 1) as u8).collect()
}

pub fn mask_of(x: &[u8]) -> usize {
    x.iter().enumerate().fold(0, |m, (k, &b)| m | (usize::from(b) << k))
}

/// Monomials as bitmasks for fast exhaustive evaluation.
pub struct MaskPoly {
    pub n: usize,
    terms: Vec<(u32, f64)>,
}

impl MaskPoly {
    pub fn new(f: &PseudoBooleanFunction) -> Self {
        assert!(f.n() <= 32);
        let terms = f
            .terms()
            .into_iter()
            .map(|(s, b)| (s.indices().iter().fold(0u32, |m, &k| m | 1 << k), b))
            .collect();
        MaskPoly { n: f.n(), terms }
    }

    pub fn at(&self, mask: usize) -> f64 {
        let m = mask as u32;
        self.terms
            .iter()
            .filter(|(t, _)| t & m == *t)
            .map(|(_, b)| b)
            .sum()
    }

    pub fn table(&self) -> Vec<f64> {
        (0..1usize << self.n).map(|m| self.at(m)).collect()
    }
}

pub fn log_sum_exp(v: &[f64]) -> f64 {
    let top = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    top + v.iter().map(|x| (x - top).exp()).sum::<f64>().ln()
}

/// `ln sum_x exp f(x)`.
pub fn brute_log_partition(f: &PseudoBooleanFunction) -> f64 {
    log_sum_exp(&MaskPoly::new(f).table())
}

/// `(max_x f(x), first maximiser)`.
pub fn brute_max(f: &PseudoBooleanFunction) -> (f64, Vec<u8>) {
    let t = MaskPoly::new(f).table();
    let (m, v) = t
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |b, (m, &v)| if v > b.1 { (m, v) } else { b });
    (v, state(m, f.n()))
}

/// `p(x) ∝ exp f(x)` indexed by state mask.
pub fn brute_probs(f: &PseudoBooleanFunction) -> Vec<f64> {
    let t = MaskPoly::new(f).table();
    let z = log_sum_exp(&t);
    t.iter().map(|v| (v - z).exp()).collect()
}

pub fn empirical<'a>(states: impl IntoIterator<Item = &'a Vec<u8>>, n: usize) -> Vec<f64> {
    let mut counts = vec![0.0; 1 << n];
    let mut total = 0.0;
    for x in states {
        counts[mask_of(x)] += 1.0;
        total += 1.0;
    }
    counts.iter().map(|c| c / total).collect()
}

pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Sum of `f - g` over states with every variable of `lambda` on.
pub fn omega_sum(diff: &[f64], lambda: &InteractionSet) -> f64 {
    let lm = lambda.indices().iter().fold(0usize, |m, &k| m | 1 << k);
    diff.iter()
        .enumerate()
        .filter(|(m, _)| m & lm == lm)
        .map(|(_, v)| v)
        .sum()
}

/// Random polynomial with up to `terms` monomials of order at most `max_order`.
pub fn random_pbf(
    rng: &mut StdRng,
    n: usize,
    terms: usize,
    max_order: usize,
    scale: f64,
) -> PseudoBooleanFunction {
    let vars: Vec<usize> = (0..n).collect();
    let list = (0..terms).map(|_| {
        let k = rng.gen_range(0..=max_order.min(n));
        let mut s: Vec<usize> = vars.choose_multiple(rng, k).copied().collect();
        s.sort_unstable();
        (InteractionSet::new(s).unwrap(), rng.gen_range(-scale..scale))
    });
    PseudoBooleanFunction::from_terms(n, list).unwrap()
}

/// A dense subfamily of the support of `f`: drops every superset of a few
/// randomly chosen non-empty sets.
pub fn random_dense_subfamily(rng: &mut StdRng, f: &PseudoBooleanFunction, cuts: usize) -> Vec<InteractionSet> {
    let sets: Vec<InteractionSet> = f.terms().into_iter().map(|(s, _)| s).collect();
    let candidates: Vec<&InteractionSet> = sets.iter().filter(|s| !s.is_empty()).collect();
    if candidates.is_empty() {
        return sets;
    }
    let chosen: Vec<InteractionSet> = (0..cuts)
        .map(|_| (*candidates.choose(rng).unwrap()).clone())
        .collect();
    sets.iter()
        .filter(|s| !chosen.iter().any(|c| c.is_subset_of(s)))
        .cloned()
        .collect()
}

/// A random model from the four lattice families with interactions.
pub fn random_model(rng: &mut StdRng, max_rows: usize, max_cols: usize) -> MarkovRandomField {
    let family = [
        ModelFamily::Ising,
        ModelFamily::Autologistic,
        ModelFamily::HigherOrder,
        ModelFamily::RotInv2x2,
    ][rng.gen_range(0..4)];
    let rows = rng.gen_range(2..=max_rows);
    let cols = rng.gen_range(2..=max_cols);
    random_model_of(rng, family, rows, cols)
}

pub fn random_model_of(
    rng: &mut StdRng,
    family: ModelFamily,
    rows: usize,
    cols: usize,
) -> MarkovRandomField {
    let params: Vec<f64> = (0..family.param_count())
        .map(|_| rng.gen_range(-1.0..1.0))
        .collect();
    family
        .build(LatticeSpec::new(rows, cols).unwrap(), &params)
        .unwrap()
}

/// Energy summed clique by clique from the class rules, independent of the
/// polynomial form.
pub fn direct_energy(family: ModelFamily, lat: LatticeSpec, params: &[f64], x: &[u8]) -> f64 {
    let at = |r: usize, c: usize| x[r * lat.cols + c];
    let mut u = 0.0;
    let mut edges = Vec::new();
    for r in 0..lat.rows {
        for c in 0..lat.cols {
            if c + 1 < lat.cols {
                edges.push((at(r, c), at(r, c + 1)));
            }
            if r + 1 < lat.rows {
                edges.push((at(r, c), at(r + 1, c)));
            }
        }
    }
    let blocks = || {
        (0..lat.rows.saturating_sub(1)).flat_map(move |r| {
            (0..lat.cols.saturating_sub(1))
                .map(move |c| [at(r, c), at(r, c + 1), at(r + 1, c), at(r + 1, c + 1)])
        })
    };
    match family {
        ModelFamily::Ising => {
            for (a, b) in edges {
                u += params[0] * f64::from(u8::from(a == b));
            }
        }
        ModelFamily::Independence => {
            u = params[0] * x.iter().map(|&v| f64::from(v)).sum::<f64>();
        }
        ModelFamily::Autologistic => {
            for (a, b) in edges {
                u += params[0] * f64::from(u8::from(a != b));
                u += params[1] * f64::from(u8::from(a == 1 && b == 1));
            }
        }
        ModelFamily::RotInv2x2 => {
            for [tl, tr, bl, br] in blocks() {
                let ones = tl + tr + bl + br;
                u += match ones {
                    0 => 0.0,
                    1 => params[0],
                    2 if tl == br => params[2],
                    2 => params[1],
                    3 => params[3],
                    _ => params[4],
                };
            }
        }
        ModelFamily::HigherOrder => {
            for [tl, tr, bl, br] in blocks() {
                let ones = tl + tr + bl + br;
                u += match ones {
                    0 | 4 => params[0],
                    1 | 3 => params[1],
                    _ if tl == br => params[3],
                    _ => params[2],
                };
            }
            for r in 1..lat.rows.saturating_sub(1) {
                for c in 1..lat.cols.saturating_sub(1) {
                    let centre = at(r, c);
                    // up, right, down, left
                    let arms = [at(r - 1, c), at(r, c + 1), at(r + 1, c), at(r, c - 1)];
                    let odd: Vec<usize> = (0..4).filter(|&k| arms[k] != centre).collect();
                    let class = match odd.len() {
                        0 => 0,
                        4 => 1,
                        1 => 2,
                        3 => 4,
                        _ if (odd[1] - odd[0]) % 2 == 1 => 3,
                        _ => 5,
                    };
                    u += params[4 + class];
                }
            }
        }
    }
    u
}
