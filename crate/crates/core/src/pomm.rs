//! Partially ordered Markov models produced by elimination.
//!
//! A POMM is a product of conditionals `p(x_i | x_{D_i})`, one per variable in
//! elimination order, where every dependency of `x_i` is eliminated later. It
//! is sampled by a backward pass and its density is exact.

use std::io::{Read, Write};

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pbf::{add_local_coefficients, mobius, InteractionSet, PseudoBooleanFunction, PRUNE_TOL};
use crate::rng::{self, StreamRng};
use crate::{fmt_real, softplus};

const SAMPLE_MAGIC: [u8; 4] = *b"BMSB";

/// `P(x_var = 1 | x_deps)` stored as a log-odds table. Bit `k` of the table
/// index is the value of `deps[k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Conditional {
    var: usize,
    deps: Vec<usize>,
    logits: Vec<f64>,
}

impl Conditional {
    pub fn from_logits(var: usize, deps: Vec<usize>, logits: Vec<f64>) -> Result<Self> {
        if deps.len() >= usize::BITS as usize || logits.len() != 1usize << deps.len() {
            return Err(Error::MalformedPomm(format!(
                "table for variable {var} has {} rows for {} dependencies",
                logits.len(),
                deps.len()
            )));
        }
        if !deps.windows(2).all(|w| w[0] < w[1]) || deps.contains(&var) {
            return Err(Error::MalformedPomm(format!(
                "dependencies of variable {var} must be sorted, distinct and exclude it"
            )));
        }
        if logits.iter().any(|l| l.is_nan()) {
            return Err(Error::MalformedPomm(format!("NaN in table for variable {var}")));
        }
        Ok(Conditional { var, deps, logits })
    }

    /// Table of `P(x_var = 1 | ·)`; every entry must lie in `[0, 1]`.
    pub fn from_probabilities(var: usize, deps: Vec<usize>, probs: &[f64]) -> Result<Self> {
        let mut logits = Vec::with_capacity(probs.len());
        for &p in probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::MalformedPomm(format!(
                    "probability {p} for variable {var} is outside [0, 1]"
                )));
            }
            logits.push(p.ln() - (-p).ln_1p());
        }
        Self::from_logits(var, deps, logits)
    }

    pub fn var(&self) -> usize {
        self.var
    }

    pub fn deps(&self) -> &[usize] {
        &self.deps
    }

    pub fn logits(&self) -> &[f64] {
        &self.logits
    }

    fn row(&self, x: &[u8]) -> usize {
        self.deps
            .iter()
            .enumerate()
            .fold(0, |acc, (b, &k)| acc | (usize::from(x[k] == 1) << b))
    }

    pub fn logit_given(&self, x: &[u8]) -> f64 {
        self.logits[self.row(x)]
    }

    pub fn prob_one(&self, x: &[u8]) -> f64 {
        sigmoid(self.logit_given(x))
    }

    /// `ln p(x_var | x_deps)`.
    pub fn log_prob(&self, x: &[u8]) -> f64 {
        let l = self.logit_given(x);
        if x[self.var] == 1 {
            -softplus(-l)
        } else {
            -softplus(l)
        }
    }
}

fn sigmoid(l: f64) -> f64 {
    if l >= 0.0 {
        1.0 / (1.0 + (-l).exp())
    } else {
        let e = l.exp();
        e / (1.0 + e)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartiallyOrderedMarkovModel {
    n: usize,
    conditionals: Vec<Conditional>,
}

impl PartiallyOrderedMarkovModel {
    /// Conditionals in elimination order. Each variable appears once and depends
    /// only on variables listed after it.
    pub fn new(n: usize, conditionals: Vec<Conditional>) -> Result<Self> {
        if conditionals.len() != n {
            return Err(Error::MalformedPomm(format!(
                "{} conditionals for {n} variables",
                conditionals.len()
            )));
        }
        let mut position = vec![usize::MAX; n];
        for (t, c) in conditionals.iter().enumerate() {
            if c.var >= n || position[c.var] != usize::MAX {
                return Err(Error::MalformedPomm(format!(
                    "variable {} is out of range or repeated",
                    c.var
                )));
            }
            position[c.var] = t;
        }
        for (t, c) in conditionals.iter().enumerate() {
            if let Some(&d) = c.deps.iter().find(|&&d| d >= n || position[d] <= t) {
                return Err(Error::MalformedPomm(format!(
                    "variable {} depends on {d}, which is not drawn before it",
                    c.var
                )));
            }
        }
        Ok(PartiallyOrderedMarkovModel { n, conditionals })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn conditionals(&self) -> &[Conditional] {
        &self.conditionals
    }

    /// Largest dependency set size.
    pub fn max_dependencies(&self) -> usize {
        self.conditionals.iter().map(|c| c.deps.len()).max().unwrap_or(0)
    }

    /// `ln p~(x)`.
    pub fn log_density(&self, x: &[u8]) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok(self.log_density_unchecked(x))
    }

    pub(crate) fn log_density_unchecked(&self, x: &[u8]) -> f64 {
        self.conditionals.iter().map(|c| c.log_prob(x)).sum()
    }

    /// One backward-pass draw and its log density.
    pub fn sample_with(&self, rng: &mut StreamRng) -> (Vec<u8>, f64) {
        let mut x = vec![0u8; self.n];
        let mut ld = 0.0;
        for c in self.conditionals.iter().rev() {
            let u: f64 = rng.gen();
            x[c.var] = u8::from(u < c.prob_one(&x));
            ld += c.log_prob(&x);
        }
        (x, ld)
    }

    /// `count` draws; draw `k` uses stream `k` of `seed`.
    pub fn sample(&self, seed: u64, count: usize) -> SampleBatch {
        let draws: Vec<(Vec<u8>, f64)> = (0..count)
            .into_par_iter()
            .map(|k| self.sample_with(&mut rng::stream(seed, k as u64)))
            .collect();
        let (states, log_densities) = draws.into_iter().unzip();
        SampleBatch {
            seed,
            n: self.n,
            states,
            log_densities,
        }
    }

    /// `ln p~(x)` as a pseudo-Boolean polynomial.
    pub fn log_density_function(&self) -> PseudoBooleanFunction {
        let mut f = PseudoBooleanFunction::new(self.n);
        let mut touched = Vec::new();
        for c in &self.conditionals {
            // ln p(x_i | D) = x_i l(D) - softplus(l(D)).
            let mut lin = c.logits.clone();
            mobius(&mut lin);
            touched.extend(add_local_coefficients(
                &mut f,
                &c.deps,
                &lin,
                &InteractionSet::singleton(c.var),
            ));
            let mut norm: Vec<f64> = c.logits.iter().map(|&l| -softplus(l)).collect();
            mobius(&mut norm);
            touched.extend(add_local_coefficients(
                &mut f,
                &c.deps,
                &norm,
                &InteractionSet::empty(),
            ));
        }
        f.prune_sets(&touched, PRUNE_TOL);
        f
    }
}

/// States with one log density each.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleBatch {
    pub seed: u64,
    pub n: usize,
    pub states: Vec<Vec<u8>>,
    pub log_densities: Vec<f64>,
}

fn bit_string(x: &[u8]) -> String {
    x.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect()
}

impl SampleBatch {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// `state,log_density` lines under a header.
    pub fn write_text<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "state,log_density")?;
        for (x, ld) in self.states.iter().zip(&self.log_densities) {
            writeln!(w, "{},{}", bit_string(x), fmt_real(*ld))?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let states: Vec<String> = self
            .states
            .iter()
            .map(|x| format!("\"{}\"", bit_string(x)))
            .collect();
        let lds: Vec<String> = self.log_densities.iter().map(|&v| fmt_real(v)).collect();
        format!(
            "{{\"seed\": {}, \"n\": {}, \"states\": [{}], \"log_densities\": [{}]}}",
            self.seed,
            self.n,
            states.join(", "),
            lds.join(", ")
        )
    }

    /// 16-byte header (magic, `n` as u32, count as u64, little endian), then
    /// each state packed LSB-first followed by its log density as f64.
    pub fn write_binary<W: Write>(&self, w: &mut W) -> Result<()> {
        let n = u32::try_from(self.n)
            .map_err(|_| Error::InvalidArgument("state length exceeds u32".into()))?;
        w.write_all(&SAMPLE_MAGIC)?;
        w.write_all(&n.to_le_bytes())?;
        w.write_all(&(self.states.len() as u64).to_le_bytes())?;
        let mut buf = vec![0u8; self.n.div_ceil(8)];
        for (x, ld) in self.states.iter().zip(&self.log_densities) {
            buf.iter_mut().for_each(|b| *b = 0);
            for (k, &bit) in x.iter().enumerate() {
                buf[k / 8] |= (bit & 1) << (k % 8);
            }
            w.write_all(&buf)?;
            w.write_all(&ld.to_le_bytes())?;
        }
        Ok(())
    }

    /// Reads the format of [`SampleBatch::write_binary`]. The seed is not stored.
    pub fn read_binary<R: Read>(r: &mut R, seed: u64) -> Result<Self> {
        let mut header = [0u8; 16];
        r.read_exact(&mut header)?;
        if header[..4] != SAMPLE_MAGIC {
            return Err(Error::InvalidArgument("not a sample file".into()));
        }
        let n = u32::from_le_bytes(header[4..8].try_into().expect("4 bytes")) as usize;
        let count = u64::from_le_bytes(header[8..16].try_into().expect("8 bytes")) as usize;
        let mut buf = vec![0u8; n.div_ceil(8)];
        let mut states = Vec::with_capacity(count.min(1 << 20));
        let mut log_densities = Vec::with_capacity(count.min(1 << 20));
        for _ in 0..count {
            r.read_exact(&mut buf)?;
            states.push((0..n).map(|k| buf[k / 8] >> (k % 8) & 1).collect());
            let mut ld = [0u8; 8];
            r.read_exact(&mut ld)?;
            log_densities.push(f64::from_le_bytes(ld));
        }
        Ok(SampleBatch {
            seed,
            n,
            states,
            log_densities,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_states(n: usize) -> impl Iterator<Item = Vec<u8>> {
        (0..1usize << n).map(move |m| (0..n).map(|k| (m >> k & 1) as u8).collect())
    }

    fn chain() -> PartiallyOrderedMarkovModel {
        let c0 = Conditional::from_probabilities(0, vec![1, 2], &[0.1, 0.5, 0.7, 0.95]).unwrap();
        let c1 = Conditional::from_probabilities(1, vec![2], &[0.3, 0.6]).unwrap();
        let c2 = Conditional::from_probabilities(2, vec![], &[0.4]).unwrap();
        PartiallyOrderedMarkovModel::new(3, vec![c0, c1, c2]).unwrap()
    }

    #[test]
    fn single_fair_variable() {
        let c = Conditional::from_probabilities(0, vec![], &[0.5]).unwrap();
        let p = PartiallyOrderedMarkovModel::new(1, vec![c]).unwrap();
        assert!((p.log_density(&[0]).unwrap() - 0.5f64.ln()).abs() < 1e-15);
        assert!((p.log_density(&[1]).unwrap() - 0.5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn densities_sum_to_one() {
        let p = chain();
        let total: f64 = all_states(3).map(|x| p.log_density(&x).unwrap().exp()).sum();
        assert!((total - 1.0).abs() < 1e-14);
        let f = p.log_density_function();
        for x in all_states(3) {
            assert!((f.evaluate(&x).unwrap() - p.log_density(&x).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_conditionals_give_all_ones() {
        let cs = (0..4)
            .map(|i| Conditional::from_probabilities(i, vec![], &[1.0]).unwrap())
            .collect();
        let p = PartiallyOrderedMarkovModel::new(4, cs).unwrap();
        let b = p.sample(3, 50);
        assert!(b.states.iter().all(|x| x.iter().all(|&v| v == 1)));
        assert!(b.log_densities.iter().all(|&l| l == 0.0));
    }

    #[test]
    fn malformed_tables_rejected() {
        assert!(Conditional::from_probabilities(0, vec![], &[1.5]).is_err());
        assert!(Conditional::from_probabilities(0, vec![1], &[0.5]).is_err());
        assert!(Conditional::from_logits(0, vec![2, 1], vec![0.0; 4]).is_err());
        let c0 = Conditional::from_probabilities(0, vec![1], &[0.5, 0.5]).unwrap();
        let c1 = Conditional::from_probabilities(1, vec![0], &[0.5, 0.5]).unwrap();
        assert!(PartiallyOrderedMarkovModel::new(2, vec![c0, c1]).is_err());
        assert!(chain().log_density(&[0, 1]).is_err());
    }

    #[test]
    fn sampling_is_reproducible_and_self_consistent() {
        let p = chain();
        let a = p.sample(11, 200);
        assert_eq!(a, p.sample(11, 200));
        assert_ne!(a.states, p.sample(12, 200).states);
        for (x, ld) in a.states.iter().zip(&a.log_densities) {
            assert!((p.log_density(x).unwrap() - ld).abs() < 1e-14);
        }
    }

    #[test]
    fn binary_round_trip() {
        let b = chain().sample(5, 17);
        let mut bytes = Vec::new();
        b.write_binary(&mut bytes).unwrap();
        assert_eq!(bytes.len(), 16 + 17 * (1 + 8));
        assert_eq!(&bytes[..4], b"BMSB");
        let back = SampleBatch::read_binary(&mut bytes.as_slice(), 5).unwrap();
        assert_eq!(back, b);
        let mut text = Vec::new();
        b.write_text(&mut text).unwrap();
        assert!(String::from_utf8(text).unwrap().starts_with("state,log_density\n"));
    }
}
