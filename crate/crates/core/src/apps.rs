//! Inference built on elimination: MLE bracketing, MAP estimation, rejection
//! sampling with a certified constant, MH acceptance rates and Gibbs sampling.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::elimination::{eliminate, EliminationConfig, Marginal, Mode, PommVariant};
use crate::error::{Error, Result};
use crate::models::{LatticeSpec, MarkovRandomField, ModelFamily};
use crate::pbf::{InteractionSet, PseudoBooleanFunction, PRUNE_TOL};
use crate::pomm::{PartiallyOrderedMarkovModel, SampleBatch};
use crate::rng;

/// Largest model accepted by [`ExhaustiveSampler`].
pub const EXHAUSTIVE_MAX_VARS: usize = 22;

/// Bound curves for one bracketing round.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MleRound {
    pub nu: usize,
    pub grid: Vec<f64>,
    /// `U(x; theta) - ln c_U(theta)`.
    pub lower: Vec<f64>,
    /// `U(x; theta) - ln c_L(theta)`.
    pub upper: Vec<f64>,
    /// Largest lower bound.
    pub cut: f64,
    pub theta_lo: f64,
    pub theta_hi: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MleBracket {
    pub theta_lo: f64,
    pub theta_hi: f64,
    pub rounds: Vec<MleRound>,
}

/// Brackets the MLE of a one-parameter family given one observed state.
///
/// Each round bounds the log-likelihood on the grid, cuts at the largest lower
/// bound, and keeps the range up to the nearest grid points on either side of
/// the best lower bound whose upper bound falls below the cut. Later rounds use
/// `grid_points` evenly spaced values over the previous range.
pub fn mle_bracket(
    observed: &[u8],
    family: ModelFamily,
    lattice: LatticeSpec,
    theta_grid: &[f64],
    nu_schedule: &[usize],
    grid_points: usize,
) -> Result<MleBracket> {
    if family.param_count() != 1 {
        return Err(Error::InvalidArgument(format!(
            "{family:?} is not a one-parameter family"
        )));
    }
    if observed.len() != lattice.n() {
        return Err(Error::DimensionMismatch {
            expected: lattice.n(),
            got: observed.len(),
        });
    }
    if theta_grid.len() < 3 || !theta_grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidArgument(
            "theta grid needs at least 3 strictly increasing points".into(),
        ));
    }
    if nu_schedule.is_empty() || grid_points < 3 {
        return Err(Error::InvalidArgument(
            "need a non-empty nu schedule and at least 3 grid points per round".into(),
        ));
    }
    let mut grid = theta_grid.to_vec();
    let mut rounds = Vec::with_capacity(nu_schedule.len());
    for (round, &nu) in nu_schedule.iter().enumerate() {
        let curves: Vec<(f64, f64)> = grid
            .par_iter()
            .map(|&theta| log_likelihood_bounds(observed, family, lattice, theta, nu))
            .collect::<Result<_>>()?;
        let (lower, upper): (Vec<f64>, Vec<f64>) = curves.into_iter().unzip();
        let best = (0..grid.len())
            .fold(0, |b, k| if lower[k] > lower[b] { k } else { b });
        let cut = lower[best];
        if upper[best] < cut {
            return Err(Error::EmptyInterval {
                round,
                detail: format!("upper bound below the cut at theta = {}", grid[best]),
            });
        }
        let lo = (0..best).rev().find(|&k| upper[k] < cut).unwrap_or(0);
        let hi = (best + 1..grid.len())
            .find(|&k| upper[k] < cut)
            .unwrap_or(grid.len() - 1);
        let (theta_lo, theta_hi) = (grid[lo], grid[hi]);
        rounds.push(MleRound {
            nu,
            grid: grid.clone(),
            lower,
            upper,
            cut,
            theta_lo,
            theta_hi,
        });
        if theta_hi <= theta_lo {
            break;
        }
        grid = (0..grid_points)
            .map(|k| theta_lo + (theta_hi - theta_lo) * k as f64 / (grid_points - 1) as f64)
            .collect();
    }
    let last = rounds.last().expect("at least one round");
    Ok(MleBracket {
        theta_lo: last.theta_lo,
        theta_hi: last.theta_hi,
        rounds,
    })
}

/// `(U - ln c_U, U - ln c_L)` at one parameter value.
fn log_likelihood_bounds(
    observed: &[u8],
    family: ModelFamily,
    lattice: LatticeSpec,
    theta: f64,
    nu: usize,
) -> Result<(f64, f64)> {
    let mrf = family.build(lattice, &[theta])?;
    let u = mrf.energy.evaluate(observed)?;
    let lower = eliminate(&mrf.energy, &EliminationConfig::with_mode(Mode::LowerBound, nu))?;
    let upper = eliminate(&mrf.energy, &EliminationConfig::with_mode(Mode::UpperBound, nu))?;
    Ok((u - upper.log_value, u - lower.log_value))
}

/// Per-class Gaussian observation model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct GaussianLikelihoodSpec {
    pub mu0: f64,
    pub mu1: f64,
    pub sigma: f64,
}

impl GaussianLikelihoodSpec {
    pub fn new(mu0: f64, mu1: f64, sigma: f64) -> Result<Self> {
        if sigma.is_nan() || sigma <= 0.0 {
            return Err(Error::InvalidArgument(format!("sigma must be positive, got {sigma}")));
        }
        Ok(GaussianLikelihoodSpec { mu0, mu1, sigma })
    }

    pub fn log_density(&self, y: f64, label: u8) -> f64 {
        let mu = if label == 1 { self.mu1 } else { self.mu0 };
        let z = (y - mu) / self.sigma;
        -0.5 * z * z - self.sigma.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln()
    }

    /// `U(x) + sum_i ln phi(y_i; mu_{x_i}, sigma)`.
    pub fn posterior_energy(
        &self,
        y: &[f64],
        prior: &PseudoBooleanFunction,
    ) -> Result<PseudoBooleanFunction> {
        if y.len() != prior.n() {
            return Err(Error::DimensionMismatch {
                expected: prior.n(),
                got: y.len(),
            });
        }
        let mut post = prior.clone();
        let mut constant = 0.0;
        for (i, &yi) in y.iter().enumerate() {
            let l0 = self.log_density(yi, 0);
            let l1 = self.log_density(yi, 1);
            constant += l0;
            post.add_unchecked(&InteractionSet::singleton(i), l1 - l0);
        }
        post.add_unchecked(&InteractionSet::empty(), constant);
        post.prune(PRUNE_TOL);
        Ok(post)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MapEstimate {
    pub state: Vec<u8>,
    /// Posterior energy (up to the evidence) at `state`, or its bound.
    pub log_value: f64,
}

/// Posterior mode under a Gaussian likelihood. `cfg.marginal` is forced to max.
pub fn map_estimate(
    y: &[f64],
    prior: &MarkovRandomField,
    lik: &GaussianLikelihoodSpec,
    cfg: &EliminationConfig,
) -> Result<MapEstimate> {
    let post = lik.posterior_energy(y, &prior.energy)?;
    let cfg = EliminationConfig {
        marginal: Marginal::Max,
        pomm: PommVariant::None,
        ..cfg.clone()
    };
    let r = eliminate(&post, &cfg)?;
    Ok(MapEstimate {
        state: r.argmax.expect("max elimination yields an argmax"),
        log_value: r.log_value,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RejectionOptions {
    /// Smallest acceptable acceptance rate once `min_trials` have run.
    pub floor: f64,
    pub min_trials: u64,
    pub max_trials: u64,
}

impl Default for RejectionOptions {
    fn default() -> Self {
        RejectionOptions {
            floor: 1e-4,
            min_trials: 10_000,
            max_trials: 1_000_000_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RejectionOutcome {
    /// Accepted states with their unnormalised target log density `U(x)`.
    pub batch: SampleBatch,
    pub acceptance_rate: f64,
    pub trials: u64,
    /// `ln k`, chosen so that `k exp(U(x)) / p~(x) <= 1` everywhere.
    pub ln_k: f64,
    /// Largest acceptance probability seen.
    pub max_alpha: f64,
}

/// Exact samples from `target` by rejection from its order-`nu` POMM.
///
/// The constant comes from an upper bound on `max_x [U(x) - ln p~(x)]`,
/// obtained by upper-bound max elimination. Trial `t` uses stream `t` of `seed`.
pub fn rejection_sampler(
    target: &MarkovRandomField,
    nu: usize,
    seed: u64,
    count: usize,
    opts: RejectionOptions,
) -> Result<RejectionOutcome> {
    let cfg = EliminationConfig::with_mode(Mode::Approximate, nu).pomm(PommVariant::PostApproximation);
    let pomm = eliminate(&target.energy, &cfg)?
        .pomm
        .expect("POMM requested");
    let gap = PseudoBooleanFunction::add_scaled(
        &target.energy,
        &pomm.log_density_function(),
        1.0,
        -1.0,
    )?;
    let bound = eliminate(
        &gap,
        &EliminationConfig::with_mode(Mode::UpperBound, nu).marginal(Marginal::Max),
    )?;
    let ln_k = -bound.log_value;

    let mut states = Vec::with_capacity(count);
    let mut energies = Vec::with_capacity(count);
    let mut trials = 0u64;
    let mut max_alpha = 0.0f64;
    while states.len() < count {
        let rate = states.len() as f64 / trials.max(1) as f64;
        if (trials >= opts.min_trials && rate < opts.floor) || trials >= opts.max_trials {
            return Err(Error::AcceptanceTooLow {
                rate,
                trials: trials as usize,
                floor: opts.floor,
            });
        }
        let mut rng = rng::stream(seed, trials);
        trials += 1;
        let (x, lp) = pomm.sample_with(&mut rng);
        let u = target.energy.evaluate_unchecked(&x);
        let alpha = (ln_k + u - lp).exp();
        max_alpha = max_alpha.max(alpha);
        if rng.gen::<f64>() < alpha {
            states.push(x);
            energies.push(u);
        }
    }
    Ok(RejectionOutcome {
        batch: SampleBatch {
            seed,
            n: target.n(),
            states,
            log_densities: energies,
        },
        acceptance_rate: count as f64 / trials.max(1) as f64,
        trials,
        ln_k,
        max_alpha,
    })
}

/// A source of (approximately) independent draws from a target MRF.
pub trait ReferenceSampler {
    fn draw(&self, target: &MarkovRandomField, count: usize, seed: u64) -> Result<Vec<Vec<u8>>>;
}

/// Independent Gibbs chains, one per draw, each run for `burn_in` sweeps.
#[derive(Clone, Copy, Debug)]
pub struct GibbsReference {
    pub burn_in: usize,
}

impl ReferenceSampler for GibbsReference {
    fn draw(&self, target: &MarkovRandomField, count: usize, seed: u64) -> Result<Vec<Vec<u8>>> {
        let sampler = GibbsKernel::new(&target.energy);
        Ok((0..count)
            .into_par_iter()
            .map(|k| {
                let mut rng = rng::stream(seed, k as u64);
                let mut x: Vec<u8> = (0..target.n()).map(|_| rng.gen_range(0..2)).collect();
                for _ in 0..self.burn_in {
                    sampler.sweep(&mut x, &mut rng);
                }
                x
            })
            .collect())
    }
}

/// Draws from the exact distribution by enumerating every state.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExhaustiveSampler;

impl ReferenceSampler for ExhaustiveSampler {
    fn draw(&self, target: &MarkovRandomField, count: usize, seed: u64) -> Result<Vec<Vec<u8>>> {
        let n = target.n();
        if n > EXHAUSTIVE_MAX_VARS {
            return Err(Error::TooManyVariables {
                n,
                limit: EXHAUSTIVE_MAX_VARS,
            });
        }
        let energies: Vec<f64> = (0..1usize << n)
            .map(|m| target.energy.evaluate_unchecked(&mask_state(m, n)))
            .collect();
        let top = energies.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut cdf = Vec::with_capacity(energies.len());
        let mut acc = 0.0;
        for e in &energies {
            acc += (e - top).exp();
            cdf.push(acc);
        }
        Ok((0..count)
            .map(|k| {
                let u = rng::stream(seed, k as u64).gen::<f64>() * acc;
                let m = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
                mask_state(m, n)
            })
            .collect())
    }
}

fn mask_state(m: usize, n: usize) -> Vec<u8> {
    (0..n).map(|k| (m >> k & 1) as u8).collect()
}

/// Independence-sampler MH acceptance rate of `pomm` as a proposal for `target`,
/// averaged over `pairs` couples of a reference draw and a POMM draw.
pub fn mh_acceptance_rate(
    target: &MarkovRandomField,
    pomm: &PartiallyOrderedMarkovModel,
    reference: &dyn ReferenceSampler,
    pairs: usize,
    seed: u64,
) -> Result<f64> {
    if pomm.n() != target.n() {
        return Err(Error::DimensionMismatch {
            expected: target.n(),
            got: pomm.n(),
        });
    }
    if pairs == 0 {
        return Ok(1.0);
    }
    let current = reference.draw(target, pairs, seed)?;
    let proposals = pomm.sample(seed.wrapping_add(0x9e37_79b9_7f4a_7c15), pairs);
    let total: f64 = current
        .iter()
        .zip(proposals.states.iter().zip(&proposals.log_densities))
        .map(|(x, (xp, lp_xp))| {
            let log_ratio = target.energy.evaluate_unchecked(xp)
                - target.energy.evaluate_unchecked(x)
                + pomm.log_density_unchecked(x)
                - lp_xp;
            log_ratio.exp().min(1.0)
        })
        .sum();
    Ok(total / pairs as f64)
}

/// Single-site full conditionals: for each variable, the terms containing it
/// with the variable stripped.
struct GibbsKernel {
    terms: Vec<Vec<(InteractionSet, f64)>>,
}

impl GibbsKernel {
    fn new(energy: &PseudoBooleanFunction) -> Self {
        let terms = (0..energy.n())
            .map(|i| {
                energy
                    .supersets(&InteractionSet::singleton(i))
                    .into_iter()
                    .map(|(s, b)| (s.without(i), b))
                    .collect()
            })
            .collect();
        GibbsKernel { terms }
    }

    fn sweep(&self, x: &mut [u8], rng: &mut rng::StreamRng) {
        for (i, terms) in self.terms.iter().enumerate() {
            let logit: f64 = terms
                .iter()
                .filter(|(s, _)| s.all_on(x))
                .map(|(_, b)| b)
                .sum();
            let p = 1.0 / (1.0 + (-logit).exp());
            x[i] = u8::from(rng.gen::<f64>() < p);
        }
    }
}

/// Systematic-scan Gibbs sampler. Runs `sweeps` sweeps from a uniform random
/// start and keeps every `thin`-th state after the first `burn_in` sweeps.
/// Log densities are the unnormalised `U(x)`.
pub fn gibbs_sampler(
    mrf: &MarkovRandomField,
    sweeps: usize,
    burn_in: usize,
    thin: usize,
    seed: u64,
) -> Result<SampleBatch> {
    if thin == 0 {
        return Err(Error::InvalidArgument("thin must be at least 1".into()));
    }
    let kernel = GibbsKernel::new(&mrf.energy);
    let mut rng = rng::stream(seed, 0);
    let mut x: Vec<u8> = (0..mrf.n()).map(|_| rng.gen_range(0..2)).collect();
    let mut states = Vec::new();
    let mut energies = Vec::new();
    for s in 1..=sweeps {
        kernel.sweep(&mut x, &mut rng);
        if s > burn_in && (s - burn_in).is_multiple_of(thin) {
            energies.push(mrf.energy.evaluate_unchecked(&x));
            states.push(x.clone());
        }
    }
    Ok(SampleBatch {
        seed,
        n: mrf.n(),
        states,
        log_densities: energies,
    })
}
