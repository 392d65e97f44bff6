//! Variable elimination over pseudo-Boolean energies.
//!
//! Variables are summed (or maximised) out one at a time. At each step the
//! terms containing the variable are tabulated over its current neighbours,
//! marginalised, and converted back to interactions. In the approximate and
//! bound modes the neighbourhood is first shrunk to at most `nu` variables by
//! removing pair interactions.

use serde::{Deserialize, Serialize};

use crate::approx::{bound_in_place, soir_in_place, BoundDirection, SplitHeuristic, SplitPart};
use crate::error::{Error, Result};
use crate::models::MarkovRandomField;
use crate::pbf::{
    add_local_coefficients, local_coefficients, mobius, subset_sum, InteractionSet,
    PseudoBooleanFunction, PRUNE_TOL, TABLE_CAP,
};
use crate::pomm::{Conditional, PartiallyOrderedMarkovModel};
use crate::{fmt_real, softplus};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Approximate,
    LowerBound,
    UpperBound,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Approximate => "approx",
            Mode::LowerBound => "lower",
            Mode::UpperBound => "upper",
        }
    }

    fn bound_direction(self) -> Option<BoundDirection> {
        match self {
            Mode::LowerBound => Some(BoundDirection::Lower),
            Mode::UpperBound => Some(BoundDirection::Upper),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Marginal {
    Sum,
    Max,
}

/// Which conditional tables to keep as a POMM.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PommVariant {
    None,
    /// Tabulated before the neighbourhood of the variable is shrunk.
    PreApproximation,
    /// Tabulated after shrinking, so every dependency set has at most `nu` members.
    PostApproximation,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EliminationConfig {
    /// Elimination order; `None` means `0..n`.
    pub order: Option<Vec<usize>>,
    /// Neighbourhood cap. Ignored in exact mode.
    pub nu: usize,
    pub mode: Mode,
    pub marginal: Marginal,
    pub pomm: PommVariant,
    /// Largest table used to canonicalise a bound term; `None` means `nu`.
    pub table_cap: Option<usize>,
}

impl Default for EliminationConfig {
    fn default() -> Self {
        EliminationConfig {
            order: None,
            nu: TABLE_CAP,
            mode: Mode::Exact,
            marginal: Marginal::Sum,
            pomm: PommVariant::None,
            table_cap: None,
        }
    }
}

impl EliminationConfig {
    pub fn exact() -> Self {
        Self::default()
    }

    pub fn with_mode(mode: Mode, nu: usize) -> Self {
        EliminationConfig {
            nu,
            mode,
            ..Self::default()
        }
    }

    pub fn marginal(mut self, marginal: Marginal) -> Self {
        self.marginal = marginal;
        self
    }

    pub fn pomm(mut self, variant: PommVariant) -> Self {
        self.pomm = variant;
        self
    }

    pub fn order(mut self, order: Vec<usize>) -> Self {
        self.order = Some(order);
        self
    }

    pub fn table_cap(mut self, cap: usize) -> Self {
        self.table_cap = Some(cap);
        self
    }

    fn resolved_order(&self, n: usize) -> Result<Vec<usize>> {
        let order = self.order.clone().unwrap_or_else(|| (0..n).collect());
        let mut seen = vec![false; n];
        if order.len() != n {
            return Err(Error::InvalidArgument(format!(
                "elimination order has {} entries for {n} variables",
                order.len()
            )));
        }
        for &v in &order {
            if v >= n || seen[v] {
                return Err(Error::InvalidArgument(format!(
                    "elimination order is not a permutation (entry {v})"
                )));
            }
            seen[v] = true;
        }
        Ok(order)
    }
}

/// What happened while eliminating one variable.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepDiagnostics {
    pub var: usize,
    pub eta_before: usize,
    pub eta_after: usize,
    /// Partners `j` whose pair with the variable was removed, in order.
    pub partners: Vec<usize>,
    /// Partner choices made by the smallest-index fallback because every
    /// candidate scored the same.
    pub fallback_choices: usize,
    /// Variables split on while canonicalising bound terms.
    pub splits: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct EliminationResult {
    pub mode: Mode,
    pub marginal: Marginal,
    pub nu: usize,
    /// `ln c` (sum) or `max_x U(x)` (max), or the approximation/bound thereof.
    pub log_value: f64,
    pub argmax: Option<Vec<u8>>,
    pub pomm: Option<PartiallyOrderedMarkovModel>,
    pub per_step: Vec<StepDiagnostics>,
}

impl EliminationResult {
    pub fn max_eta_before(&self) -> usize {
        self.per_step.iter().map(|s| s.eta_before).max().unwrap_or(0)
    }

    /// Result record with reals at 17 significant digits. `gap` is `ln c_U - ln c_L`
    /// when the caller has both bounds.
    pub fn to_json(&self, gap: Option<f64>) -> String {
        let eta: Vec<String> = self
            .per_step
            .iter()
            .map(|s| format!("[{}, {}, {}]", s.var, s.eta_before, s.eta_after))
            .collect();
        let mut out = format!(
            "{{\"mode\": \"{}\", \"marginal\": \"{}\", \"nu\": {}, \"log_value\": {}",
            self.mode.name(),
            match self.marginal {
                Marginal::Sum => "sum",
                Marginal::Max => "max",
            },
            self.nu,
            fmt_real(self.log_value)
        );
        if let Some(g) = gap {
            out.push_str(&format!(", \"gap\": {}", fmt_real(g)));
        }
        if let Some(x) = &self.argmax {
            let s: String = x.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect();
            out.push_str(&format!(", \"argmax\": \"{s}\""));
        }
        out.push_str(&format!(", \"eta\": [{}]}}", eta.join(", ")));
        out
    }
}

/// Runs elimination on `energy` as configured.
pub fn eliminate(
    energy: &PseudoBooleanFunction,
    cfg: &EliminationConfig,
) -> Result<EliminationResult> {
    if cfg.nu == 0 && cfg.mode != Mode::Exact {
        return Err(Error::InvalidArgument("nu must be at least 1".into()));
    }
    let n = energy.n();
    let order = cfg.resolved_order(n)?;
    let mut f = energy.clone();
    let table_cap = cfg.table_cap.unwrap_or(cfg.nu).clamp(1, TABLE_CAP);
    let split = TruncatedScoreSplit;
    let keep_tables = cfg.marginal == Marginal::Max;

    let mut per_step = Vec::with_capacity(n);
    let mut conditionals = Vec::new();
    let mut max_tables: Vec<Conditional> = Vec::new();

    for (step, &i) in order.iter().enumerate() {
        let mut eta = f.neighbours(i).len();
        let mut diag = StepDiagnostics {
            var: i,
            eta_before: eta,
            eta_after: eta,
            partners: Vec::new(),
            fallback_choices: 0,
            splits: Vec::new(),
        };
        if cfg.pomm == PommVariant::PreApproximation {
            let (vars, h) = log_odds_table(&f, i, step)?;
            conditionals.push(Conditional::from_logits(i, vars, h)?);
        }
        if cfg.mode != Mode::Exact {
            while eta > cfg.nu {
                let (j, fallback) = choose_partner(&f, i)?;
                diag.partners.push(j);
                diag.fallback_choices += usize::from(fallback);
                match cfg.mode.bound_direction() {
                    None => {
                        soir_in_place(&mut f, i, j)?;
                    }
                    Some(dir) => {
                        let report = bound_in_place(&mut f, i, j, dir, table_cap, &split)?;
                        diag.splits.extend(report.splits);
                    }
                }
                eta = f.neighbours(i).len();
            }
        }
        diag.eta_after = eta;
        let (vars, mut values) = log_odds_table(&f, i, step)?;
        if cfg.pomm == PommVariant::PostApproximation {
            conditionals.push(Conditional::from_logits(i, vars.clone(), values.clone())?);
        }
        if keep_tables {
            max_tables.push(Conditional::from_logits(i, vars.clone(), values.clone())?);
        }
        for v in values.iter_mut() {
            *v = match cfg.marginal {
                Marginal::Sum => softplus(*v),
                Marginal::Max => v.max(0.0),
            };
        }
        mobius(&mut values);
        f.remove_supersets(&InteractionSet::singleton(i));
        let touched = add_local_coefficients(&mut f, &vars, &values, &InteractionSet::empty());
        f.prune_sets(&touched, PRUNE_TOL);
        per_step.push(diag);
    }

    let argmax = keep_tables.then(|| {
        let mut x = vec![0u8; n];
        for t in max_tables.iter().rev() {
            x[t.var()] = u8::from(t.logit_given(&x) > 0.0);
        }
        x
    });
    let pomm = match cfg.pomm {
        PommVariant::None => None,
        _ => Some(PartiallyOrderedMarkovModel::new(n, conditionals)?),
    };
    Ok(EliminationResult {
        mode: cfg.mode,
        marginal: cfg.marginal,
        nu: cfg.nu,
        log_value: f.constant_term(),
        argmax,
        pomm,
        per_step,
    })
}

/// Table of `h(x_D)` where the energy reads `x_i h(x_D) + (terms without x_i)`.
/// Bit `k` of the table index is the `k`-th entry of the returned sorted list.
fn log_odds_table(f: &PseudoBooleanFunction, i: usize, step: usize) -> Result<(Vec<usize>, Vec<f64>)> {
    let terms = f.supersets(&InteractionSet::singleton(i));
    let eta = f.neighbours(i).len();
    if eta > TABLE_CAP {
        return Err(Error::NeighbourhoodTooLarge {
            step,
            var: i,
            eta,
            cap: TABLE_CAP,
        });
    }
    let (vars, mut values) = local_coefficients(&terms, &InteractionSet::singleton(i))?;
    subset_sum(&mut values);
    Ok((vars, values))
}

/// Partner `j` for removing `{i, j}`: the neighbour minimising the largest
/// truncated SOIR error `(1/4) max_x |b_ij + sum_r b_ijr x_r|`. Ties go to the
/// smallest index; the flag is set when every candidate scored the same.
pub fn choose_partner(f: &PseudoBooleanFunction, i: usize) -> Result<(usize, bool)> {
    let neighbours = f.neighbours(i);
    if neighbours.is_empty() {
        return Err(Error::InvalidArgument(format!("variable {i} has no neighbours")));
    }
    let mut best = (f64::INFINITY, neighbours[0]);
    let mut all_equal = true;
    let mut first_score = None;
    for &j in &neighbours {
        let score = partner_score(f, i, j);
        match first_score {
            None => first_score = Some(score),
            Some(s) if s != score => all_equal = false,
            _ => {}
        }
        if score < best.0 {
            best = (score, j);
        }
    }
    Ok((best.1, all_equal && neighbours.len() > 1))
}

/// `(1/4) max_x |b_ij + sum_r b_ijr x_r|` in closed form.
pub fn partner_score(f: &PseudoBooleanFunction, i: usize, j: usize) -> f64 {
    let pair = InteractionSet::pair(i, j);
    let mut c = 0.0;
    let (mut pos, mut neg) = (0.0, 0.0);
    for (set, beta) in f.supersets(&pair) {
        match set.len() {
            2 => c += beta,
            3 if beta > 0.0 => pos += beta,
            3 => neg += beta,
            _ => {}
        }
    }
    0.25 * (c + pos).abs().max((c + neg).abs())
}

/// Split-variable rule for bound terms: for each candidate `v`, bound the
/// coefficient of `x_v` by its terms of low order (stripped degree at most
/// `1 + depth`) and split on the candidate with the smallest such bound.
#[derive(Clone, Copy, Debug, Default)]
pub struct TruncatedScoreSplit;

/// Enumeration limit for truncated coefficient tables in [`TruncatedScoreSplit`].
const SPLIT_SCORE_VARS: usize = 12;

impl SplitHeuristic for TruncatedScoreSplit {
    fn choose(&self, part: &SplitPart<'_>) -> usize {
        let vars = part.variables();
        let mut best = (f64::INFINITY, vars[0]);
        for &v in &vars {
            let score = split_score(part.terms, v, 1 + part.depth);
            if score < best.0 {
                best = (score, v);
            }
        }
        best.1
    }
}

fn split_score(terms: &[(InteractionSet, f64)], v: usize, max_order: usize) -> f64 {
    let strip = InteractionSet::singleton(v);
    let truncated = |order: usize| -> Vec<(InteractionSet, f64)> {
        terms
            .iter()
            .filter(|(s, _)| s.contains(v) && s.len() <= order + 1)
            .map(|(s, b)| (s.clone(), *b))
            .collect()
    };
    let mut kept = truncated(max_order);
    let (vars, _) = local_coefficients(&kept, &strip).unwrap_or_default();
    if vars.len() > SPLIT_SCORE_VARS {
        kept = truncated(1);
    }
    match local_coefficients(&kept, &strip) {
        Ok((vars, mut values)) if vars.len() <= SPLIT_SCORE_VARS => {
            subset_sum(&mut values);
            values.iter().fold(0.0, |m, x| m.max(x.abs()))
        }
        // Linear part only: closed form.
        _ => {
            let (mut c, mut pos, mut neg) = (0.0, 0.0, 0.0);
            for (s, b) in &kept {
                if s.len() == 1 {
                    c += b;
                } else if *b > 0.0 {
                    pos += b;
                } else {
                    neg += b;
                }
            }
            (c + pos).abs().max((c + neg).abs())
        }
    }
}

/// `ln c` exactly.
pub fn eliminate_exact_sum(mrf: &MarkovRandomField) -> Result<EliminationResult> {
    eliminate(&mrf.energy, &EliminationConfig::exact())
}

/// `ln c~` with neighbourhoods capped at `nu` by SOIR.
pub fn eliminate_approx(mrf: &MarkovRandomField, nu: usize) -> Result<EliminationResult> {
    eliminate(&mrf.energy, &EliminationConfig::with_mode(Mode::Approximate, nu))
}

/// `ln c_L` (`BoundDirection::Lower`) or `ln c_U`.
pub fn eliminate_bound(
    mrf: &MarkovRandomField,
    nu: usize,
    dir: BoundDirection,
) -> Result<EliminationResult> {
    let mode = match dir {
        BoundDirection::Lower => Mode::LowerBound,
        BoundDirection::Upper => Mode::UpperBound,
    };
    eliminate(&mrf.energy, &EliminationConfig::with_mode(mode, nu))
}

/// Max-marginal elimination with backward-pass argmax.
pub fn eliminate_max(energy: &PseudoBooleanFunction, mode: Mode, nu: usize) -> Result<EliminationResult> {
    eliminate(
        energy,
        &EliminationConfig::with_mode(mode, nu).marginal(Marginal::Max),
    )
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MomentEstimate {
    Point(f64),
    Interval { lower: f64, upper: f64 },
}

/// `E[psi(x)]` for `psi = exp(ln_psi)`, as a ratio of two normalising
/// constants. Bound modes return an interval from both bound directions.
pub fn moment(
    energy: &PseudoBooleanFunction,
    ln_psi: &PseudoBooleanFunction,
    cfg: &EliminationConfig,
) -> Result<MomentEstimate> {
    let tilted = PseudoBooleanFunction::add_scaled(energy, ln_psi, 1.0, 1.0)?;
    let base = EliminationConfig {
        marginal: Marginal::Sum,
        pomm: PommVariant::None,
        ..cfg.clone()
    };
    match cfg.mode {
        Mode::Exact | Mode::Approximate => {
            let num = eliminate(&tilted, &base)?.log_value;
            let den = eliminate(energy, &base)?.log_value;
            Ok(MomentEstimate::Point((num - den).exp()))
        }
        Mode::LowerBound | Mode::UpperBound => {
            let lower = EliminationConfig {
                mode: Mode::LowerBound,
                ..base.clone()
            };
            let upper = EliminationConfig {
                mode: Mode::UpperBound,
                ..base
            };
            let num_l = eliminate(&tilted, &lower)?.log_value;
            let num_u = eliminate(&tilted, &upper)?.log_value;
            let den_l = eliminate(energy, &lower)?.log_value;
            let den_u = eliminate(energy, &upper)?.log_value;
            Ok(MomentEstimate::Interval {
                lower: (num_l - den_u).exp(),
                upper: (num_u - den_l).exp(),
            })
        }
    }
}
