//! Command-line front end.
//!
//! Every command reads a JSON run config holding the model (`family`, `rows`,
//! `cols`, `params`) plus optional command settings; flags override the file.
//! Output goes to `--out` or stdout as CSV (default), JSON, or for sample
//! commands a packed binary format.
//!
//! Exit codes: 0 success, 2 config error, 3 resource cap, 1 anything else.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Deserialize;

use crate::apps::{
    gibbs_sampler, map_estimate, mh_acceptance_rate, mle_bracket, rejection_sampler,
    ExhaustiveSampler, GaussianLikelihoodSpec, GibbsReference, ReferenceSampler,
    RejectionOptions,
};
use crate::elimination::{eliminate, EliminationConfig, Mode, PommVariant};
use crate::error::{Error, Result};
use crate::fmt_real;
use crate::models::{MarkovRandomField, ModelConfig};
use crate::pomm::SampleBatch;

#[derive(Debug, Parser)]
#[command(name = "binmrf", version, about = "Approximate variable elimination for binary MRFs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normalising constant: approximation and bounds per nu.
    Norm(CommonArgs),
    /// Draw from the POMM surrogate.
    Sample(CommonArgs),
    /// Systematic-scan Gibbs sampling.
    Gibbs(CommonArgs),
    /// MAP estimate under a Gaussian likelihood.
    Map(CommonArgs),
    /// Bracket the MLE of a one-parameter model.
    Mle(CommonArgs),
    /// Exact samples by rejection from the POMM.
    Reject(CommonArgs),
    /// MH acceptance rate of the POMM as an independence proposal.
    MhRate(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Run config (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Neighbourhood caps, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub nu: Option<Vec<usize>>,
    /// Elimination mode (default: approx).
    #[arg(long, value_enum)]
    pub mode: Option<CliMode>,
    /// Random seed (default: 0).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Number of samples or MH pairs.
    #[arg(long)]
    pub count: Option<usize>,
    /// Add wall-clock seconds per elimination to `norm` output.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CliMode {
    Exact,
    Approx,
    Lower,
    Upper,
}

impl From<CliMode> for Mode {
    fn from(m: CliMode) -> Mode {
        match m {
            CliMode::Exact => Mode::Exact,
            CliMode::Approx => Mode::Approximate,
            CliMode::Lower => Mode::LowerBound,
            CliMode::Upper => Mode::UpperBound,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    /// Packed samples; sample commands only.
    Binary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReferenceKind {
    Gibbs,
    Exhaustive,
}

/// Contents of the `--config` file.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(flatten)]
    pub model: ModelConfig,
    pub nu: Option<Vec<usize>>,
    pub mode: Option<CliMode>,
    pub seed: Option<u64>,
    pub count: Option<usize>,
    pub sweeps: Option<usize>,
    pub burn_in: Option<usize>,
    pub thin: Option<usize>,
    pub theta_grid: Option<Vec<f64>>,
    pub grid_points: Option<usize>,
    /// Observed state as a row-major 0/1 string.
    pub observed: Option<String>,
    pub likelihood: Option<GaussianLikelihoodSpec>,
    pub observations: Option<Vec<f64>>,
    pub reference: Option<ReferenceKind>,
    pub acceptance_floor: Option<f64>,
}

/// Settings after applying flag overrides.
struct Run {
    cfg: RunConfig,
    mrf: MarkovRandomField,
    nus: Vec<usize>,
    mode: Mode,
    seed: u64,
    format: Format,
    timing: bool,
}

impl Run {
    fn new(args: &CommonArgs) -> Result<Run> {
        let text = fs::read_to_string(&args.config).map_err(|e| {
            Error::Config(format!("cannot read {}: {e}", args.config.display()))
        })?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", args.config.display())))?;
        let mrf = cfg.model.build()?;
        let nus = args
            .nu
            .clone()
            .or_else(|| cfg.nu.clone())
            .unwrap_or_else(|| vec![mrf.n().max(1)]);
        if nus.is_empty() || nus.contains(&0) {
            return Err(Error::Config("nu values must be at least 1".into()));
        }
        let mode = args
            .mode
            .or(cfg.mode)
            .map(Mode::from)
            .unwrap_or(Mode::Approximate);
        let seed = args.seed.or(cfg.seed).unwrap_or(0);
        let mut cfg = cfg;
        if args.count.is_some() {
            cfg.count = args.count;
        }
        Ok(Run {
            cfg,
            mrf,
            nus,
            mode,
            seed,
            format: args.format,
            timing: args.timing,
        })
    }

    fn elimination(&self, mode: Mode, nu: usize) -> EliminationConfig {
        EliminationConfig::with_mode(mode, nu)
    }

    fn require_not_binary(&self, command: &str) -> Result<()> {
        if self.format == Format::Binary {
            return Err(Error::Config(format!("{command} has no binary output")));
        }
        Ok(())
    }
}

/// Parses `args` (including the program name) and runs the command. Returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Json(_) => 2,
        e if e.is_resource_cap() => 3,
        _ => 1,
    }
}

pub fn execute(cli: &Cli) -> Result<()> {
    let args = match &cli.command {
        Command::Norm(a)
        | Command::Sample(a)
        | Command::Gibbs(a)
        | Command::Map(a)
        | Command::Mle(a)
        | Command::Reject(a)
        | Command::MhRate(a) => a,
    };
    let run = Run::new(args)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let output = pool.install(|| match &cli.command {
        Command::Norm(_) => cmd_norm(&run),
        Command::Sample(_) => cmd_sample(&run),
        Command::Gibbs(_) => cmd_gibbs(&run),
        Command::Map(_) => cmd_map(&run),
        Command::Mle(_) => cmd_mle(&run),
        Command::Reject(_) => cmd_reject(&run),
        Command::MhRate(_) => cmd_mh_rate(&run),
    })?;
    write_output(args.out.as_deref(), &output)
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => fs::write(p, bytes)?,
        None => std::io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

struct NormRow {
    nu: Option<usize>,
    approx: f64,
    lower: f64,
    upper: f64,
    seconds: f64,
}

/// Columns `nu,ln_c_approx,ln_c_lower,ln_c_upper,gap` (plus `wall_seconds`
/// with `--timing`). Exact mode gives one row with `nu` set to `exact`.
fn cmd_norm(run: &Run) -> Result<Vec<u8>> {
    let rows: Vec<NormRow> = if run.mode == Mode::Exact {
        let start = Instant::now();
        let v = eliminate(&run.mrf.energy, &EliminationConfig::exact())?.log_value;
        vec![NormRow {
            nu: None,
            approx: v,
            lower: v,
            upper: v,
            seconds: start.elapsed().as_secs_f64(),
        }]
    } else {
        run.nus
            .par_iter()
            .map(|&nu| {
                let start = Instant::now();
                let e = &run.mrf.energy;
                let approx = eliminate(e, &run.elimination(Mode::Approximate, nu))?.log_value;
                let lower = eliminate(e, &run.elimination(Mode::LowerBound, nu))?.log_value;
                let upper = eliminate(e, &run.elimination(Mode::UpperBound, nu))?.log_value;
                Ok(NormRow {
                    nu: Some(nu),
                    approx,
                    lower,
                    upper,
                    seconds: start.elapsed().as_secs_f64() / 3.0,
                })
            })
            .collect::<Result<_>>()?
    };
    let nu_text = |r: &NormRow| r.nu.map_or("exact".to_string(), |v| v.to_string());
    let mut out = String::new();
    match run.format {
        Format::Csv => {
            out.push_str("nu,ln_c_approx,ln_c_lower,ln_c_upper,gap");
            out.push_str(if run.timing { ",wall_seconds\n" } else { "\n" });
            for r in &rows {
                out.push_str(&format!(
                    "{},{},{},{},{}",
                    nu_text(r),
                    fmt_real(r.approx),
                    fmt_real(r.lower),
                    fmt_real(r.upper),
                    fmt_real(r.upper - r.lower)
                ));
                if run.timing {
                    out.push_str(&format!(",{}", fmt_real(r.seconds)));
                }
                out.push('\n');
            }
        }
        Format::Json => {
            let items: Vec<String> = rows
                .iter()
                .map(|r| {
                    let mut s = format!(
                        "{{\"nu\": \"{}\", \"ln_c_approx\": {}, \"ln_c_lower\": {}, \"ln_c_upper\": {}, \"gap\": {}",
                        nu_text(r),
                        fmt_real(r.approx),
                        fmt_real(r.lower),
                        fmt_real(r.upper),
                        fmt_real(r.upper - r.lower)
                    );
                    if run.timing {
                        s.push_str(&format!(", \"wall_seconds\": {}", fmt_real(r.seconds)));
                    }
                    s.push('}');
                    s
                })
                .collect();
            out = format!("[{}]\n", items.join(", "));
        }
        Format::Binary => run.require_not_binary("norm")?,
    }
    Ok(out.into_bytes())
}

fn batch_output(run: &Run, batch: &SampleBatch) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    match run.format {
        Format::Csv => batch.write_text(&mut out)?,
        Format::Json => {
            out.extend(batch.to_json().into_bytes());
            out.push(b'\n');
        }
        Format::Binary => batch.write_binary(&mut out)?,
    }
    Ok(out)
}

/// Samples with their POMM log density.
fn cmd_sample(run: &Run) -> Result<Vec<u8>> {
    let cfg = run
        .elimination(run.mode, run.nus[0])
        .pomm(PommVariant::PostApproximation);
    let pomm = eliminate(&run.mrf.energy, &cfg)?
        .pomm
        .expect("POMM requested");
    let batch = pomm.sample(run.seed, run.cfg.count.unwrap_or(1000));
    batch_output(run, &batch)
}

/// Thinned Gibbs states with their energy `U(x)`.
fn cmd_gibbs(run: &Run) -> Result<Vec<u8>> {
    let batch = gibbs_sampler(
        &run.mrf,
        run.cfg.sweeps.unwrap_or(1000),
        run.cfg.burn_in.unwrap_or(100),
        run.cfg.thin.unwrap_or(1),
        run.seed,
    )?;
    batch_output(run, &batch)
}

/// `state,log_value` for the posterior mode.
fn cmd_map(run: &Run) -> Result<Vec<u8>> {
    run.require_not_binary("map")?;
    let y = run
        .cfg
        .observations
        .as_ref()
        .ok_or_else(|| Error::Config("map needs `observations`".into()))?;
    let lik = match run.cfg.likelihood {
        Some(l) => GaussianLikelihoodSpec::new(l.mu0, l.mu1, l.sigma)
            .map_err(|e| Error::Config(e.to_string()))?,
        None => GaussianLikelihoodSpec::new(0.0, 1.0, 1.0)?,
    };
    if y.len() != run.mrf.n() {
        return Err(Error::Config(format!(
            "{} observations for {} nodes",
            y.len(),
            run.mrf.n()
        )));
    }
    let est = map_estimate(y, &run.mrf, &lik, &run.elimination(run.mode, run.nus[0]))?;
    let state: String = est.state.iter().map(|&b| char::from(b'0' + b)).collect();
    Ok(match run.format {
        Format::Json => format!(
            "{{\"state\": \"{state}\", \"log_value\": {}}}\n",
            fmt_real(est.log_value)
        ),
        _ => format!("state,log_value\n{state},{}\n", fmt_real(est.log_value)),
    }
    .into_bytes())
}

fn parse_state(text: &str, n: usize) -> Result<Vec<u8>> {
    let x: Vec<u8> = text
        .chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(Error::Config(format!("observed state has character {other:?}"))),
        })
        .collect::<Result<_>>()?;
    if x.len() != n {
        return Err(Error::Config(format!("observed state has {} entries for {n} nodes", x.len())));
    }
    Ok(x)
}

/// CSV: `round,nu,theta_lo,theta_hi,cut` per round. JSON adds the bound curves.
fn cmd_mle(run: &Run) -> Result<Vec<u8>> {
    run.require_not_binary("mle")?;
    let observed = run
        .cfg
        .observed
        .as_deref()
        .ok_or_else(|| Error::Config("mle needs `observed`".into()))?;
    let x = parse_state(observed, run.mrf.n())?;
    let grid = run
        .cfg
        .theta_grid
        .clone()
        .ok_or_else(|| Error::Config("mle needs `theta_grid`".into()))?;
    let lattice = run.cfg.model.lattice()?;
    let bracket = mle_bracket(
        &x,
        run.cfg.model.family,
        lattice,
        &grid,
        &run.nus,
        run.cfg.grid_points.unwrap_or(11),
    )?;
    let reals = |v: &[f64]| v.iter().map(|&t| fmt_real(t)).collect::<Vec<_>>().join(", ");
    let mut out = String::new();
    match run.format {
        Format::Json => {
            let rounds: Vec<String> = bracket
                .rounds
                .iter()
                .map(|r| {
                    format!(
                        "{{\"nu\": {}, \"theta_lo\": {}, \"theta_hi\": {}, \"cut\": {}, \"grid\": [{}], \"lower\": [{}], \"upper\": [{}]}}",
                        r.nu,
                        fmt_real(r.theta_lo),
                        fmt_real(r.theta_hi),
                        fmt_real(r.cut),
                        reals(&r.grid),
                        reals(&r.lower),
                        reals(&r.upper)
                    )
                })
                .collect();
            out = format!(
                "{{\"theta_lo\": {}, \"theta_hi\": {}, \"rounds\": [{}]}}\n",
                fmt_real(bracket.theta_lo),
                fmt_real(bracket.theta_hi),
                rounds.join(", ")
            );
        }
        _ => {
            out.push_str("round,nu,theta_lo,theta_hi,cut\n");
            for (k, r) in bracket.rounds.iter().enumerate() {
                out.push_str(&format!(
                    "{k},{},{},{},{}\n",
                    r.nu,
                    fmt_real(r.theta_lo),
                    fmt_real(r.theta_hi),
                    fmt_real(r.cut)
                ));
            }
        }
    }
    Ok(out.into_bytes())
}

/// Accepted states with their energy `U(x)`. The acceptance summary goes to
/// stderr (and into the JSON record).
fn cmd_reject(run: &Run) -> Result<Vec<u8>> {
    let mut opts = RejectionOptions::default();
    if let Some(floor) = run.cfg.acceptance_floor {
        opts.floor = floor;
    }
    let out = rejection_sampler(
        &run.mrf,
        run.nus[0],
        run.seed,
        run.cfg.count.unwrap_or(1000),
        opts,
    )?;
    eprintln!(
        "acceptance_rate={} trials={} ln_k={}",
        fmt_real(out.acceptance_rate),
        out.trials,
        fmt_real(out.ln_k)
    );
    if run.format == Format::Json {
        let batch = out.batch.to_json();
        return Ok(format!(
            "{{\"acceptance_rate\": {}, \"trials\": {}, \"ln_k\": {}, \"batch\": {batch}}}\n",
            fmt_real(out.acceptance_rate),
            out.trials,
            fmt_real(out.ln_k)
        )
        .into_bytes());
    }
    batch_output(run, &out.batch)
}

/// `nu,acceptance_rate` per nu.
fn cmd_mh_rate(run: &Run) -> Result<Vec<u8>> {
    run.require_not_binary("mh-rate")?;
    let pairs = run.cfg.count.unwrap_or(1000);
    let reference: Box<dyn ReferenceSampler + Sync> = match run.cfg.reference {
        Some(ReferenceKind::Exhaustive) => Box::new(ExhaustiveSampler),
        _ => Box::new(GibbsReference {
            burn_in: run.cfg.burn_in.unwrap_or(100),
        }),
    };
    let mode = if run.mode == Mode::Exact {
        Mode::Exact
    } else {
        Mode::Approximate
    };
    let rates: Vec<(usize, f64)> = run
        .nus
        .par_iter()
        .map(|&nu| {
            let cfg = run.elimination(mode, nu).pomm(PommVariant::PreApproximation);
            let pomm = eliminate(&run.mrf.energy, &cfg)?
                .pomm
                .expect("POMM requested");
            Ok((nu, mh_acceptance_rate(&run.mrf, &pomm, reference.as_ref(), pairs, run.seed)?))
        })
        .collect::<Result<_>>()?;
    let out = match run.format {
        Format::Json => {
            let items: Vec<String> = rates
                .iter()
                .map(|(nu, r)| format!("{{\"nu\": {nu}, \"acceptance_rate\": {}}}", fmt_real(*r)))
                .collect();
            format!("[{}]\n", items.join(", "))
        }
        _ => {
            let mut s = String::from("nu,acceptance_rate\n");
            for (nu, r) in &rates {
                s.push_str(&format!("{nu},{}\n", fmt_real(*r)));
            }
            s
        }
    };
    Ok(out.into_bytes())
}
