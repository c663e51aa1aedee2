//! bcnoise: seeded sweeps over erasure capacity profiles, noise-operator
//! norm comparisons, psi curves, undetected-error sums, and 4-tuple
//! censuses, exported as CSV or JSON-lines with the resolved run spec in a
//! `#` header. Exit codes: 0 ok, 2 usage or input error, 3 a mathematical
//! contract the library guarantees was violated by the computed numbers.
//!
//! Worker threads are controlled only by the RAYON_NUM_THREADS environment
//! variable; output row order always follows the requested grid.

mod emit;
mod grid;
mod source;

use std::fmt;
use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use bcnoise_core::census::{census_auto, census_oracle, ensemble_expectation};
use bcnoise_core::cube::{CubeFunction, Q};
use bcnoise_core::erasure::{m_lambda_mc_grid, rm1_m_lambda, RankProfile, MAX_EXACT_N};
use bcnoise_core::gf2::{rm1_weight_distribution, sample_random_code_stream};
use bcnoise_core::psi::{psi_moment, psi_variational, PsiMethod};
use bcnoise_core::renyi::{lambda_of, p_ue, theorem12_sides};

use emit::{cell_f, cell_opt, Emitter, ExperimentSpec, OutFormat};
use source::Kind;

#[derive(Parser)]
#[command(
    name = "bcnoise",
    version,
    about = "Erasure profiles, noise-operator norms, psi curves, undetected-error \
             probabilities, and rhombic 4-tuple censuses of binary linear codes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Erasure profile m(lambda)/n over a lambda grid
    Capacity(CapacityArgs),
    /// Noised-norm vs erasure-average comparison rows per (q, eps)
    Renyi(RenyiArgs),
    /// psi(q, gamma) curve by the variational or finite-n moment route
    Psi(PsiArgs),
    /// Undetected-error probability over an eps grid
    Pue(PueArgs),
    /// 4-tuple census per weight level, or a seeded random-code ensemble
    Tuples(TuplesArgs),
}

/// Exactly one code source per run.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct SourceArgs {
    /// Generator matrix file, one 0/1 row per line
    #[arg(long, value_name = "FILE")]
    code: Option<PathBuf>,
    /// Reed-Muller code of order R in M variables
    #[arg(long, num_args = 2, value_names = ["R", "M"])]
    rm: Option<Vec<usize>>,
    /// Kernel of a random LAMBDA*N x N matrix drawn from SEED
    #[arg(long, num_args = 3, value_names = ["N", "LAMBDA", "SEED"])]
    random: Option<Vec<String>>,
    /// Code generated by n/2 disjoint coordinate pairs (even n)
    #[arg(long, value_name = "N")]
    repetition_pair: Option<usize>,
    /// The full space of length N
    #[arg(long, value_name = "N")]
    full: Option<usize>,
    /// The zero code of length N
    #[arg(long, value_name = "N")]
    zero: Option<usize>,
}

#[derive(Args)]
struct OutArgs {
    /// Output file (default: stdout)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Row format; defaults to csv (json for renyi)
    #[arg(long, value_enum)]
    format: Option<OutFormat>,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum CapacityMethod {
    /// Enumerate the full rank profile when n allows, else sample
    Auto,
    Exact,
    Mc,
}

#[derive(Args)]
struct CapacityArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Lambda grid, START:STOP:STEP inclusive or a single value
    #[arg(long, default_value = "0:1:0.05")]
    grid: String,
    #[arg(long, value_enum, default_value_t = CapacityMethod::Auto)]
    method: CapacityMethod,
    /// Monte Carlo erasure-pattern samples per grid
    #[arg(long, default_value_t = 20000)]
    samples: usize,
    /// Monte Carlo seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct RenyiArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Norm index: an integer in 2..=16, or "inf"; repeatable
    #[arg(long, default_value = "4")]
    q: Vec<String>,
    /// Noise-rate grid, START:STOP:STEP inclusive or a single value
    #[arg(long, default_value = "0.05:0.45:0.05")]
    eps: String,
    /// Average over erasure patterns by explicit subset enumeration
    /// instead of the rank identity (n <= 12)
    #[arg(long)]
    exhaustive: bool,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum PsiRoute {
    Variational,
    Moment,
}

#[derive(Args)]
struct PsiArgs {
    /// Norm index (>= 2; non-even values are a flagged extension)
    #[arg(long, default_value_t = 4.0)]
    q: f64,
    /// Relative-weight grid, START:STOP:STEP inclusive or a single value
    #[arg(long, default_value = "0.05:0.5:0.05")]
    gamma: String,
    #[arg(long, value_enum, default_value_t = PsiRoute::Variational)]
    method: PsiRoute,
    /// Table length for the moment route
    #[arg(long, default_value_t = 1024)]
    n: usize,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct PueArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Noise-rate grid, START:STOP:STEP inclusive or a single value
    #[arg(long, default_value = "0.05:0.45:0.05")]
    eps: String,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct TuplesArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Census one weight level only (default: every nonempty level)
    #[arg(long, value_name = "I")]
    level: Option<usize>,
    /// Cross-check each census against the quadratic-loop oracle
    #[arg(long)]
    oracle: bool,
    /// Treat --random as an ensemble descriptor: one row per trial
    #[arg(long)]
    ensemble: bool,
    /// Relative weight for ensemble mode (level = gamma * n)
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    /// Ensemble trial count
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[command(flatten)]
    out: OutArgs,
}

pub enum CliError {
    Core(bcnoise_core::Error),
    Usage(String),
    Io(io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(bcnoise_core::Error::Inconsistency(_)) => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl From<bcnoise_core::Error> for CliError {
    fn from(e: bcnoise_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(io::Error::other(e))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Capacity(a) => cmd_capacity(a),
        Command::Renyi(a) => cmd_renyi(a),
        Command::Psi(a) => cmd_psi(a),
        Command::Pue(a) => cmd_pue(a),
        Command::Tuples(a) => cmd_tuples(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bcnoise: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn parse_q(s: &str) -> Result<Q, CliError> {
    if s.eq_ignore_ascii_case("inf") {
        return Ok(Q::Infinity);
    }
    match s.parse::<u32>() {
        Ok(v) if (2..=16).contains(&v) => Ok(Q::Finite(v as f64)),
        _ => Err(CliError::Usage(format!(
            "--q must be an integer in 2..=16 or \"inf\", got {s:?}"
        ))),
    }
}

fn cmd_capacity(args: CapacityArgs) -> Result<(), CliError> {
    let lams = grid::parse(&args.grid).map_err(CliError::Usage)?;
    let resolved = source::resolve(&args.source)?;

    #[derive(Serialize)]
    struct Row {
        lambda: f64,
        m_over_n: f64,
        stderr: f64,
        method: &'static str,
        seed: u64,
    }

    let rows: Vec<Row> = match &resolved.kind {
        Kind::Rm1Closed { m } => {
            let n = (1u64 << m) as f64;
            lams.iter()
                .map(|&lam| {
                    Ok(Row {
                        lambda: lam,
                        m_over_n: rm1_m_lambda(*m, lam)? / n,
                        stderr: 0.0,
                        method: "exact",
                        seed: args.seed,
                    })
                })
                .collect::<Result<_, CliError>>()?
        }
        Kind::Explicit(code) => {
            let n = code.n() as f64;
            let exact = match args.method {
                CapacityMethod::Exact => true,
                CapacityMethod::Mc => false,
                CapacityMethod::Auto => code.n() <= MAX_EXACT_N,
            };
            if exact {
                let profile = RankProfile::new(code)?;
                lams.iter()
                    .map(|&lam| {
                        Ok(Row {
                            lambda: lam,
                            m_over_n: profile.m_lambda(lam)? / n,
                            stderr: 0.0,
                            method: "exact",
                            seed: args.seed,
                        })
                    })
                    .collect::<Result<_, CliError>>()?
            } else {
                let estimates = m_lambda_mc_grid(code, &lams, args.samples, args.seed)?;
                lams.iter()
                    .zip(estimates)
                    .map(|(&lam, est)| Row {
                        lambda: lam,
                        m_over_n: est.mean / n,
                        stderr: est.stderr / n,
                        method: "mc",
                        seed: args.seed,
                    })
                    .collect()
            }
        }
    };

    let format = args.out.format.unwrap_or(OutFormat::Csv);
    let mut spec = ExperimentSpec::new("capacity", format);
    spec.source = Some(resolved.id.clone());
    spec.grid = Some(args.grid.clone());
    let method = rows.first().map_or("exact", |r| r.method);
    spec.method = Some(method.into());
    if method == "mc" {
        spec.samples = Some(args.samples);
    }
    spec.seed = Some(args.seed);

    let mut em = Emitter::open(args.out.out.as_deref(), format)?;
    em.header(&spec, &[], &["lambda", "m_over_n", "stderr", "method", "seed"])?;
    for r in &rows {
        em.row(
            r,
            vec![
                cell_f(r.lambda),
                cell_f(r.m_over_n),
                cell_f(r.stderr),
                r.method.to_string(),
                r.seed.to_string(),
            ],
        )?;
    }
    em.finish()
}

fn cmd_renyi(args: RenyiArgs) -> Result<(), CliError> {
    let eps_grid = grid::parse(&args.eps).map_err(CliError::Usage)?;
    let qs: Vec<(String, Q)> = args
        .q
        .iter()
        .map(|s| Ok((s.clone(), parse_q(s)?)))
        .collect::<Result<_, CliError>>()?;
    let resolved = source::resolve(&args.source)?;
    let code = resolved.explicit()?;
    let f = CubeFunction::scaled_indicator(code)?;

    #[derive(Serialize)]
    struct Row {
        code_id: String,
        q: String,
        eps: f64,
        lambda: f64,
        lhs: f64,
        rhs: f64,
        bound_type: &'static str,
        seed: Option<u64>,
    }

    let bound_type = if args.exhaustive { "exhaustive" } else { "rank" };
    let mut rows = Vec::new();
    for (q_name, q) in &qs {
        for &eps in &eps_grid {
            let (lhs, rhs) = theorem12_sides(&f, (!args.exhaustive).then_some(code), *q, eps)?;
            rows.push(Row {
                code_id: resolved.id.clone(),
                q: q_name.clone(),
                eps,
                lambda: lambda_of(*q, eps)?,
                lhs,
                rhs,
                bound_type,
                seed: resolved.seed(),
            });
        }
    }

    let format = args.out.format.unwrap_or(OutFormat::Json);
    let mut spec = ExperimentSpec::new("renyi", format);
    spec.source = Some(resolved.id.clone());
    spec.eps = Some(args.eps.clone());
    spec.q = Some(args.q.join(","));
    if args.exhaustive {
        spec.exhaustive = Some(true);
    }
    spec.seed = resolved.seed();

    let mut em = Emitter::open(args.out.out.as_deref(), format)?;
    em.header(
        &spec,
        &[],
        &["code_id", "q", "eps", "lambda", "lhs", "rhs", "bound_type", "seed"],
    )?;
    for r in &rows {
        em.row(
            r,
            vec![
                r.code_id.clone(),
                r.q.clone(),
                cell_f(r.eps),
                cell_f(r.lambda),
                cell_f(r.lhs),
                cell_f(r.rhs),
                r.bound_type.to_string(),
                cell_opt(&r.seed),
            ],
        )?;
    }
    em.finish()
}

fn cmd_psi(args: PsiArgs) -> Result<(), CliError> {
    let gammas = grid::parse(&args.gamma).map_err(CliError::Usage)?;
    let values = gammas
        .iter()
        .map(|&g| match args.method {
            PsiRoute::Variational => psi_variational(args.q, g),
            PsiRoute::Moment => psi_moment(args.q, g, args.n),
        })
        .collect::<Result<Vec<_>, _>>()?;

    #[derive(Serialize)]
    struct Row {
        q: f64,
        gamma: f64,
        psi: f64,
        eps0: Option<f64>,
        method: &'static str,
        n: Option<usize>,
    }

    let method = match args.method {
        PsiRoute::Variational => "variational",
        PsiRoute::Moment => "moment",
    };
    let rows: Vec<Row> = values
        .iter()
        .map(|v| Row {
            q: v.q,
            gamma: v.gamma,
            psi: v.value,
            eps0: v.eps0,
            method,
            n: match v.method {
                PsiMethod::Moment { n, .. } => Some(n),
                PsiMethod::Variational => None,
            },
        })
        .collect();

    let format = args.out.format.unwrap_or(OutFormat::Csv);
    let mut spec = ExperimentSpec::new("psi", format);
    spec.q = Some(cell_f(args.q));
    spec.gamma = Some(args.gamma.clone());
    spec.method = Some(method.into());
    if args.method == PsiRoute::Moment {
        spec.n = Some(args.n);
    }

    let notes = if values.iter().any(|v| v.extension) {
        vec!["note: q outside the even integers; |K|^q extension".to_string()]
    } else {
        Vec::new()
    };
    let mut em = Emitter::open(args.out.out.as_deref(), format)?;
    em.header(&spec, &notes, &["q", "gamma", "psi", "eps0", "method", "n"])?;
    for r in &rows {
        em.row(
            r,
            vec![
                cell_f(r.q),
                cell_f(r.gamma),
                cell_f(r.psi),
                cell_opt(&r.eps0),
                r.method.to_string(),
                cell_opt(&r.n),
            ],
        )?;
    }
    em.finish()
}

fn cmd_pue(args: PueArgs) -> Result<(), CliError> {
    let eps_grid = grid::parse(&args.eps).map_err(CliError::Usage)?;
    let resolved = source::resolve(&args.source)?;
    let (w, n, k) = match &resolved.kind {
        Kind::Rm1Closed { m } => (rm1_weight_distribution(*m)?, 1usize << m, m + 1),
        Kind::Explicit(code) => (code.weight_distribution()?, code.n(), code.k()),
    };

    #[derive(Serialize)]
    struct Row {
        code_id: String,
        n: usize,
        k: usize,
        eps: f64,
        p_ue: f64,
    }

    let rows: Vec<Row> = eps_grid
        .iter()
        .map(|&eps| {
            Ok(Row { code_id: resolved.id.clone(), n, k, eps, p_ue: p_ue(&w, eps)? })
        })
        .collect::<Result<_, CliError>>()?;

    let format = args.out.format.unwrap_or(OutFormat::Csv);
    let mut spec = ExperimentSpec::new("pue", format);
    spec.source = Some(resolved.id.clone());
    spec.eps = Some(args.eps.clone());

    let mut em = Emitter::open(args.out.out.as_deref(), format)?;
    em.header(&spec, &[], &["code_id", "n", "k", "eps", "p_ue"])?;
    for r in &rows {
        em.row(
            r,
            vec![
                r.code_id.clone(),
                r.n.to_string(),
                r.k.to_string(),
                cell_f(r.eps),
                cell_f(r.p_ue),
            ],
        )?;
    }
    em.finish()
}

fn cmd_tuples(args: TuplesArgs) -> Result<(), CliError> {
    let resolved = source::resolve(&args.source)?;
    let format = args.out.format.unwrap_or(OutFormat::Csv);

    if args.ensemble {
        if args.level.is_some() || args.oracle {
            return Err(CliError::Usage(
                "--ensemble does not combine with --level or --oracle".into(),
            ));
        }
        let Some((n, lam, seed)) = resolved.random else {
            return Err(CliError::Usage("--ensemble needs --random N LAMBDA SEED".into()));
        };
        let stats = ensemble_expectation(n, lam, args.gamma, args.trials, seed)?;

        #[derive(Serialize)]
        struct Row {
            code_id: String,
            n: usize,
            k: usize,
            i: usize,
            m: u64,
            total: u128,
            trivial: u128,
            nontrivial: u128,
            trial: usize,
            seed: u64,
        }

        let mut rows = Vec::with_capacity(args.trials);
        for trial in 0..args.trials {
            let code = sample_random_code_stream(n, lam, seed, trial as u64)?;
            let cen = census_auto(&code, stats.i)?;
            rows.push(Row {
                code_id: resolved.id.clone(),
                n,
                k: code.k(),
                i: cen.i,
                m: cen.m,
                total: cen.total,
                trivial: cen.trivial,
                nontrivial: cen.nontrivial,
                trial,
                seed,
            });
        }

        let mut spec = ExperimentSpec::new("tuples", format);
        spec.source = Some(resolved.id.clone());
        spec.gamma = Some(cell_f(args.gamma));
        spec.trials = Some(args.trials);
        spec.seed = Some(seed);
        spec.ensemble = Some(true);

        let q = stats.quantiles;
        let notes = vec![
            format!(
                "ensemble: i={} mean={} std_dev={} formula_moment={} formula_variational={}",
                stats.i,
                cell_f(stats.mean),
                cell_f(stats.std_dev),
                cell_f(stats.formula_moment),
                cell_f(stats.formula_variational)
            ),
            format!(
                "quantiles: min={} q25={} median={} q75={} max={}",
                cell_f(q[0]),
                cell_f(q[1]),
                cell_f(q[2]),
                cell_f(q[3]),
                cell_f(q[4])
            ),
        ];
        let mut em = Emitter::open(args.out.out.as_deref(), format)?;
        em.header(
            &spec,
            &notes,
            &["code_id", "n", "k", "i", "m", "total", "trivial", "nontrivial", "trial", "seed"],
        )?;
        for r in &rows {
            em.row(
                r,
                vec![
                    r.code_id.clone(),
                    r.n.to_string(),
                    r.k.to_string(),
                    r.i.to_string(),
                    r.m.to_string(),
                    r.total.to_string(),
                    r.trivial.to_string(),
                    r.nontrivial.to_string(),
                    r.trial.to_string(),
                    r.seed.to_string(),
                ],
            )?;
        }
        return em.finish();
    }

    let code = resolved.explicit()?;
    let levels: Vec<usize> = match args.level {
        Some(i) => vec![i],
        None => {
            let w = code.weight_distribution()?;
            (0..=code.n()).filter(|&i| w.count(i) > 0).collect()
        }
    };

    #[derive(Serialize)]
    struct Row {
        code_id: String,
        n: usize,
        k: usize,
        i: usize,
        m: u64,
        total: u128,
        trivial: u128,
        nontrivial: u128,
    }

    let mut rows = Vec::with_capacity(levels.len());
    for &i in &levels {
        let cen = census_auto(code, i)?;
        if args.oracle {
            let oracle = census_oracle(code, i)?;
            if oracle != cen {
                return Err(CliError::Core(bcnoise_core::Error::Inconsistency(format!(
                    "census routes disagree at level {i}: {cen:?} vs {oracle:?}"
                ))));
            }
        }
        rows.push(Row {
            code_id: resolved.id.clone(),
            n: code.n(),
            k: code.k(),
            i: cen.i,
            m: cen.m,
            total: cen.total,
            trivial: cen.trivial,
            nontrivial: cen.nontrivial,
        });
    }

    let mut spec = ExperimentSpec::new("tuples", format);
    spec.source = Some(resolved.id.clone());
    spec.level = Some(match args.level {
        Some(i) => i.to_string(),
        None => "all".into(),
    });
    if args.oracle {
        spec.oracle = Some(true);
    }
    spec.seed = resolved.seed();

    let mut em = Emitter::open(args.out.out.as_deref(), format)?;
    em.header(
        &spec,
        &[],
        &["code_id", "n", "k", "i", "m", "total", "trivial", "nontrivial"],
    )?;
    for r in &rows {
        em.row(
            r,
            vec![
                r.code_id.clone(),
                r.n.to_string(),
                r.k.to_string(),
                r.i.to_string(),
                r.m.to_string(),
                r.total.to_string(),
                r.trivial.to_string(),
                r.nontrivial.to_string(),
            ],
        )?;
    }
    em.finish()
}
