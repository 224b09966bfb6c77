//! Command-line surface: order checks, gap sweeps, majorization chains,
//! coupling audits, operator and polynomial evaluation, and the bundled
//! counterexample reproductions.
//!
//! Family specs use a small grammar: `binom(n,x)`, `poiss(l)`, `nb(r,p)`,
//! `geom(p)`, `gamma(a,b)`, `beta(a,b)`, `norm(m,v)`, with rationals
//! written `p/q`; `@path.json` loads a serialized measure. Rational
//! parameters keep binomial commands in the exact regime end to end.
//!
//! Exit codes are uniform: 0 the checked relation holds, 1 it fails,
//! 2 input error, 3 hypothesis failure.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::counterexamples;
use crate::couplings::{self, CouplingError, CouplingKind};
use crate::families::{self, ContinuousFamily, FamilyError};
use crate::majorization::{transfer_chain, ExponentTuple, TupleError};
use crate::measure::{FiniteMeasure, MeasureError};
use crate::muirhead::{self, DistributionPolynomial, MuirheadError, OperatorKind};
use crate::orders::{self, ConvexTestFunction, OrderError};
use crate::scalar::{Regime, Scalar, ScalarParseError};

pub const EXIT_HOLDS: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_HYPOTHESIS: i32 = 3;

/// Default mass budget a discretization grid may exclude.
const DISCRETIZE_TAIL_BUDGET: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot parse family spec {0:?}")]
    BadFamilySpec(String),
    #[error("cannot parse grid {0:?} (want start:stop:count or a comma list)")]
    BadGrid(String),
    #[error("cannot parse test function {0:?}")]
    BadPhi(String),
    #[error("unknown counterexample {0:?} (known: ex2.4, ex3.9)")]
    UnknownCounterexample(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Scalar(#[from] ScalarParseError),
    #[error(transparent)]
    Tuple(#[from] TupleError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error(transparent)]
    Muirhead(#[from] MuirheadError),
    #[error(transparent)]
    Coupling(#[from] CouplingError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Muirhead(MuirheadError::Incomparable(..)) => EXIT_HYPOTHESIS,
            _ => EXIT_INPUT,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "stochastic-orders",
    about = "Stochastic and convex order checks, convolution-inequality sweeps, couplings",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Margin tolerance; defaults to 0 for exact inputs, 1e-9 for float.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Truncation budget for infinite-support families.
    #[arg(long, global = true, default_value_t = 1e-12)]
    tail_eps: f64,
    /// Output format for tabular results.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write tabular output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Random seed for sampling commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether A is below B in the usual stochastic order.
    CheckSt {
        a: String,
        b: String,
        /// Discretization cells for continuous family specs.
        #[arg(long, default_value_t = 4000)]
        cells: usize,
    },
    /// Decide whether A is below B in the convex stochastic order.
    CheckCx {
        a: String,
        b: String,
        #[arg(long, default_value_t = 4000)]
        cells: usize,
    },
    /// Sweep the convolution-inequality gap over a parameter grid.
    RasaSweep {
        family: SweepFamily,
        /// Binomial/operator degree.
        #[arg(long)]
        n: Option<u32>,
        /// First-coordinate grid (binom x, poiss lambda-x).
        #[arg(long)]
        x_grid: Option<String>,
        /// Second-coordinate grid; defaults to the x grid.
        #[arg(long)]
        y_grid: Option<String>,
        /// Negative binomial size grid.
        #[arg(long)]
        r_grid: Option<String>,
        /// Negative binomial probability grid.
        #[arg(long)]
        p_grid: Option<String>,
        /// First shape grid (gamma shape, beta alpha, normal mean).
        #[arg(long)]
        a_grid: Option<String>,
        /// Second shape grid (gamma rate, beta beta).
        #[arg(long)]
        b_grid: Option<String>,
        /// Shared variance for the normal sweep.
        #[arg(long)]
        var: Option<f64>,
        /// Number of stop-loss kinks in the probe battery.
        #[arg(long, default_value_t = 9)]
        battery: usize,
        /// Argument scaling; defaults to 1/(2n) for binom, 1/2 otherwise.
        #[arg(long)]
        scale: Option<String>,
        /// Discretization cells for continuous families.
        #[arg(long, default_value_t = 4000)]
        cells: usize,
    },
    /// Verify the symmetrized convolution order sym(p) <=cx sym(q).
    Muirhead {
        /// Measure specs, one per tuple coordinate.
        specs: Vec<String>,
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
        /// Run even when the measures are not pairwise st-comparable.
        #[arg(long)]
        unconditional: bool,
        #[arg(long, default_value_t = 4000)]
        cells: usize,
    },
    /// Print the single-transfer chain between two exponent tuples.
    Chain {
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
    },
    /// Reproduce a bundled counterexample and assert its values.
    Counterexample { name: String },
    /// Audit a monotone coupling sampler.
    Couple {
        /// One of: poisson, nb, gamma, beta, normal.
        kind: String,
        /// Family parameters, in sampler order.
        params: Vec<f64>,
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        /// KS acceptance bound; defaults to 5.85 / sqrt(n).
        #[arg(long)]
        ks_bound: Option<f64>,
        /// Also print every drawn pair as an `x,y` CSV row.
        #[arg(long)]
        dump_pairs: bool,
    },
    /// Evaluate a positive linear operator at a point.
    EvalOp {
        /// One of: bernstein, szasz, baskakov, beta.
        kind: String,
        /// Degree n (discrete operators) or t (beta operator).
        param: String,
        #[arg(long)]
        phi: String,
        #[arg(long)]
        x: String,
    },
    /// Substitute measures into a distribution polynomial.
    EvalPoly {
        /// Path to the polynomial JSON.
        #[arg(long)]
        poly: PathBuf,
        /// Measure specs, one per variable.
        measures: Vec<String>,
        #[arg(long, default_value_t = 4000)]
        cells: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SweepFamily {
    Binom,
    Poiss,
    Nb,
    Gamma,
    Beta,
    Norm,
}

/// A parsed family spec, not yet realized as a measure.
#[derive(Clone, Debug)]
enum FamilySpec {
    Binom { n: u32, x: Scalar },
    Poiss { lambda: f64 },
    Nb { r: f64, p: f64 },
    Geom { p: f64 },
    Gamma { shape: f64, rate: f64 },
    Beta { alpha: f64, beta: f64 },
    Norm { mean: f64, variance: f64 },
    File(PathBuf),
}

fn parse_family_spec(s: &str) -> Result<FamilySpec, CliError> {
    let s = s.trim();
    if let Some(path) = s.strip_prefix('@') {
        return Ok(FamilySpec::File(PathBuf::from(path)));
    }
    let (name, rest) = s
        .split_once('(')
        .ok_or_else(|| CliError::BadFamilySpec(s.to_string()))?;
    let args_str = rest
        .strip_suffix(')')
        .ok_or_else(|| CliError::BadFamilySpec(s.to_string()))?;
    let args: Vec<Scalar> = args_str
        .split(',')
        .map(Scalar::parse)
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::BadFamilySpec(s.to_string()))?;
    let arity = |want: usize| -> Result<(), CliError> {
        if args.len() == want {
            Ok(())
        } else {
            Err(CliError::BadFamilySpec(s.to_string()))
        }
    };
    match name.trim() {
        "binom" => {
            arity(2)?;
            let n = args[0].to_f64();
            if n < 1.0 || n.fract() != 0.0 {
                return Err(CliError::BadFamilySpec(s.to_string()));
            }
            Ok(FamilySpec::Binom {
                n: n as u32,
                x: args[1].clone(),
            })
        }
        "poiss" => {
            arity(1)?;
            Ok(FamilySpec::Poiss {
                lambda: args[0].to_f64(),
            })
        }
        "nb" => {
            arity(2)?;
            Ok(FamilySpec::Nb {
                r: args[0].to_f64(),
                p: args[1].to_f64(),
            })
        }
        "geom" => {
            arity(1)?;
            Ok(FamilySpec::Geom {
                p: args[0].to_f64(),
            })
        }
        "gamma" => {
            arity(2)?;
            Ok(FamilySpec::Gamma {
                shape: args[0].to_f64(),
                rate: args[1].to_f64(),
            })
        }
        "beta" => {
            arity(2)?;
            Ok(FamilySpec::Beta {
                alpha: args[0].to_f64(),
                beta: args[1].to_f64(),
            })
        }
        "norm" => {
            arity(2)?;
            Ok(FamilySpec::Norm {
                mean: args[0].to_f64(),
                variance: args[1].to_f64(),
            })
        }
        _ => Err(CliError::BadFamilySpec(s.to_string())),
    }
}

impl FamilySpec {
    /// Build the finite measure: discrete families directly, continuous
    /// families through their default-bounds discretization.
    fn realize(&self, tail_eps: f64, cells: usize) -> Result<FiniteMeasure, CliError> {
        match self {
            FamilySpec::Binom { n, x } => Ok(families::binomial(*n, x)?),
            FamilySpec::Poiss { lambda } => Ok(families::poisson(*lambda, tail_eps)?),
            FamilySpec::Nb { r, p } => Ok(families::negative_binomial(*r, *p, tail_eps)?),
            FamilySpec::Geom { p } => Ok(families::geometric(*p, tail_eps)?),
            FamilySpec::Gamma { shape, rate } => {
                discretize_default(ContinuousFamily::gamma(*shape, *rate)?, cells)
            }
            FamilySpec::Beta { alpha, beta } => {
                discretize_default(ContinuousFamily::beta(*alpha, *beta)?, cells)
            }
            FamilySpec::Norm { mean, variance } => {
                discretize_default(ContinuousFamily::normal(*mean, *variance)?, cells)
            }
            FamilySpec::File(path) => {
                let text = fs::read_to_string(path)?;
                let value: serde_json::Value = serde_json::from_str(&text)?;
                Ok(FiniteMeasure::from_json(&value)?)
            }
        }
    }
}

fn discretize_default(family: ContinuousFamily, cells: usize) -> Result<FiniteMeasure, CliError> {
    let (lo, hi) = family.default_bounds();
    Ok(family.discretize(cells, lo, hi, DISCRETIZE_TAIL_BUDGET)?)
}

/// Grids come as `start:stop:count` (rational endpoints give exact
/// rational points) or an explicit comma list.
fn parse_grid(s: &str) -> Result<Vec<Scalar>, CliError> {
    let s = s.trim();
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::BadGrid(s.to_string()));
        }
        let start = Scalar::parse(parts[0]).map_err(|_| CliError::BadGrid(s.to_string()))?;
        let stop = Scalar::parse(parts[1]).map_err(|_| CliError::BadGrid(s.to_string()))?;
        let count: usize = parts[2]
            .parse()
            .map_err(|_| CliError::BadGrid(s.to_string()))?;
        if count == 0 {
            return Err(CliError::BadGrid(s.to_string()));
        }
        if count == 1 {
            return Ok(vec![start]);
        }
        let step = &(&stop - &start) / &Scalar::from_int(count as i64 - 1);
        Ok((0..count)
            .map(|i| &start + &(&step * &Scalar::from_int(i as i64)))
            .collect())
    } else {
        s.split(',')
            .map(|p| Scalar::parse(p).map_err(|_| CliError::BadGrid(s.to_string())))
            .collect()
    }
}

/// Probe function grammar: `square`, `stoploss(t)`, `absdev(c)`, `exp(s)`,
/// `affine(a,b)`, `const(c)`.
#[derive(Clone, Debug)]
enum PhiSpec {
    Battery(ConvexTestFunction),
    Affine { slope: Scalar, intercept: Scalar },
    Const(Scalar),
}

impl PhiSpec {
    fn parse(s: &str) -> Result<PhiSpec, CliError> {
        let s = s.trim();
        if s == "square" {
            return Ok(PhiSpec::Battery(ConvexTestFunction::Square));
        }
        let (name, rest) = s
            .split_once('(')
            .ok_or_else(|| CliError::BadPhi(s.to_string()))?;
        let args: Vec<Scalar> = rest
            .strip_suffix(')')
            .ok_or_else(|| CliError::BadPhi(s.to_string()))?
            .split(',')
            .map(Scalar::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| CliError::BadPhi(s.to_string()))?;
        match (name.trim(), args.len()) {
            ("stoploss", 1) => Ok(PhiSpec::Battery(ConvexTestFunction::StopLoss {
                kink: args[0].clone(),
            })),
            ("absdev", 1) => Ok(PhiSpec::Battery(ConvexTestFunction::AbsDev {
                center: args[0].clone(),
            })),
            ("exp", 1) => Ok(PhiSpec::Battery(ConvexTestFunction::ExpScaled {
                rate: args[0].clone(),
            })),
            ("affine", 2) => Ok(PhiSpec::Affine {
                slope: args[0].clone(),
                intercept: args[1].clone(),
            }),
            ("const", 1) => Ok(PhiSpec::Const(args[0].clone())),
            _ => Err(CliError::BadPhi(s.to_string())),
        }
    }

    fn eval(&self, x: &Scalar) -> Scalar {
        match self {
            PhiSpec::Battery(phi) => phi.eval(x),
            PhiSpec::Affine { slope, intercept } => &(slope * x) + intercept,
            PhiSpec::Const(c) => c.clone(),
        }
    }

    fn kinks(&self) -> Vec<f64> {
        match self {
            PhiSpec::Battery(phi) => phi.kinks(),
            _ => Vec::new(),
        }
    }
}

/// One sweep row: the gap of a single (parameter point, probe function)
/// pair.
#[derive(Clone, Debug, Serialize)]
pub struct GapReport {
    pub family: String,
    pub params: String,
    pub phi_kind: String,
    pub phi_param: Option<Scalar>,
    pub scale: Scalar,
    pub gap: Scalar,
    pub regime: String,
}

impl GapReport {
    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.family,
            self.params,
            self.phi_kind,
            self.phi_param
                .as_ref()
                .map(|p| p.to_string())
                .unwrap_or_default(),
            self.scale,
            self.gap,
            self.regime
        )
    }
}

const GAP_CSV_HEADER: &str = "family,params,phi_kind,phi_param,scale,gap,regime";

/// Entry point used by `main`: parse real argv, write to real stdout.
pub fn main() -> i32 {
    let args: Vec<String> = std::env::args().collect();
    let mut stdout = std::io::stdout().lock();
    run(&args, &mut stdout)
}

/// Parse `args` (including argv[0]) and execute, writing results to `out`.
/// Returns the process exit code.
pub fn run(args: &[String], out: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests print through clap and exit 0.
            if e.use_stderr() {
                eprintln!("{e}");
                return EXIT_INPUT;
            }
            print!("{e}");
            return EXIT_HOLDS;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    match &cli.command {
        Command::CheckSt { a, b, cells } => {
            let (ma, mb, tol) = realize_pair(a, b, cli, *cells)?;
            let verdict = orders::check_st(&ma, &mb, tol)?;
            writeln!(out, "{}", serde_json::to_string(&verdict)?)?;
            Ok(if verdict.holds {
                EXIT_HOLDS
            } else {
                EXIT_FAILS
            })
        }
        Command::CheckCx { a, b, cells } => {
            let (ma, mb, tol) = realize_pair(a, b, cli, *cells)?;
            let verdict = orders::check_cx(&ma, &mb, tol)?;
            writeln!(out, "{}", serde_json::to_string(&verdict)?)?;
            Ok(if verdict.holds {
                EXIT_HOLDS
            } else {
                EXIT_FAILS
            })
        }
        Command::RasaSweep { .. } => run_sweep(cli, out),
        Command::Muirhead {
            specs,
            p,
            q,
            unconditional,
            cells,
        } => {
            if specs.is_empty() {
                return Err(CliError::Invalid("no measure specs given".into()));
            }
            let measures: Vec<FiniteMeasure> = specs
                .iter()
                .map(|s| parse_family_spec(s)?.realize(cli.tail_eps, *cells))
                .collect::<Result<_, _>>()?;
            let p = ExponentTuple::parse(p)?;
            let q = ExponentTuple::parse(q)?;
            let tol = resolve_tol(cli, measures.iter());
            let report = muirhead::verify_muirhead(&measures, &p, &q, tol, *unconditional)?;
            let chain: Vec<String> = report.chain.iter().map(|t| t.to_string()).collect();
            let payload = serde_json::json!({
                "comparable": report.comparable,
                "incomparable_pair": report.incomparable_pair,
                "chain": chain,
                "step_verdicts": report.step_verdicts,
                "endpoint": report.endpoint,
                "consistent": report.consistent,
            });
            writeln!(out, "{payload}")?;
            if !report.consistent {
                eprintln!("warning: step verdicts disagree with the endpoint verdict");
            }
            Ok(if report.holds() {
                EXIT_HOLDS
            } else {
                EXIT_FAILS
            })
        }
        Command::Chain { p, q } => {
            let p = ExponentTuple::parse(p)?;
            let q = ExponentTuple::parse(q)?;
            let chain = transfer_chain(&p, &q)?;
            match cli.format {
                Format::Json => {
                    let tuples: Vec<String> = chain.iter().map(|t| t.to_string()).collect();
                    writeln!(out, "{}", serde_json::to_string(&tuples)?)?;
                }
                Format::Csv => {
                    for t in &chain {
                        writeln!(out, "{t}")?;
                    }
                }
            }
            Ok(EXIT_HOLDS)
        }
        Command::Counterexample { name } => match name.as_str() {
            "ex2.4" => {
                let report = counterexamples::run_incomparable_pair()?;
                writeln!(out, "{}", serde_json::to_string(&report)?)?;
                Ok(if report.passed {
                    EXIT_HOLDS
                } else {
                    EXIT_FAILS
                })
            }
            "ex3.9" => {
                let report = counterexamples::run_polynomial_pair()?;
                writeln!(out, "{}", serde_json::to_string(&report)?)?;
                Ok(if report.passed {
                    EXIT_HOLDS
                } else {
                    EXIT_FAILS
                })
            }
            other => Err(CliError::UnknownCounterexample(other.to_string())),
        },
        Command::Couple {
            kind,
            params,
            n,
            ks_bound,
            dump_pairs,
        } => {
            let kind = parse_coupling(kind, params)?;
            if *dump_pairs {
                // Same seed as the audit, so the rows are what it counted.
                let mut sampler = couplings::CouplingSampler::new(kind, cli.seed)?;
                writeln!(out, "x,y")?;
                for _ in 0..*n {
                    let pair = sampler.draw();
                    writeln!(out, "{},{}", pair.x, pair.y)?;
                }
            }
            let report = couplings::audit(kind, *n, cli.seed)?;
            writeln!(out, "{}", serde_json::to_string(&report)?)?;
            let bound = ks_bound.unwrap_or(5.85 / (*n as f64).sqrt());
            let ok = report.dominance_violations == 0
                && report.ks_distance_x < bound
                && report.ks_distance_y < bound;
            Ok(if ok { EXIT_HOLDS } else { EXIT_FAILS })
        }
        Command::EvalOp {
            kind,
            param,
            phi,
            x,
        } => {
            let phi = PhiSpec::parse(phi)?;
            let x = Scalar::parse(x)?;
            let op = parse_operator(kind, param)?;
            let value =
                muirhead::eval_operator(&op, |v| phi.eval(v), &phi.kinks(), &x, cli.tail_eps)?;
            writeln!(out, "{}", serde_json::json!({ "value": value, "x": x }))?;
            Ok(EXIT_HOLDS)
        }
        Command::EvalPoly {
            poly,
            measures,
            cells,
        } => {
            if measures.is_empty() {
                return Err(CliError::Invalid("no measure specs given".into()));
            }
            let text = fs::read_to_string(poly)?;
            let poly: DistributionPolynomial = serde_json::from_str(&text)?;
            let ms: Vec<FiniteMeasure> = measures
                .iter()
                .map(|s| parse_family_spec(s)?.realize(cli.tail_eps, *cells))
                .collect::<Result<_, _>>()?;
            let result = poly.eval(&ms)?;
            writeln!(out, "{}", serde_json::to_string(&result)?)?;
            Ok(EXIT_HOLDS)
        }
    }
}

fn realize_pair(
    a: &str,
    b: &str,
    cli: &Cli,
    cells: usize,
) -> Result<(FiniteMeasure, FiniteMeasure, f64), CliError> {
    let ma = parse_family_spec(a)?.realize(cli.tail_eps, cells)?;
    let mb = parse_family_spec(b)?.realize(cli.tail_eps, cells)?;
    let tol = resolve_tol(cli, [&ma, &mb].into_iter());
    Ok((ma, mb, tol))
}

/// Zero tolerance when everything is exact (verdicts become certificates),
/// 1e-9 otherwise, unless the user said --tol.
fn resolve_tol<'a, I: Iterator<Item = &'a FiniteMeasure>>(cli: &Cli, mut measures: I) -> f64 {
    cli.tol.unwrap_or_else(|| {
        if measures.all(|m| m.regime() == Regime::Exact) {
            0.0
        } else {
            1e-9
        }
    })
}

fn parse_coupling(kind: &str, params: &[f64]) -> Result<CouplingKind, CliError> {
    let want = |n: usize| -> Result<(), CliError> {
        if params.len() == n {
            Ok(())
        } else {
            Err(CliError::Invalid(format!(
                "coupling {kind} takes {n} parameters, got {}",
                params.len()
            )))
        }
    };
    match kind {
        "poisson" => {
            want(2)?;
            Ok(CouplingKind::Poisson {
                lambda_lo: params[0],
                lambda_hi: params[1],
            })
        }
        "nb" => {
            want(4)?;
            Ok(CouplingKind::NegativeBinomial {
                r_lo: params[0],
                p_lo: params[1],
                r_hi: params[2],
                p_hi: params[3],
            })
        }
        "gamma" => {
            want(4)?;
            Ok(CouplingKind::Gamma {
                shape_lo: params[0],
                rate_lo: params[1],
                shape_hi: params[2],
                rate_hi: params[3],
            })
        }
        "beta" => {
            want(4)?;
            Ok(CouplingKind::Beta {
                alpha_lo: params[0],
                beta_lo: params[1],
                alpha_hi: params[2],
                beta_hi: params[3],
            })
        }
        "normal" => {
            want(3)?;
            Ok(CouplingKind::NormalShift {
                mean_lo: params[0],
                mean_hi: params[1],
                variance: params[2],
            })
        }
        other => Err(CliError::Invalid(format!(
            "unknown coupling kind {other:?}"
        ))),
    }
}

fn parse_operator(kind: &str, param: &str) -> Result<OperatorKind, CliError> {
    match kind {
        "bernstein" | "szasz" | "baskakov" => {
            let n: u32 = param
                .parse()
                .map_err(|_| CliError::Invalid(format!("bad operator degree {param:?}")))?;
            Ok(match kind {
                "bernstein" => OperatorKind::Bernstein { n },
                "szasz" => OperatorKind::Szasz { n },
                _ => OperatorKind::Baskakov { n },
            })
        }
        "beta" => {
            let t: f64 = param
                .parse()
                .map_err(|_| CliError::Invalid(format!("bad operator parameter {param:?}")))?;
            Ok(OperatorKind::Beta { t })
        }
        other => Err(CliError::Invalid(format!("unknown operator {other:?}"))),
    }
}

/// A sweep cell: the pair of measures, a printable parameter string, and
/// whether the family-specific comparability hypothesis holds for it.
struct SweepCell {
    a: FiniteMeasure,
    b: FiniteMeasure,
    params: String,
    hypothesis_ok: bool,
    /// Discretization budget for continuous families, zero otherwise.
    eps_grid: f64,
}

fn run_sweep(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let Command::RasaSweep {
        family,
        n,
        x_grid,
        y_grid,
        r_grid,
        p_grid,
        a_grid,
        b_grid,
        var,
        battery,
        scale,
        cells,
    } = &cli.command
    else {
        unreachable!("run_sweep is only called on RasaSweep");
    };

    let scale_default = |fam: SweepFamily| -> Scalar {
        match fam {
            SweepFamily::Binom => Scalar::from_ratio(1, 2 * n.unwrap_or(1) as i64),
            _ => Scalar::from_ratio(1, 2),
        }
    };
    let scale = match scale {
        Some(s) => Scalar::parse(s)?,
        None => scale_default(*family),
    };
    if scale.is_zero() {
        return Err(CliError::Invalid("scale must be nonzero".into()));
    }

    let mut cells_list: Vec<SweepCell> = Vec::new();
    match family {
        SweepFamily::Binom => {
            let n = n.ok_or_else(|| CliError::Invalid("binom sweep needs --n".into()))?;
            let xg = parse_grid(
                x_grid
                    .as_deref()
                    .ok_or_else(|| CliError::Invalid("binom sweep needs --x-grid".into()))?,
            )?;
            let yg = match y_grid {
                Some(g) => parse_grid(g)?,
                None => xg.clone(),
            };
            for x in &xg {
                let mx = families::binomial(n, x)?;
                for y in &yg {
                    let my = families::binomial(n, y)?;
                    cells_list.push(SweepCell {
                        a: mx.clone(),
                        b: my,
                        params: format!("n={n};x={x};y={y}"),
                        hypothesis_ok: true,
                        eps_grid: 0.0,
                    });
                }
            }
        }
        SweepFamily::Poiss => {
            let xg = parse_grid(
                x_grid
                    .as_deref()
                    .ok_or_else(|| CliError::Invalid("poiss sweep needs --x-grid".into()))?,
            )?;
            let yg = match y_grid {
                Some(g) => parse_grid(g)?,
                None => xg.clone(),
            };
            for x in &xg {
                let mx = families::poisson(x.to_f64(), cli.tail_eps)?;
                for y in &yg {
                    let my = families::poisson(y.to_f64(), cli.tail_eps)?;
                    cells_list.push(SweepCell {
                        a: mx.clone(),
                        b: my,
                        params: format!("x={x};y={y}"),
                        hypothesis_ok: true,
                        eps_grid: 0.0,
                    });
                }
            }
        }
        SweepFamily::Nb => {
            let rg = parse_grid(
                r_grid
                    .as_deref()
                    .ok_or_else(|| CliError::Invalid("nb sweep needs --r-grid".into()))?,
            )?;
            let pg = parse_grid(
                p_grid
                    .as_deref()
                    .ok_or_else(|| CliError::Invalid("nb sweep needs --p-grid".into()))?,
            )?;
            for r1 in &rg {
                for p1 in &pg {
                    let a = families::negative_binomial(r1.to_f64(), p1.to_f64(), cli.tail_eps)?;
                    for r2 in &rg {
                        for p2 in &pg {
                            let b = families::negative_binomial(
                                r2.to_f64(),
                                p2.to_f64(),
                                cli.tail_eps,
                            )?;
                            let ok =
                                (r1.to_f64() - r2.to_f64()) * (p1.to_f64() - p2.to_f64()) >= 0.0;
                            cells_list.push(SweepCell {
                                a: a.clone(),
                                b,
                                params: format!("r1={r1};p1={p1};r2={r2};p2={p2}"),
                                hypothesis_ok: ok,
                                eps_grid: 0.0,
                            });
                        }
                    }
                }
            }
        }
        SweepFamily::Gamma | SweepFamily::Beta => {
            let ag = parse_grid(
                a_grid
                    .as_deref()
                    .ok_or_else(|| CliError::Invalid("sweep needs --a-grid".into()))?,
            )?;
            let bg = parse_grid(
                b_grid
                    .as_deref()
                    .ok_or_else(|| CliError::Invalid("sweep needs --b-grid".into()))?,
            )?;
            let make = |a: f64, b: f64| -> Result<(FiniteMeasure, f64), CliError> {
                let fam = match family {
                    SweepFamily::Gamma => ContinuousFamily::gamma(a, b)?,
                    _ => ContinuousFamily::beta(a, b)?,
                };
                let (lo, hi) = fam.default_bounds();
                let m = fam.discretize(*cells, lo, hi, DISCRETIZE_TAIL_BUDGET)?;
                Ok((m, (hi - lo) / *cells as f64))
            };
            let mut pool = Vec::new();
            for a in &ag {
                for b in &bg {
                    let (m, h) = make(a.to_f64(), b.to_f64())?;
                    pool.push((a.clone(), b.clone(), m, h));
                }
            }
            for (a1, b1, m1, h1) in &pool {
                for (a2, b2, m2, h2) in &pool {
                    let ok = (a1.to_f64() - a2.to_f64()) * (b1.to_f64() - b2.to_f64()) <= 0.0;
                    let diam = (m1.support_diameter().to_f64() + m2.support_diameter().to_f64())
                        * scale.to_f64().abs();
                    let eps_grid = diam * h1.max(*h2) * scale.to_f64().abs();
                    cells_list.push(SweepCell {
                        a: m1.clone(),
                        b: m2.clone(),
                        params: format!("a1={a1};b1={b1};a2={a2};b2={b2}"),
                        hypothesis_ok: ok,
                        eps_grid,
                    });
                }
            }
        }
        SweepFamily::Norm => {
            let mg =
                parse_grid(a_grid.as_deref().ok_or_else(|| {
                    CliError::Invalid("norm sweep needs --a-grid (means)".into())
                })?)?;
            let variance = var.ok_or_else(|| CliError::Invalid("norm sweep needs --var".into()))?;
            let mut pool = Vec::new();
            for m in &mg {
                let fam = ContinuousFamily::normal(m.to_f64(), variance)?;
                let (lo, hi) = fam.default_bounds();
                let meas = fam.discretize(*cells, lo, hi, DISCRETIZE_TAIL_BUDGET)?;
                pool.push((m.clone(), meas, (hi - lo) / *cells as f64));
            }
            for (m1, a, h1) in &pool {
                for (m2, b, h2) in &pool {
                    let diam = (a.support_diameter().to_f64() + b.support_diameter().to_f64())
                        * scale.to_f64().abs();
                    let eps_grid = diam * h1.max(*h2) * scale.to_f64().abs();
                    cells_list.push(SweepCell {
                        a: a.clone(),
                        b: b.clone(),
                        params: format!("m1={m1};m2={m2};var={variance}"),
                        hypothesis_ok: true,
                        eps_grid,
                    });
                }
            }
        }
    }
    if cells_list.is_empty() {
        return Err(CliError::Invalid("sweep grid is empty".into()));
    }

    // Probe battery over the scaled support hull. The exponential member is
    // omitted: it cannot be evaluated exactly in the exact regime, and for
    // truncated unbounded laws its moment is dominated by the truncated
    // tail rather than the inequality under test.
    let mut lo: Option<Scalar> = None;
    let mut hi: Option<Scalar> = None;
    for cell in &cells_list {
        for m in [&cell.a, &cell.b] {
            let two = Scalar::from_int(2);
            let l = &(m.min_support() * &two) * &scale;
            let h = &(m.max_support() * &two) * &scale;
            let (l, h) = if l <= h { (l, h) } else { (h, l) };
            lo = Some(match lo {
                None => l.clone(),
                Some(cur) => cur.min(l),
            });
            hi = Some(match hi {
                None => h.clone(),
                Some(cur) => cur.max(h),
            });
        }
    }
    let (lo, hi) = (lo.unwrap(), hi.unwrap());
    let battery: Vec<ConvexTestFunction> = orders::convex_battery(&lo, &hi, *battery)?
        .into_iter()
        .filter(|phi| phi.preserves_exactness())
        .collect();

    let tol = resolve_tol(cli, cells_list.iter().map(|c| &c.a));
    let family_name = format!("{family:?}").to_lowercase();

    let mut rows: Vec<GapReport> = Vec::new();
    let mut min_gap: Option<(f64, usize)> = None;
    let mut violations = 0usize;
    let mut worst_allowance = 0.0f64;
    let mut gap_failure = false;
    for cell in &cells_list {
        if !cell.hypothesis_ok {
            violations += 1;
            eprintln!(
                "warning: comparability hypothesis violated at {}",
                cell.params
            );
        }
        let gaps = muirhead::rasa_gap_battery(&cell.a, &cell.b, &battery, &scale)?;
        for (phi, gap) in battery.iter().zip(gaps) {
            let gap_f = gap.to_f64();
            rows.push(GapReport {
                family: family_name.clone(),
                params: cell.params.clone(),
                phi_kind: phi.kind_name().to_string(),
                phi_param: phi.param().cloned(),
                scale: scale.clone(),
                gap,
                regime: cell.a.regime().join(cell.b.regime()).as_str().to_string(),
            });
            let idx = rows.len() - 1;
            if min_gap.is_none_or(|(g, _)| gap_f < g) {
                min_gap = Some((gap_f, idx));
            }
            // Rows violating the comparability hypothesis carry no claim,
            // so they never fail the sweep.
            if cell.hypothesis_ok {
                worst_allowance = worst_allowance.max(tol + cell.eps_grid);
                if gap_f < -(tol + cell.eps_grid) {
                    gap_failure = true;
                    eprintln!(
                        "negative gap {gap_f} at {} with {}",
                        cell.params,
                        phi.kind_name()
                    );
                }
            }
        }
    }

    let table = match cli.format {
        Format::Csv => {
            let mut text = String::from(GAP_CSV_HEADER);
            text.push('\n');
            for row in &rows {
                text.push_str(&row.csv_row());
                text.push('\n');
            }
            text
        }
        Format::Json => {
            let mut text = serde_json::to_string(&rows)?;
            text.push('\n');
            text
        }
    };
    match &cli.out {
        Some(path) => fs::write(path, table)?,
        None => out.write_all(table.as_bytes())?,
    }

    let (min_gap_value, argmin) = min_gap.expect("at least one row");
    let summary = serde_json::json!({
        "rows": rows.len(),
        "min_gap": min_gap_value,
        "argmin": {
            "params": rows[argmin].params,
            "phi_kind": rows[argmin].phi_kind,
            "phi_param": rows[argmin].phi_param,
        },
        "tolerance": tol,
        "max_allowance": worst_allowance,
        "hypothesis_violations": violations,
    });
    writeln!(out, "{summary}")?;
    Ok(if gap_failure { EXIT_FAILS } else { EXIT_HOLDS })
}
