//! `kwise`: batch front end for certified k-wise coprime windows.
//!
//! Exit codes: 0 success, 1 mathematically false (e.g. window not coprime),
//! 2 bad input, 3 undecidable at the precision cap.

mod config;
mod output;

use std::io::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kwise_core::banach::{
    build_banach_set, cross_block_check, BanachSet, PipelineProvider, ScanProvider, WitnessProvider,
};
use kwise_core::density::{DensityReport, Experiment};
use kwise_core::powersum::{Exponent, Scalar};
use kwise_core::rigor::{floor_frac, EvalError};
use kwise_core::search::{
    brute_scan, construct_witness_with, ConstructOptions, ScanMode, ScanOptions, StepOptions, StepSearch,
};
use kwise_core::{
    build_constants, check_hypotheses, parse_function, verify_window, BigInt, Error, LadderOverrides, PowerSumExpr,
    Precision,
};
use serde_json::{json, Value};

use output::{Format, Rendered};

const ERROR_SCHEMA: &str = "kwise.error/1";

#[derive(Parser, Debug)]
#[command(name = "kwise", version, about = "Certified k-wise coprime windows in floor sequences")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Largest working precision in bits before a value is declared undecidable.
    #[arg(long, global = true, env = "KWISE_PRECISION_CAP")]
    precision_cap: Option<u32>,
    /// Seed for randomized sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// `key = value` file mirroring the long flags; flags win.
    #[arg(long, global = true)]
    config: Option<std::path::PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct Window {
    /// Function, e.g. "x^1.5" or "x^2 + 1/x".
    #[arg(long)]
    f: String,
    #[arg(long)]
    k: u32,
    #[arg(long = "H")]
    h: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Certified floor and fractional part of f^(order)(x).
    Eval {
        #[arg(long)]
        f: String,
        #[arg(long)]
        x: BigInt,
        #[arg(long, default_value_t = 0)]
        order: u32,
    },
    /// Decide the growth hypotheses for f and k.
    Hypotheses {
        #[arg(long)]
        f: String,
        #[arg(long)]
        k: u32,
    },
    /// Exhaustive search for coprime windows over a range of n.
    Scan {
        #[command(flatten)]
        window: Window,
        /// Inclusive range `lo:hi`.
        #[arg(long)]
        range: String,
        #[arg(long, value_enum, default_value = "kwise")]
        mode: Mode,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Also list every rejected n with a common-factor subset.
        #[arg(long)]
        keep_rejections: bool,
    },
    /// Check the sufficient conditions at n and verify the window directly.
    Certify {
        #[command(flatten)]
        window: Window,
        #[arg(long)]
        n: BigInt,
    },
    /// Show the constant ladder and its admissibility.
    Ladder {
        #[arg(long)]
        k: u32,
        #[arg(long = "H")]
        h: u64,
        /// Overrides such as "C0=2^10,D2=2^67".
        #[arg(long)]
        constants: Option<String>,
    },
    /// Construct a certified witness by descending through the ladder.
    Witness {
        #[command(flatten)]
        window: Window,
        #[arg(long)]
        constants: Option<String>,
        /// Start no lower than this n.
        #[arg(long)]
        min_n: Option<BigInt>,
        /// Record every evaluated point of each step.
        #[arg(long)]
        trace: bool,
        #[arg(long, value_enum, default_value = "binary")]
        search: Search,
    },
    /// Coprimality frequencies against 1/zeta.
    Density {
        #[arg(long, value_enum)]
        experiment: ExperimentKind,
        /// One or more N, comma-separated.
        #[arg(long = "N", value_delimiter = ',', required = true)]
        n: Vec<u64>,
        /// Beatty slope, e.g. "sqrt(2)".
        #[arg(long)]
        alpha: Option<String>,
        /// Floor-power exponent, e.g. "3/2".
        #[arg(long)]
        c: Option<String>,
        /// Functions for multi-gcd; repeat the flag.
        #[arg(long)]
        f: Vec<String>,
    },
    /// Build a set of certified blocks and check it across blocks.
    Banach {
        #[arg(long)]
        f: String,
        #[arg(long)]
        k: u32,
        /// Length of the first block.
        #[arg(long = "H1")]
        h1: u64,
        #[arg(long, default_value_t = 1)]
        r_max: usize,
        #[arg(long, value_enum, default_value = "pipeline")]
        provider: ProviderKind,
        /// Search length for the scan provider.
        #[arg(long, default_value_t = 100_000)]
        scan_limit: u64,
        #[arg(long)]
        constants: Option<String>,
        /// Sampled subsets when exhaustive checking is too large.
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Kwise,
    Pairwise,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Search {
    Binary,
    Linear,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ExperimentKind {
    Dirichlet,
    Beatty,
    FloorPower,
    MultiGcd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ProviderKind {
    Pipeline,
    Scan,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            kind: "input",
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = if e.is_undecidable() {
            (3, "undecidable")
        } else {
            match &e {
                Error::Parse(_) | Error::InvalidInput(_) | Error::Arith(_) | Error::Hypothesis { .. } => (2, "input"),
                Error::Inadmissible(_) => (2, "inadmissible"),
                Error::Eval(EvalError::Domain(_)) => (2, "input"),
                Error::Eval(_) => (3, "undecidable"),
                Error::CertificateInvalid(_) => (1, "certificate"),
                Error::InternalContradiction(_) => (1, "contradiction"),
                Error::Provider(_) => (1, "provider"),
            }
        };
        Failure {
            code,
            kind,
            message: e.to_string(),
        }
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        Error::Eval(e).into()
    }
}

/// Report and exit code of a successful run.
struct Outcome {
    rendered: Rendered,
    code: u8,
}

fn function(text: &str) -> Result<PowerSumExpr, Failure> {
    parse_function(text).map_err(|e| Failure::input(format!("cannot parse `{text}`: {e}")))
}

fn overrides(text: Option<&str>) -> Result<Option<LadderOverrides>, Failure> {
    text.map(|t| t.parse::<LadderOverrides>().map_err(Failure::from)).transpose()
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn envelope(schema: &str, body: Value) -> Value {
    let mut map = serde_json::Map::new();
    map.insert("schema".into(), Value::String(schema.into()));
    if let Value::Object(fields) = body {
        map.extend(fields);
    }
    Value::Object(map)
}

fn parse_range(text: &str) -> Result<(BigInt, BigInt), Failure> {
    let bad = || Failure::input(format!("range `{text}` is not lo:hi"));
    let (lo, hi) = text.split_once(':').ok_or_else(bad)?;
    Ok((lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?))
}

/// A constant such as "sqrt(2)" or "3/2*sqrt(5)".
fn scalar(text: &str) -> Result<Scalar, Failure> {
    let f = function(text)?;
    match f.terms() {
        [t] if t.exponent == Exponent::from_integer(0) => Ok(t.coefficient.clone()),
        _ => Err(Failure::input(format!("`{text}` is not a constant"))),
    }
}

fn exponent(text: &str) -> Result<Exponent, Failure> {
    let f = function(&format!("x^({text})"))?;
    match f.terms() {
        [t] if t.coefficient == Scalar::one() => Ok(t.exponent),
        _ => Err(Failure::input(format!("`{text}` is not an exponent"))),
    }
}

fn run(cli: Cli) -> Result<Outcome, Failure> {
    let prec = cli.global.precision_cap.map(Precision::with_cap).unwrap_or_default();
    if prec.cap_bits == 0 {
        return Err(Failure::input("precision cap must be positive"));
    }
    match cli.command {
        Command::Eval { f, x, order } => {
            let expr = function(&f)?;
            let ff = floor_frac(&expr, &x, order, prec)?;
            let body = json!({
                "f": expr.to_string(),
                "x": x.to_string(),
                "order": order,
                "result": to_value(&ff),
            });
            Ok(Outcome {
                rendered: Rendered::new(envelope("kwise.eval/1", body)),
                code: 0,
            })
        }
        Command::Hypotheses { f, k } => {
            let expr = function(&f)?;
            let report = check_hypotheses(&expr, k);
            let mut body = to_value(&report);
            body["f"] = Value::String(expr.to_string());
            body["admissible"] = Value::Bool(report.admissible());
            Ok(Outcome {
                rendered: Rendered::new(envelope("kwise.hypotheses/1", body)),
                code: if report.admissible() { 0 } else { 1 },
            })
        }
        Command::Scan {
            window,
            range,
            mode,
            jobs,
            keep_rejections,
        } => {
            let expr = function(&window.f)?;
            let (lo, hi) = parse_range(&range)?;
            let options = ScanOptions {
                mode: match mode {
                    Mode::Kwise => ScanMode::Kwise,
                    Mode::Pairwise => ScanMode::Pairwise,
                },
                jobs,
                keep_rejections,
                prec,
            };
            let report = brute_scan(&expr, window.k, window.h, &lo, &hi, &options)?;
            let code = if !report.undecided.is_empty() {
                3
            } else if report.witnesses.is_empty() {
                1
            } else {
                0
            };
            let header = std::iter::once("n".to_string())
                .chain((1..=window.h).map(|h| format!("floor_{h}")))
                .collect();
            let rows = report
                .witnesses
                .iter()
                .map(|w| std::iter::once(w.n.to_string()).chain(w.floors.iter().map(|v| v.to_string())).collect())
                .collect();
            Ok(Outcome {
                rendered: Rendered::new(to_value(&report)).with_table(header, rows),
                code,
            })
        }
        Command::Certify { window, n } => {
            let expr = function(&window.f)?;
            let report = verify_window(&expr, &n, window.k, window.h, prec)?;
            if !report.consistent() {
                return Err(Failure::from(Error::InternalContradiction(format!(
                    "certificate holds at n = {n} but the window is not coprime"
                ))));
            }
            let code = if report.kwise_coprime { 0 } else { 1 };
            let mut value = to_value(&report);
            value["certificate"] = to_value(&report.certificate);
            Ok(Outcome {
                rendered: Rendered::new(value),
                code,
            })
        }
        Command::Ladder { k, h, constants } => {
            let ov = overrides(constants.as_deref())?;
            let (body, code) = match build_constants(k, h, ov.as_ref()) {
                Ok(ladder) => {
                    let mut body = to_value(&ladder);
                    body["admissible"] = Value::Bool(true);
                    body["violations"] = json!([]);
                    body["modulus"] = Value::String(ladder.modulus().to_string());
                    body["max_displacement"] = Value::String(ladder.max_displacement().to_string());
                    (body, 0)
                }
                Err(Error::Inadmissible(violations)) => (
                    json!({ "k": k, "H": h, "admissible": false, "violations": violations }),
                    1,
                ),
                Err(e) => return Err(e.into()),
            };
            Ok(Outcome {
                rendered: Rendered::new(envelope("kwise.ladder/1", body)),
                code,
            })
        }
        Command::Witness {
            window,
            constants,
            min_n,
            trace,
            search,
        } => {
            let expr = function(&window.f)?;
            let ov = overrides(constants.as_deref())?;
            let ladder = build_constants(window.k, window.h, ov.as_ref())?;
            let options = ConstructOptions {
                step: StepOptions {
                    search: match search {
                        Search::Binary => StepSearch::Binary,
                        Search::Linear => StepSearch::Linear,
                    },
                    trace,
                },
                min_n,
            };
            let w = construct_witness_with(&expr, window.k, window.h, Some(&ladder), prec, &options)?;
            let report = verify_window(&expr, &w.n0, window.k, window.h, prec)?;
            let code = if report.kwise_coprime && report.consistent() { 0 } else { 1 };
            let mut body = to_value(&w);
            body["f"] = Value::String(expr.to_string());
            body["verification"] = to_value(&report);
            Ok(Outcome {
                rendered: Rendered::new(envelope("kwise.witness/1", body)),
                code,
            })
        }
        Command::Density {
            experiment,
            n,
            alpha,
            c,
            f,
        } => {
            let exp = match experiment {
                ExperimentKind::Dirichlet => Experiment::Dirichlet,
                ExperimentKind::Beatty => {
                    let alpha = alpha.ok_or_else(|| Failure::input("beatty needs --alpha"))?;
                    Experiment::Beatty(scalar(&alpha)?)
                }
                ExperimentKind::FloorPower => {
                    let c = c.ok_or_else(|| Failure::input("floor-power needs --c"))?;
                    Experiment::FloorPower(exponent(&c)?)
                }
                ExperimentKind::MultiGcd => {
                    if f.is_empty() {
                        return Err(Failure::input("multi-gcd needs at least one --f"));
                    }
                    Experiment::MultiGcd(f.iter().map(|t| function(t)).collect::<Result<_, _>>()?)
                }
            };
            let reports: Vec<DensityReport> = exp.table(&n, prec)?;
            let header = DensityReport::CSV_HEADER.split(',').map(String::from).collect();
            let rows = reports
                .iter()
                .map(|r| r.csv_row().split(',').map(String::from).collect())
                .collect();
            let body = json!({ "schema": kwise_core::density::DENSITY_SCHEMA, "reports": to_value(&reports) });
            Ok(Outcome {
                rendered: Rendered::new(body).with_table(header, rows),
                code: 0,
            })
        }
        Command::Banach {
            f,
            k,
            h1,
            r_max,
            provider,
            scan_limit,
            constants,
            samples,
        } => {
            let expr = function(&f)?;
            let mut provider: Box<dyn WitnessProvider> = match provider {
                ProviderKind::Pipeline => Box::new(PipelineProvider {
                    overrides: overrides(constants.as_deref())?,
                    prec,
                }),
                ProviderKind::Scan => Box::new(ScanProvider { limit: scan_limit, prec }),
            };
            let set: BanachSet = build_banach_set(&expr, k, h1, r_max, provider.as_mut(), prec)?;
            let structural = set.structural_violations();
            let schedule = set.schedule_violations(prec)?;
            let cross = if set.blocks.is_empty() {
                None
            } else {
                Some(cross_block_check(&set, k, samples, cli.global.seed, prec)?)
            };
            let ok = structural.is_empty() && schedule.is_empty() && cross.as_ref().is_none_or(|c| c.coprime);
            let mut body = to_value(&set);
            body["provider"] = Value::String(provider.name().to_string());
            body["structural_violations"] = to_value(&structural);
            body["schedule_violations"] = to_value(&schedule);
            body["cross_block"] = to_value(&cross);
            body["seed"] = json!(cli.global.seed);
            Ok(Outcome {
                rendered: Rendered::new(body),
                code: if ok { 0 } else { 1 },
            })
        }
    }
}

fn emit_error(f: &Failure) {
    let value = json!({
        "schema": ERROR_SCHEMA,
        "kind": f.kind,
        "exit_code": f.code,
        "message": f.message,
    });
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{}", serde_json::to_string(&value).expect("error serializes"));
}

fn main() -> ExitCode {
    let argv = match config::merge(std::env::args().collect()) {
        Ok(a) => a,
        Err(message) => {
            emit_error(&Failure::input(message));
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            emit_error(&Failure::input(e.to_string().trim_end().to_string()));
            return ExitCode::from(2);
        }
    };
    let format = cli.global.format;
    match run(cli) {
        Ok(outcome) => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(outcome.rendered.render(format).as_bytes());
            ExitCode::from(outcome.code)
        }
        Err(f) => {
            emit_error(&f);
            ExitCode::from(f.code)
        }
    }
}
