//! `affdual`: JSON reports for affine-algebra computations.
//!
//! Exit codes: 0 success, 1 verified negative, 2 resource limit,
//! 3 malformed input or bad arguments, 4 failed internal verification.

mod commands;
mod input;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use affdual::algebra::builtin;
use affdual::config::{DEFAULT_LIMIT, REPORT_VERSION};
use affdual::{Algebra, Elem, Error, FiniteAlgebra, Limits, RunConfig};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use commands::Outcome;
use input::Inputs;
use report::Report;

#[derive(Parser)]
#[command(
    name = "affdual",
    version,
    about = "Finite affine algebras: witnesses, congruences, factorizations and arity bounds"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Largest carrier or generated set enumerated.
    #[arg(long, global = true, default_value_t = DEFAULT_LIMIT)]
    max_size: usize,
    /// Largest power `A^n` materialized (defaults to --max-size).
    #[arg(long, global = true)]
    max_power: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Use a builtin algebra as the first algebra argument.
    #[arg(long, global = true)]
    builtin: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Search for an affine witness.
    CheckAffine { algebras: Vec<String> },
    /// Ring of unary ring terms at a basepoint.
    Ring {
        algebras: Vec<String>,
        #[arg(long)]
        basepoint: Option<Elem>,
    },
    /// Least congruence collapsing the subalgebra generated by `--sub`.
    Theta {
        algebras: Vec<String>,
        #[arg(long)]
        sub: String,
        #[arg(long, default_value_t = 1)]
        power: usize,
    },
    /// Quotient of `A^power` by the congruence of `--theta-of`.
    Quotient {
        algebras: Vec<String>,
        #[arg(long)]
        theta_of: String,
        #[arg(long, default_value_t = 1)]
        power: usize,
    },
    /// Subdirect irreducibility and monolith.
    Si { algebras: Vec<String> },
    Subalgebras {
        algebras: Vec<String>,
        #[arg(long, default_value_t = 1)]
        power: usize,
    },
    /// Homomorphisms between two algebras.
    Homs { algebras: Vec<String> },
    /// The group of homomorphisms `A^2 -> S` agreeing with the anchor on the diagonal.
    Hgroup {
        algebras: Vec<String>,
        #[arg(long)]
        anchor: String,
    },
    /// Factor a partial homomorphism through a power of A.
    Factorize {
        algebras: Vec<String>,
        #[arg(long)]
        hom: String,
        #[arg(long)]
        ell: Option<usize>,
        /// Pad to the refined arity bound.
        #[arg(long)]
        refined: bool,
    },
    /// Factor a total homomorphism `A^n -> S` as `q o p`.
    FactorizeTotal {
        algebras: Vec<String>,
        #[arg(long)]
        hom: String,
    },
    /// Proper extension inside an ambient subuniverse, or the generator bound when none exists.
    Extend {
        algebras: Vec<String>,
        #[arg(long)]
        hom: String,
        #[arg(long, default_value = "full")]
        ambient: String,
    },
    MaximalExtend {
        algebras: Vec<String>,
        #[arg(long)]
        hom: String,
        #[arg(long, default_value = "full")]
        ambient: String,
    },
    /// Crude arity bounds, and with --refined the enumeration-backed chain.
    Bounds {
        algebras: Vec<String>,
        #[arg(long)]
        refined: bool,
    },
    /// The eight-element module example and its reference values.
    ExampleSec6,
    /// Counting oracles over a suite of algebras.
    VerifyAppendix {
        #[arg(long, default_value = "default")]
        suite: String,
    },
    /// A derivation of the partial homomorphism from t, projections and small generators.
    CloneMembership {
        algebras: Vec<String>,
        #[arg(long)]
        hom: String,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::CheckAffine { .. } => "check-affine",
            Command::Ring { .. } => "ring",
            Command::Theta { .. } => "theta",
            Command::Quotient { .. } => "quotient",
            Command::Si { .. } => "si",
            Command::Subalgebras { .. } => "subalgebras",
            Command::Homs { .. } => "homs",
            Command::Hgroup { .. } => "hgroup",
            Command::Factorize { .. } => "factorize",
            Command::FactorizeTotal { .. } => "factorize-total",
            Command::Extend { .. } => "extend",
            Command::MaximalExtend { .. } => "maximal-extend",
            Command::Bounds { .. } => "bounds",
            Command::ExampleSec6 => "example-sec6",
            Command::VerifyAppendix { .. } => "verify-appendix",
            Command::CloneMembership { .. } => "clone-membership",
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NotAffine(_) => 1,
        Error::LimitExceeded { .. } => 2,
        Error::Malformed { .. }
        | Error::UnknownSymbol(_)
        | Error::ArityMismatch { .. }
        | Error::SignatureMismatch(_)
        | Error::Precondition(_)
        | Error::Io(_) => 3,
        Error::Verification(_) => 4,
    }
}

/// Loads `min..=max` algebras from `--builtin` and the positional sources.
fn load(
    inputs: &mut Inputs,
    global: &Global,
    sources: &[String],
    min: usize,
    max: usize,
) -> Result<Vec<FiniteAlgebra>, Error> {
    let mut all: Vec<String> = global
        .builtin
        .iter()
        .map(|b| format!("builtin:{b}"))
        .collect();
    all.extend(sources.iter().cloned());
    if all.len() < min || all.len() > max {
        return Err(Error::Precondition(format!(
            "expected {min}..={max} algebras, got {}",
            all.len()
        )));
    }
    all.iter().map(|s| inputs.algebra(s)).collect()
}

fn run(
    cli: &Cli,
    cfg: &RunConfig,
    inputs: &mut Inputs,
) -> Result<(serde_json::Value, Outcome), Error> {
    let g = &cli.global;
    let one = |inputs: &mut Inputs, a: &[String]| load(inputs, g, a, 1, 1).map(|mut v| v.remove(0));
    let two = |inputs: &mut Inputs, a: &[String]| {
        let mut v = load(inputs, g, a, 1, 2)?;
        if v.len() == 1 {
            v.push(v[0].clone());
        }
        Ok::<_, Error>(v)
    };
    Ok(match &cli.command {
        Command::CheckAffine { algebras } => (
            json!({}),
            commands::check_affine(&one(inputs, algebras)?, cfg)?,
        ),
        Command::Ring {
            algebras,
            basepoint,
        } => (
            json!({ "basepoint": basepoint }),
            commands::ring(&one(inputs, algebras)?, *basepoint, cfg)?,
        ),
        Command::Theta {
            algebras,
            sub,
            power,
        } => (
            json!({ "sub": sub, "power": power }),
            commands::theta(&one(inputs, algebras)?, sub, *power, cfg)?,
        ),
        Command::Quotient {
            algebras,
            theta_of,
            power,
        } => (
            json!({ "theta_of": theta_of, "power": power }),
            commands::quotient_by_theta(&one(inputs, algebras)?, theta_of, *power, cfg)?,
        ),
        Command::Si { algebras } => (json!({}), commands::si(&one(inputs, algebras)?, cfg)?),
        Command::Subalgebras { algebras, power } => (
            json!({ "power": power }),
            commands::subalgebras(&one(inputs, algebras)?, *power, cfg)?,
        ),
        Command::Homs { algebras } => {
            let v = two(inputs, algebras)?;
            (json!({}), commands::homs(&v[0], &v[1], cfg)?)
        }
        Command::Hgroup { algebras, anchor } => {
            let v = two(inputs, algebras)?;
            (
                json!({ "anchor": anchor }),
                commands::hgroup(&v[0], &v[1], anchor, cfg)?,
            )
        }
        Command::Factorize {
            algebras,
            hom,
            ell,
            refined,
        } => {
            let v = two(inputs, algebras)?;
            let h = inputs.partial_hom(hom, v[0].size())?;
            (
                json!({ "ell": ell, "refined": refined }),
                commands::factorize(&v[0], &v[1], &h, *ell, *refined, cfg)?,
            )
        }
        Command::FactorizeTotal { algebras, hom } => {
            let v = two(inputs, algebras)?;
            let h = inputs.partial_hom(hom, v[0].size())?;
            (json!({}), commands::factorize_total(&v[0], &v[1], &h, cfg)?)
        }
        Command::Extend {
            algebras,
            hom,
            ambient,
        } => {
            let v = two(inputs, algebras)?;
            let h = inputs.partial_hom(hom, v[0].size())?;
            (
                json!({ "ambient": ambient }),
                commands::extend(&v[0], &v[1], &h, ambient, cfg)?,
            )
        }
        Command::MaximalExtend {
            algebras,
            hom,
            ambient,
        } => {
            let v = two(inputs, algebras)?;
            let h = inputs.partial_hom(hom, v[0].size())?;
            (
                json!({ "ambient": ambient }),
                commands::maximal_extend(&v[0], &v[1], &h, ambient, cfg)?,
            )
        }
        Command::Bounds { algebras, refined } => {
            let v = two(inputs, algebras)?;
            (
                json!({ "refined": refined }),
                commands::bounds(&v[0], Some(&v[1]), *refined, cfg)?,
            )
        }
        Command::ExampleSec6 => (json!({}), commands::example_sec6(cfg)?),
        Command::VerifyAppendix { suite } => {
            let algebras = if suite == "default" {
                inputs.list.push(report::Input {
                    label: "suite:default".into(),
                    bytes: Vec::new(),
                });
                builtin::default_suite()
            } else {
                inputs.suite(suite)?
            };
            let dir = counterexample_dir(g.out.as_deref());
            (
                json!({ "suite": suite }),
                commands::verify_appendix(&algebras, &dir, cfg)?,
            )
        }
        Command::CloneMembership { algebras, hom } => {
            let a = one(inputs, algebras)?;
            let h = inputs.partial_hom(hom, a.size())?;
            (json!({}), commands::clone_member(&a, &h, cfg)?)
        }
    })
}

fn counterexample_dir(out: Option<&Path>) -> PathBuf {
    out.and_then(Path::parent)
        .filter(|p| !p.as_os_str().is_empty())
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let limits = match Limits::new(
        cli.global.max_size,
        cli.global.max_power.unwrap_or(cli.global.max_size),
    ) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    };
    let cfg = RunConfig {
        limits,
        seed: cli.global.seed,
        report_version: REPORT_VERSION,
    };
    let mut inputs = Inputs::default();
    let (arguments, outcome) = match run(&cli, &cfg, &mut inputs) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let text = Report::new(
        cli.command.name(),
        arguments,
        &inputs.list,
        &cfg,
        outcome.result,
    )
    .to_pretty();
    match &cli.global.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(3);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(if outcome.negative { 1 } else { 0 })
}
