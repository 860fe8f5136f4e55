//! Subcommand dispatch, the error-to-exit-code contract, and shared
//! resolution helpers.
//!
//! Exit codes: 0 success, 1 computational or i/o failure, 2 configuration
//! rejected before any computation started (clap's own usage errors also
//! exit 2).

mod cphi;
mod correlate;
mod irreducibles;
mod lambda;
mod lift;
mod measure;
mod search;
mod search_in_class;

use std::collections::BTreeMap;
use std::fmt::Display;

use serde::Serialize;
use thiserror::Error;

use fqsieve::bump::Bump;
use fqsieve::divisor::CurveModel;
use fqsieve::patterns::{PrimeClassCertificate, SearchOutcome, SearchStatus};
use fqsieve::poly::{self, Poly};
use fqsieve::sieve::SieveParams;
use fqsieve::Fq;

use crate::cache::CacheError;
use crate::config::{Cli, Command, Resolver};
use crate::output;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Cache(#[from] CacheError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}

/// Wrap a library error that arose mid-computation.
pub fn comp<E: Display>(err: E) -> CliError {
    CliError::Compute(err.to_string())
}

/// Wrap a library error that rejected the inputs up front.
pub fn config_err<E: Display>(err: E) -> CliError {
    CliError::Config(err.to_string())
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    if cli.global.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.global.threads)
            .build_global()
            .map_err(comp)?;
    }
    let text = match &cli.command {
        Command::Irreducibles(args) => irreducibles::run(&cli.global, args)?,
        Command::Lambda(args) => lambda::run(&cli.global, args)?,
        Command::Cphi(args) => cphi::run(&cli.global, args)?,
        Command::Measure(args) => measure::run(&cli.global, args)?,
        Command::Correlate(args) => correlate::run(&cli.global, args)?,
        Command::Lift(args) => lift::run(&cli.global, args)?,
        Command::Search(args) => search::run(&cli.global, args)?,
        Command::SearchInClass(args) => search_in_class::run(&cli.global, args)?,
    };
    output::deliver(cli.global.out.as_deref(), &text)
}

/// `q` is the base prime of F_{q^e}; `e` defaults to 1.
pub fn resolve_field(
    res: &mut Resolver,
    q: Option<u32>,
    e: Option<u32>,
) -> Result<Fq, CliError> {
    let q = res.get("q", q, None)?;
    let e = res.get("e", e, Some(1))?;
    Fq::new(q, e).map_err(config_err)
}

pub fn resolve_bump(res: &mut Resolver, flag: Option<String>) -> Result<Bump, CliError> {
    let label = res.get("bump", flag, Some("mollifier".to_string()))?;
    Bump::from_label(&label)
        .ok_or_else(|| CliError::Config(format!("unknown bump label `{label}`")))
}

pub fn parse_poly(fq: &Fq, text: &str, what: &str) -> Result<Poly, CliError> {
    poly::parse(fq, text)
        .map_err(|e| CliError::Config(format!("{what} `{text}`: {e}")))
}

/// The shared sieve-parameter block (affine line model): radius, cutoff,
/// class shape k, small-prime degree bound w, and numerator offset α.
pub struct SieveSpec {
    pub fq: Fq,
    pub params: SieveParams,
}

/// The sieve-parameter flags shared by `measure` and `correlate`, still
/// unresolved against config file and defaults.
pub struct SieveFlags {
    pub q: Option<u32>,
    pub e: Option<u32>,
    pub r: Option<u32>,
    pub truncation: Option<f64>,
    pub k: Option<u32>,
    pub w: Option<u32>,
    pub alpha: Option<String>,
    pub bump: Option<String>,
}

pub fn resolve_sieve(res: &mut Resolver, flags: SieveFlags) -> Result<SieveSpec, CliError> {
    let fq = resolve_field(res, flags.q, flags.e)?;
    let r = res.get("r", flags.r, None)?;
    let truncation = res.get("truncation", flags.truncation, None)?;
    let k = res.get("k", flags.k, Some(1))?;
    let w = res.get("w", flags.w, Some(1))?;
    let alpha_text = res.get("alpha", flags.alpha, Some("1".to_string()))?;
    let alpha = parse_poly(&fq, &alpha_text, "alpha")?;
    let bump = resolve_bump(res, flags.bump)?;
    let params = SieveParams::new(CurveModel::line(fq.clone()), r, truncation, k, w, alpha, bump)
        .map_err(config_err)?;
    Ok(SieveSpec { fq, params })
}

/// JSON artifact of the search subcommands: echo first, then the outcome.
#[derive(Debug, Serialize)]
pub struct SearchDoc {
    pub echo: BTreeMap<String, String>,
    pub status: SearchStatus,
    pub examined: u64,
    pub certificates: Vec<PrimeClassCertificate>,
}

impl SearchDoc {
    pub fn render(echo: BTreeMap<String, String>, outcome: SearchOutcome) -> String {
        let doc = SearchDoc {
            echo,
            status: outcome.status,
            examined: outcome.examined,
            certificates: outcome.certificates,
        };
        let mut text = serde_json::to_string_pretty(&doc).expect("search document serializes");
        text.push('\n');
        text
    }
}
