//! The `rrw` command-line front end.
//!
//! Every subcommand merges its defaults, an optional `--config` JSON file and
//! the command-line flags (flags win). Outputs open with a provenance header:
//! `#` comment lines for CSV, an envelope for JSON. Errors go to standard
//! error as one line of JSON `{error, detail}`.
//!
//! Exit codes: 0 success, 1 I/O, 2 usage, 3 precondition or hypothesis,
//! 4 budget cap.

mod commands;
mod config;
mod env;

use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

pub use commands::*;
pub use config::{resolve, CommonArgs, Format, Resolved};
pub use env::parse_env;

use crate::error::{Error, ErrorKind};
use crate::rng;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Generalized reinforced random walks driven by per-site urns.
#[derive(Debug, Parser)]
#[command(name = "rrw", version)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Fixed points and derivatives of a reinforcement function.
    Analyze(AnalyzeArgs),
    /// Simulate an urn or compute its exact law.
    Urn(UrnArgs),
    /// Limiting drift estimates and diagnostics.
    #[command(subcommand)]
    Drift(DriftCmd),
    /// Walk simulation, functionals and the exact oracle.
    #[command(subcommand)]
    Walk(WalkCmd),
    /// Monotone couplings of urn pairs.
    Couple(CoupleArgs),
    /// Recurrence/transience verdict.
    Classify(ClassifyArgs),
    /// Solomon's criterion for the identity map.
    Solomon(SolomonArgs),
    /// Threshold search in u or l.
    Threshold(ThresholdArgs),
    /// Drift along a parameter grid.
    Sweep(SweepArgs),
}

#[derive(Debug, Subcommand)]
pub enum DriftCmd {
    Estimate(DriftEstimateArgs),
    Profile(DriftProfileArgs),
    Clt(DriftCltArgs),
}

#[derive(Debug, Subcommand)]
pub enum WalkCmd {
    Simulate(WalkSimulateArgs),
    Functionals(WalkFunctionalsArgs),
    Oracle(WalkOracleArgs),
    Regime(WalkRegimeArgs),
}

pub fn exit_code(kind: ErrorKind) -> i32 {
    match kind {
        ErrorKind::Io => 1,
        ErrorKind::Usage => 2,
        ErrorKind::Precondition => 3,
        ErrorKind::Budget => 4,
    }
}

fn report(error: &str, detail: &str) {
    let line = json!({ "error": error, "detail": detail });
    eprintln!("{line}");
}

/// Output bytes for one command, header included.
fn render(name: &str, echo: &Map<String, Value>, body: Body) -> Vec<u8> {
    let config = Value::Object(echo.clone());
    match body {
        Body::Csv(csv) => {
            let mut out = format!("# rrw {VERSION}\n# command: {name}\n# config: {config}\n").into_bytes();
            out.extend_from_slice(&csv);
            out
        }
        Body::Json(result) => {
            let doc = json!({
                "rrw": { "version": VERSION, "command": name, "config": config },
                "result": result,
            });
            let mut out = serde_json::to_vec_pretty(&doc).unwrap_or_default();
            out.push(b'\n');
            out
        }
    }
}

fn go<C: Command>(flags: &C, common: &CommonArgs) -> Result<Option<String>, Error> {
    let r = resolve(flags, common, C::defaults(), C::FORMAT)?;
    let ctx = Ctx { seed: r.seed, format: r.format };
    let outcome = r.params.execute(&ctx)?;
    let bytes = render(C::NAME, &r.echo, outcome.body);
    match &r.out {
        Some(path) => std::fs::write(path, bytes)?,
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(&bytes)?;
            so.flush()?;
        }
    }
    Ok(outcome.budget)
}

fn dispatch(cli: &Cli) -> Result<Option<String>, Error> {
    let c = &cli.common;
    match &cli.command {
        Cmd::Analyze(a) => go(a, c),
        Cmd::Urn(a) => go(a, c),
        Cmd::Drift(DriftCmd::Estimate(a)) => go(a, c),
        Cmd::Drift(DriftCmd::Profile(a)) => go(a, c),
        Cmd::Drift(DriftCmd::Clt(a)) => go(a, c),
        Cmd::Walk(WalkCmd::Simulate(a)) => go(a, c),
        Cmd::Walk(WalkCmd::Functionals(a)) => go(a, c),
        Cmd::Walk(WalkCmd::Oracle(a)) => go(a, c),
        Cmd::Walk(WalkCmd::Regime(a)) => go(a, c),
        Cmd::Couple(a) => go(a, c),
        Cmd::Classify(a) => go(a, c),
        Cmd::Solomon(a) => go(a, c),
        Cmd::Threshold(a) => go(a, c),
        Cmd::Sweep(a) => go(a, c),
    }
}

/// Worker count from `RRW_THREADS`, if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var("RRW_THREADS").ok()?.trim().parse().ok().filter(|n| *n > 0)
}

/// Parse `args` (program name first), run the command and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind as K;
            if matches!(e.kind(), K::DisplayHelp | K::DisplayVersion | K::DisplayHelpOnMissingArgumentOrSubcommand) {
                let _ = e.print();
                return if e.kind() == K::DisplayHelpOnMissingArgumentOrSubcommand { 2 } else { 0 };
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("").trim_start_matches("error: ");
            report("UsageError", first);
            return 2;
        }
    };
    match rng::with_threads(threads_from_env(), || dispatch(&cli)) {
        Ok(None) => 0,
        Ok(Some(msg)) => {
            report("BudgetExhausted", &msg);
            4
        }
        Err(e) => {
            report(e.name(), &e.to_string());
            exit_code(e.kind())
        }
    }
}
