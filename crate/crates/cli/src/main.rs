use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use revoqsim_cli::config::{build_config, parse_kv, parse_param_tokens, Experiment, SEED_ENV};
use revoqsim_cli::{fixtures, output, run};

#[derive(Parser)]
#[command(name = "revoqsim", version, about = "Runs revocable subset-state cryptography experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Revocable encryption games (indistinguishability, search, hybrid search).
    Revenc(RunArgs),
    /// Revocable programs evaluated through the checking oracle.
    Revprog(RunArgs),
    /// Revocable point functions and wrong-key detection.
    Pointfn(RunArgs),
    /// k to k+1 unforgeability, quantum or classical.
    Unforge(RunArgs),
    /// The Forge pipeline with the query extractor.
    Forge(RunArgs),
    /// Hybrid chains and their adjacent-pair advantages.
    HybridAudit(RunArgs),
    /// Audit of the distinct-extraction inequality.
    DistinctExtraction(RunArgs),
    /// Sponge table attacks against the space-time bound.
    Sponge(RunArgs),
    /// Recompute the reference tables used by the test suites.
    RegenFixtures {
        #[arg(long, default_value = "fixtures/v1")]
        dir: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Flat `key = value` file; command-line parameters override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Do not print the manifest on stdout.
    #[arg(long)]
    quiet: bool,
    /// Experiment parameters and `--seed`, `--trials`, `--out`,
    /// `--transcripts`, `--format`, as `--key value` or `key=value`.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "PARAMS")]
    params: Vec<String>,
}

/// Clap stops matching named options once the trailing parameters start, so
/// `--quiet` and `--config` may still sit among them.
fn runner_options(args: &RunArgs) -> (bool, Option<PathBuf>, Vec<String>) {
    let (mut quiet, mut config) = (args.quiet, args.config.clone());
    let mut rest = Vec::new();
    let mut it = args.params.iter();
    while let Some(tok) = it.next() {
        match tok.as_str() {
            "--quiet" => quiet = true,
            "--config" => config = it.next().map(PathBuf::from),
            t if t.starts_with("--config=") => config = Some(PathBuf::from(&t["--config=".len()..])),
            _ => rest.push(tok.clone()),
        }
    }
    (quiet, config, rest)
}

fn run_experiment(experiment: Experiment, args: &RunArgs) -> Result<bool> {
    let (quiet, config_path, params) = runner_options(args);
    let file = match &config_path {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            parse_kv(&text)?
        }
        None => Vec::new(),
    };
    let flags = parse_param_tokens(&params)?;
    let env_seed = std::env::var(SEED_ENV).ok();
    let config = build_config(experiment.name(), &file, &flags, env_seed.as_deref())?;
    let out = run::dispatch(&config)?;
    output::persist(&out)?;
    if !quiet {
        println!("{}", output::manifest_json(&out)?);
    }
    for a in &out.manifest.assertions {
        eprintln!("{} {}: {}", if a.passed { "ok  " } else { "FAIL" }, a.name, a.detail);
    }
    Ok(out.manifest.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::RegenFixtures { dir } => fixtures::regen_reference_tables(dir).map(|paths| {
            for p in paths {
                eprintln!("wrote {}", p.display());
            }
            true
        }),
        Command::Revenc(a) => run_experiment(Experiment::Revenc, a),
        Command::Revprog(a) => run_experiment(Experiment::Revprog, a),
        Command::Pointfn(a) => run_experiment(Experiment::Pointfn, a),
        Command::Unforge(a) => run_experiment(Experiment::Unforge, a),
        Command::Forge(a) => run_experiment(Experiment::Forge, a),
        Command::HybridAudit(a) => run_experiment(Experiment::HybridAudit, a),
        Command::DistinctExtraction(a) => run_experiment(Experiment::DistinctExtraction, a),
        Command::Sponge(a) => run_experiment(Experiment::Sponge, a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
