use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use tewa::compare::{compare, sweep};
use tewa::diag;
use tewa::gen::{generate, Profile};
use tewa::scenario::{Scenario, ScenarioError};
use tewa::sim::{run, Policy, RunOptions};

#[derive(Parser)]
#[command(name = "tewa", version, about = "Threat evaluation and weapon assignment simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a scenario document and report every problem found.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Simulate a scenario and print a summary.
    Run(RunArgs),
    /// Run both policies over a list of seeds and tabulate the results.
    Compare {
        #[arg(long)]
        scenario: PathBuf,
        /// Comma list and/or ranges, e.g. `1,2,5` or `0..100`.
        #[arg(long, default_value = "0")]
        seeds: String,
        #[arg(long)]
        horizon: Option<f64>,
        #[arg(long)]
        out_report: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Write a generated scenario document.
    Gen {
        #[arg(long)]
        profile: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    TwoStage,
    Greedy,
}

impl From<PolicyArg> for Policy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::TwoStage => Policy::TwoStage,
            PolicyArg::Greedy => Policy::Greedy,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Overrides the seed in the scenario.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "two-stage")]
    policy: PolicyArg,
    #[arg(long)]
    out_log: Option<PathBuf>,
    /// JSON report destination.
    #[arg(long)]
    out_report: Option<PathBuf>,
    #[arg(long)]
    horizon: Option<f64>,
    /// Number of consecutive seeds to run, starting at the base seed.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    sweep: u64,
    /// Print the JSON report instead of the text summary.
    #[arg(long)]
    json: bool,
}

fn parse_seeds(spec: &str) -> Result<Vec<u64>> {
    let mut seeds = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..=") {
            seeds.extend(a.parse::<u64>()?..=b.parse::<u64>()?);
        } else if let Some((a, b)) = part.split_once("..") {
            seeds.extend(a.parse::<u64>()?..b.parse::<u64>()?);
        } else {
            seeds.push(part.parse::<u64>().with_context(|| format!("bad seed '{part}'"))?);
        }
    }
    if seeds.is_empty() {
        bail!("no seeds given");
    }
    Ok(seeds)
}

fn load(path: &Path) -> Result<Scenario> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    Scenario::from_json(&text).map_err(|e| match e {
        ScenarioError::Invalid(d) => anyhow::anyhow!("{}: invalid scenario\n{}", path.display(), diag::join(&d)),
        ScenarioError::Parse(p) => anyhow::anyhow!("{}: {p}", path.display()),
    })
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

/// `out.log` becomes `out.seed7.log` when a sweep writes one file per seed.
fn keyed(path: &Path, seed: u64, many: bool) -> PathBuf {
    if !many {
        return path.to_path_buf();
    }
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.seed{seed}.{}", ext.to_string_lossy()),
        None => format!("{stem}.seed{seed}"),
    };
    path.with_file_name(name)
}

fn cmd_validate(path: &Path) -> Result<ExitCode> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let diags = tewa::scenario::validate_document(&text);
    if diags.is_empty() {
        println!("{}: valid", path.display());
        Ok(ExitCode::SUCCESS)
    } else {
        for d in &diags {
            eprintln!("{d}");
        }
        eprintln!("{}: {} problem(s)", path.display(), diags.len());
        Ok(ExitCode::FAILURE)
    }
}

fn cmd_run(args: &RunArgs) -> Result<ExitCode> {
    let scenario = load(&args.scenario)?;
    let base = args.seed.unwrap_or(scenario.config.seed);
    let seeds: Vec<u64> = (base..base + args.sweep).collect();
    let many = seeds.len() > 1;
    let outputs = sweep(&seeds, |seed| {
        let opts = RunOptions {
            policy: args.policy.into(),
            seed: Some(seed),
            horizon: args.horizon,
            record_cycles: false,
        };
        run(&scenario, &opts)
    });
    for (seed, out) in seeds.iter().zip(outputs) {
        let out = out?;
        if let Some(p) = &args.out_log {
            write(&keyed(p, *seed, many), &out.log.to_text())?;
        }
        if let Some(p) = &args.out_report {
            write(&keyed(p, *seed, many), &out.report.to_json())?;
        }
        if args.json {
            println!("{}", out.report.to_json());
        } else {
            print!("{}", out.report.to_text());
            if many {
                println!();
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Validate { scenario } => cmd_validate(scenario),
        Command::Run(args) => cmd_run(args),
        Command::Compare { scenario, seeds, horizon, out_report, json } => (|| {
            let s = load(scenario)?;
            let cmp = compare(&s, &parse_seeds(seeds)?, *horizon)?;
            if let Some(p) = out_report {
                write(p, &cmp.to_json())?;
            }
            if *json {
                println!("{}", cmp.to_json());
            } else {
                print!("{}", cmp.to_text());
            }
            Ok(ExitCode::SUCCESS)
        })(),
        Command::Gen { profile, seed, out } => (|| {
            let profile: Profile = profile.parse()?;
            let doc = generate(profile, *seed).to_json();
            match out {
                Some(p) => write(p, &(doc + "\n"))?,
                None => println!("{doc}"),
            }
            Ok(ExitCode::SUCCESS)
        })(),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::FAILURE
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_lists() {
        assert_eq!(parse_seeds("1,2,5").unwrap(), vec![1, 2, 5]);
        assert_eq!(parse_seeds("0..3,9").unwrap(), vec![0, 1, 2, 9]);
        assert_eq!(parse_seeds("2..=3").unwrap(), vec![2, 3]);
        assert!(parse_seeds("").is_err());
        assert!(parse_seeds("x").is_err());
    }

    #[test]
    fn keyed_paths() {
        assert_eq!(keyed(Path::new("a/out.log"), 3, true), PathBuf::from("a/out.seed3.log"));
        assert_eq!(keyed(Path::new("out.log"), 3, false), PathBuf::from("out.log"));
    }
}
