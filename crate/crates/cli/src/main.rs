use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use permucat_cli::{run, Command as Suite, SuiteConfig};
use permucat_core::combinat::OrderKind;

/// Exact verification suites for permutohedral moduli collections.
#[derive(Parser)]
#[command(name = "permucat", version, about)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Ordered-partition enumeration and derangement identities
    Ghat(CommonArgs),
    /// Divisor-class arithmetic and coefficient identities
    Picard(CommonArgs),
    /// Fans and the cohomology oracle self-tests
    Toric(CommonArgs),
    /// Exceptionality certificates for the collection
    Excoll(CommonArgs),
    /// Window collections on the torus quotients
    Windows(CommonArgs),
    /// Every suite
    All(CommonArgs),
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Upper ground-set size for the suite
    #[arg(long)]
    n: Option<u8>,
    /// Upper bound for counting-only checks
    #[arg(long)]
    n_max: Option<u8>,
    /// Restrict pair certification to one order
    #[arg(long, value_parser = parse_order)]
    order: Option<OrderKind>,
    /// Candidate-region margin for the cohomology oracle
    #[arg(long, default_value_t = 1)]
    margin: i64,
    /// Worker threads (0 = library default)
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Report destination
    #[arg(long, default_value = "permucat-report.json")]
    out: PathBuf,
    /// Fan cache directory (or PERMUCAT_CACHE)
    #[arg(long)]
    cache: Option<PathBuf>,
}

fn parse_order(s: &str) -> Result<OrderKind, String> {
    match s {
        "lex" => Ok(OrderKind::Lex),
        "lexprime" => Ok(OrderKind::LexPrime),
        _ => Err("expected 'lex' or 'lexprime'".into()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (suite, args) = match cli.command {
        CliCommand::Ghat(a) => (Suite::Ghat, a),
        CliCommand::Picard(a) => (Suite::Picard, a),
        CliCommand::Toric(a) => (Suite::Toric, a),
        CliCommand::Excoll(a) => (Suite::Excoll, a),
        CliCommand::Windows(a) => (Suite::Windows, a),
        CliCommand::All(a) => (Suite::All, a),
    };
    let cache = args.cache.or_else(|| std::env::var_os("PERMUCAT_CACHE").map(PathBuf::from));
    let config = SuiteConfig {
        n: args.n,
        n_max: args.n_max,
        order: args.order,
        margin: args.margin,
        jobs: args.jobs,
        out: args.out.clone(),
        cache,
    };
    match run(suite, &config) {
        Ok(report) => {
            let json = report.to_json();
            if let Err(e) = std::fs::write(&config.out, &json) {
                eprintln!("error: cannot write report: {e}");
                return ExitCode::from(2);
            }
            if suite == Suite::Windows {
                let n = config.n.unwrap_or(9).clamp(3, 9);
                match permucat_core::gitwin::enum_windows(n) {
                    Ok(coll) => {
                        let stem = config.out.with_extension("");
                        let base = stem.to_string_lossy().into_owned();
                        let _ = std::fs::write(format!("{base}-collection-{n}.json"), coll.to_json());
                    }
                    Err(e) => {
                        eprintln!("error: cannot dump the collection: {e}");
                        return ExitCode::from(2);
                    }
                }
            }
            if suite == Suite::Excoll {
                let n = config.n.unwrap_or(5).clamp(2, 5);
                match permucat_cli::excoll_artifacts(n, config.margin) {
                    Ok((csv, pairs)) => {
                        let stem = config.out.with_extension("");
                        let base = stem.to_string_lossy().into_owned();
                        let _ = std::fs::write(format!("{base}-gram-{n}.csv"), csv);
                        let _ = std::fs::write(format!("{base}-pairs-{n}.json"), pairs);
                    }
                    Err(e) => {
                        eprintln!("error: cannot build pair artifacts: {e}");
                        return ExitCode::from(2);
                    }
                }
            }
            let failed: Vec<_> = report.failures().collect();
            if failed.is_empty() {
                println!("{}: {} checks passed", report.command, report.checks.len());
                ExitCode::SUCCESS
            } else {
                for f in &failed {
                    eprintln!("FAIL {} ({})", f.id, f.witness.clone().unwrap_or_default());
                }
                println!(
                    "{}: {} of {} checks failed",
                    report.command,
                    failed.len(),
                    report.checks.len()
                );
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
