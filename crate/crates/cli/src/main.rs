use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hglab::runner;
use hglab::scenarios::REGISTRY;
use hglab::tools;

#[derive(Parser)]
#[command(name = "hglab", version, about = "Hilbert geometry laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenarios of a config file.
    Run {
        config: PathBuf,
        /// Run scenarios concurrently.
        #[arg(long)]
        parallel: bool,
        /// Exit with status 2 when a check fails.
        #[arg(long)]
        assert: bool,
    },
    /// List the built-in scenarios and their diagnostics.
    List,
    /// Hilbert distance between two points of a domain (`x` as `a,b,c`).
    Dist { domain: PathBuf, x: String, y: String },
    /// Cartan projection of a matrix or a product of matrices.
    Cartan { input: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Run {
            config,
            parallel,
            assert,
        } => runner::run(&config, parallel, assert).map(|out| {
            println!("manifest: {}", out.manifest_path.display());
            if !out.failures.is_empty() {
                eprintln!("{} check(s) failed", out.failures.len());
                if assert {
                    return ExitCode::from(2);
                }
            }
            ExitCode::SUCCESS
        }),
        Command::List => {
            for s in REGISTRY {
                println!("{:<16} {}  [{}]", s.id, s.summary, s.diagnostics.join(", "));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Dist { domain, x, y } => tools::dist(&domain, &x, &y).map(|d| {
            println!("{d}");
            ExitCode::SUCCESS
        }),
        Command::Cartan { input } => tools::cartan(&input).map(|v| {
            println!("{v}");
            ExitCode::SUCCESS
        }),
    };
    res.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(1)
    })
}
