use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use relstate_cli::{exit, parse_circuit, run, selftest::selftest, tolerances, CliError};

#[derive(Parser)]
#[command(name = "relstate", version, about = "Heisenberg-picture network simulator with relative-state analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a circuit file and print the report.
    Run {
        /// Circuit file (TOML), or `-` for stdin.
        file: PathBuf,
        /// Override a tolerance, e.g. `--tol sharp=1e-8`. Repeatable.
        #[arg(long = "tol", value_name = "NAME=VALUE")]
        tol: Vec<String>,
        /// Print a human-readable table instead of JSON.
        #[arg(long)]
        summary: bool,
    },
    /// Parse and validate a circuit file without running it.
    Validate {
        file: PathBuf,
    },
    /// Run the built-in acceptance checks.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    let io = |e: std::io::Error| CliError::Io { path: path.display().to_string(), message: e.to_string() };
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(io)?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(io)
}

fn execute(cmd: Command) -> Result<i32, CliError> {
    match cmd {
        Command::Run { file, tol, summary } => {
            let tol = tolerances(&tol)?;
            let circuit = parse_circuit(&read(&file)?)?;
            let report = run(&circuit, tol)?;
            if summary {
                print!("{}", report.summary());
            } else {
                print!("{}", report.to_json()?);
            }
            Ok(report.exit_code())
        }
        Command::Validate { file } => {
            let c = parse_circuit(&read(&file)?)?;
            println!(
                "ok: {} qubits, {} gates, {} records, {} queries",
                c.n,
                c.gates.len(),
                c.records.len(),
                c.queries.len()
            );
            Ok(exit::OK)
        }
        Command::Selftest { seed } => {
            let results = selftest(seed);
            for r in &results {
                println!("{r}");
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            println!("{} of {} criteria passed (seed {seed})", results.len() - failed, results.len());
            Ok(if failed == 0 { exit::OK } else { exit::TOLERANCE })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
