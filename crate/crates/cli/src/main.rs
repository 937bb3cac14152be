use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use euler_blowup_cli::{run, Command};

#[derive(Parser)]
#[command(name = "euler-blowup", version, about = "Moment-based blowup checks for compressible Euler flows")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(clap::Args)]
struct Common {
    /// Scenario configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `outputs.directory`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for randomized searches; overrides `search.seed`.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print and write the derived constants.
    Constants(Common),
    /// Run every applicable checker and write report.json and bounds.csv.
    Analyze(Common),
    /// Write the phase-portrait and moment-dynamics polylines.
    Figures(Common),
    /// Search initial data for the phantom condition.
    Phantom(Common),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (command, args) = match cli.command {
        Cmd::Constants(a) => (Command::Constants, a),
        Cmd::Analyze(a) => (Command::Analyze, a),
        Cmd::Figures(a) => (Command::Figures, a),
        Cmd::Phantom(a) => (Command::Phantom, a),
    };
    match run(command, &args.config, args.out.as_deref(), args.seed) {
        Ok(done) => {
            print!("{}", done.message);
            for path in &done.written {
                eprintln!("wrote {}", path.display());
            }
            ExitCode::from(done.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
