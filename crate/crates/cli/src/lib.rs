//! Command-line front end: loads a scenario, runs the checkers and writes
//! CSV/JSON results.

// `!(x > y)` is used on purpose so that NaN fails range checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analyze;
pub mod config;
pub mod constants;
pub mod data;
pub mod error;
pub mod figures;
pub mod output;
pub mod phantom;

use std::path::{Path, PathBuf};

use serde::Serialize;

use config::ScenarioConfig;
pub use error::CliError;
use output::{Envelope, Sink};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Constants,
    Analyze,
    Figures,
    Phantom,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Constants => "constants",
            Command::Analyze => "analyze",
            Command::Figures => "figures",
            Command::Phantom => "phantom",
        }
    }
}

/// Result of one command: the exit code and the files written.
#[derive(Clone, Debug, PartialEq)]
pub struct Completed {
    pub exit_code: i32,
    pub written: Vec<PathBuf>,
    /// Human-readable summary for the terminal.
    pub message: String,
}

/// Runs `command` on the config at `config_path`. `out` overrides the
/// configured output directory and `seed` the configured search seed.
pub fn run(command: Command, config_path: &Path, out: Option<&Path>, seed: Option<u64>) -> Result<Completed, CliError> {
    let mut cfg = ScenarioConfig::load(config_path)?;
    if let Some(seed) = seed {
        cfg.search
            .get_or_insert(config::SearchConfig {
                budget: 0,
                seed: None,
                exact_sweep: 0,
            })
            .seed = Some(seed);
    }
    if let Some(out) = out {
        cfg.outputs.directory = out.to_path_buf();
    }
    let base_dir = config_path.parent().unwrap_or(Path::new("."));
    execute(command, &cfg, base_dir)
}

/// Runs `command` on an already parsed config; relative data paths resolve
/// against `base_dir`.
pub fn execute(command: Command, cfg: &ScenarioConfig, base_dir: &Path) -> Result<Completed, CliError> {
    let resolved = cfg.validate()?;
    let mut sink = Sink::new(&cfg.outputs.directory, &cfg.outputs.formats)?;
    let name = command.name();
    let (exit_code, message) = match command {
        Command::Constants => {
            let data = data::InitialData::load(cfg, &resolved, base_dir)?;
            let report = constants::compute(cfg, &resolved, &data)?;
            sink.json("constants.json", &Envelope::new(name, cfg, Body { constants: report }))?;
            (0, report.table())
        }
        Command::Analyze => {
            let data = data::InitialData::load(cfg, &resolved, base_dir)?;
            let analysis = analyze::run(cfg, &resolved, &data)?;
            sink.csv("bounds.csv", &analysis.bounds)?;
            sink.csv("moments.csv", &analysis.moments)?;
            if let Some(t) = &analysis.far_field {
                sink.csv("far_field.csv", t)?;
            }
            sink.json("report.json", &Envelope::new(name, cfg, &analysis.report))?;
            let r = &analysis.report;
            let mut msg = format!("outcome: {:?} (exit {})\n", r.outcome, r.exit_code);
            for w in &r.warnings {
                msg.push_str(&format!("warning: {w}\n"));
            }
            (r.exit_code, msg)
        }
        Command::Figures => {
            let data = data::InitialData::load(cfg, &resolved, base_dir)?;
            let figs = figures::build(cfg, &resolved, &data)?;
            sink.csv("fig1_phase.csv", &figs.phase)?;
            sink.csv("fig2_dynamics.csv", &figs.dynamics)?;
            sink.json("figures.json", &Envelope::new(name, cfg, &figs.summary))?;
            (0, format!("{} phase points, {} dynamics points\n", figs.phase.rows.len(), figs.dynamics.rows.len()))
        }
        Command::Phantom => {
            let search = cfg.search.clone().unwrap_or(config::SearchConfig {
                budget: 0,
                seed: None,
                exact_sweep: 0,
            });
            let log = phantom::search(&resolved.gas, &resolved.weight, search.exact_sweep, search.budget, search.seed)?;
            sink.csv("phantom_log.csv", &log.table())?;
            sink.json("phantom.json", &Envelope::new(name, cfg, &log.summary))?;
            let s = &log.summary;
            let mut msg = format!("evaluated {} data, skipped {}, hits {}\n", s.evaluated, s.skipped, s.hits);
            if s.hits > 0 {
                msg.push_str("!!! PHANTOM CONDITION SATISFIED: see phantom.json for the witnesses !!!\n");
            }
            (0, msg)
        }
    };
    Ok(Completed {
        exit_code,
        written: sink.written,
        message,
    })
}

#[derive(Serialize)]
struct Body<T: Serialize> {
    constants: T,
}
