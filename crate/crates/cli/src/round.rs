use std::fs;
use std::path::{Path, PathBuf};

use clap::Subcommand;
use clincorp::workflow::{
    assign_duplicates, check_convergence, sample_round, ConvergencePolicy, RoundState, DEFAULT_DUPLICATE_FRACTION,
    DEFAULT_WINDOW,
};

use crate::commands::list_ids;
use crate::config::Config;
use crate::{CliError, CmdResult, Output};

#[derive(Subcommand)]
pub enum RoundCommand {
    /// Start a state file over a corpus directory or id list.
    New {
        #[arg(long)]
        state: PathBuf,
        /// Replace an existing state file.
        #[arg(long)]
        force: bool,
        pool: PathBuf,
    },
    /// Draw the next round and assign it to the groups.
    Sample {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Share of the sample annotated by both groups.
        #[arg(long)]
        fraction: Option<f64>,
    },
    /// Append an agreement value to a task's history.
    RecordIaa {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        task: String,
        #[arg(long)]
        f: f64,
    },
    /// Summarize the state and each task's convergence.
    Status {
        #[arg(long)]
        state: PathBuf,
        /// Threshold per task, `task=value`. Repeatable.
        #[arg(long, value_parser = parse_tau)]
        tau: Vec<(String, f64)>,
        #[arg(long)]
        window: Option<usize>,
    },
}

fn parse_tau(s: &str) -> Result<(String, f64), String> {
    let (task, v) = s.split_once('=').ok_or_else(|| format!("expected task=value, got {}", s))?;
    let v: f64 = v.parse().map_err(|_| format!("bad threshold {}", v))?;
    Ok((task.to_string(), v))
}

fn load(path: &Path) -> Result<RoundState, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError(format!("{}: {}", path.display(), e)))?;
    RoundState::from_json(&text).map_err(|e| CliError(format!("{}: {}", path.display(), e)))
}

/// Write through a sibling temp file so a failed write never truncates the
/// state.
fn save(path: &Path, state: &RoundState) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp");
    let err = |e: std::io::Error| CliError(format!("{}: {}", path.display(), e));
    fs::write(&tmp, state.to_json()).map_err(err)?;
    fs::rename(&tmp, path).map_err(err)
}

pub fn run(cfg: &Config, cmd: RoundCommand) -> CmdResult {
    match cmd {
        RoundCommand::New { state, force, pool } => {
            if state.exists() && !force {
                return Err(CliError(format!("{} exists; pass --force to replace it", state.display())));
            }
            let s = RoundState::new(list_ids(&pool)?);
            save(&state, &s)?;
            Ok(Output::clean(format!("pool\t{}\n", s.pool.len())))
        }
        RoundCommand::Sample { state, n, seed, fraction } => {
            let s = load(&state)?;
            let seed = seed.or(cfg.seed).unwrap_or(0);
            let fraction = fraction.or(cfg.duplicate_fraction).unwrap_or(DEFAULT_DUPLICATE_FRACTION);
            let (mut next, drawn) = sample_round(&s, n, seed)?;
            let groups = assign_duplicates(&drawn, fraction, seed)?;
            let mut out = format!("round\t{}\n", next.round_index);
            for id in &drawn {
                let g = &groups[id];
                out.push_str(&format!("{}\t{}\n", id, g.iter().cloned().collect::<Vec<_>>().join(",")));
                next.assignments.insert(id.clone(), g.clone());
            }
            save(&state, &next)?;
            Ok(Output::clean(out))
        }
        RoundCommand::RecordIaa { state, task, f } => {
            let mut s = load(&state)?;
            s.record_iaa(&task, f)?;
            save(&state, &s)?;
            Ok(Output::clean(format!("{}\t{}\n", task, s.iaa_history[&task].len())))
        }
        RoundCommand::Status { state, tau, window } => {
            let s = load(&state)?;
            let mut thresholds = cfg.tau.clone();
            thresholds.extend(tau);
            let policy = ConvergencePolicy::new(window.or(cfg.window).unwrap_or(DEFAULT_WINDOW), thresholds)?;
            let mut out =
                format!("round_index\t{}\npool\t{}\nassigned\t{}\n", s.round_index, s.pool.len(), s.assignments.len());
            let mut tasks: Vec<&String> = s.iaa_history.keys().chain(policy.tau.keys()).collect();
            tasks.sort();
            tasks.dedup();
            for task in tasks {
                let history = s.iaa_history.get(task).map(Vec::as_slice).unwrap_or_default();
                let values: Vec<String> = history.iter().map(|f| format!("{:.3}", f)).collect();
                let converged = check_convergence(history, &policy, task);
                out.push_str(&format!(
                    "task\t{}\t{}\t{}\n",
                    task,
                    if values.is_empty() { "-".to_string() } else { values.join(",") },
                    if converged { "converged" } else { "open" }
                ));
            }
            Ok(Output::clean(out))
        }
    }
}
