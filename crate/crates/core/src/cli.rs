//! Command-line front end: `train`, `evaluate` and `export`.
//!
//! Exit codes: 0 on success, 1 for usage or configuration errors, 2 for
//! failures while running (including an interrupted training run, which
//! leaves a checkpoint behind for `train --resume`).

use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::domain::{Condition, ConfusionMatrix, TransitionState};
use crate::eval::{
    cleanse, evaluate_episodes, export_heatmap, write_report, Comparison, HeatmapFormat,
};
use crate::learner::{make_initial_q, Agent};
use crate::qtable::QTable;
use crate::sim::{self, run_batch, run_indexed, Mixture};

/// Confusion matrices recorded in the field study, before and after learning.
pub const FIELD_BEFORE: ConfusionMatrix = ConfusionMatrix::new(11, 59, 0, 17);
pub const FIELD_AFTER: ConfusionMatrix = ConfusionMatrix::new(7, 23, 0, 92);

pub const Q_BEFORE_FILE: &str = "q_before.csv";
pub const Q_AFTER_FILE: &str = "q_after.csv";
pub const TRAIN_LOG_FILE: &str = "episodes_train.jsonl";
pub const TRACE_FILE: &str = "temperature_trace.csv";
pub const REPORT_FILE: &str = "report.txt";
const CHECKPOINT_DIR: &str = "checkpoint";

#[derive(Debug, Parser)]
#[command(
    name = "ucql",
    version,
    about = "Train and evaluate a greeting robot with user-centered Q-learning"
)]
pub struct Cli {
    /// Print the full default configuration as TOML and exit.
    #[arg(long)]
    pub print_default_config: bool,

    #[command(flatten)]
    pub common: CommonArgs,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Configuration file (TOML). Missing keys take their defaults.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Override the master seed.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Override the episode count of the command's phase.
    #[arg(long, global = true, value_name = "N")]
    pub episodes: Option<u64>,
    /// Override the output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Learn from the designed table and write the trained one.
    Train {
        /// Continue from the checkpoint in the output directory.
        #[arg(long)]
        resume: bool,
    },
    /// Compare two tables on the same simulated passersby.
    Evaluate {
        /// Report on the published field matrices instead of simulating.
        #[arg(long)]
        paper_tables: bool,
        /// Table to evaluate as "before" [default: <out>/q_before.csv].
        #[arg(long, value_name = "PATH")]
        q_before: Option<PathBuf>,
        /// Table to evaluate as "after" [default: <out>/q_after.csv].
        #[arg(long, value_name = "PATH")]
        q_after: Option<PathBuf>,
    },
    /// Write a Q-table as a CSV matrix or a grayscale heat map.
    Export {
        /// Q-table CSV to export.
        q: PathBuf,
        /// Output format: csv or png.
        #[arg(long, default_value = "csv", value_parser = parse_format)]
        format: HeatmapFormat,
    },
}

fn parse_format(s: &str) -> Result<HeatmapFormat, String> {
    s.parse().map_err(|e: crate::Error| e.to_string())
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum CliError {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(e) | CliError::Runtime(e) => write!(f, "{e:#}"),
        }
    }
}

fn runtime<E: Into<anyhow::Error>>(e: E) -> CliError {
    CliError::Runtime(e.into())
}

static INTERRUPTED: AtomicBool = AtomicBool::new(false);

/// Parses `args`, runs the command, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    if cli.print_default_config {
        print!("{}", RunConfig::default().to_toml());
        return Ok(());
    }
    let Some(command) = cli.command else {
        return Err(CliError::Usage(anyhow::anyhow!(
            "no command given (expected train, evaluate or export; see --help)"
        )));
    };
    let phase_is_train = matches!(command, Command::Train { .. });
    match command {
        Command::Export { q, format } => cmd_export(&q, format, cli.common.out.as_deref()),
        Command::Train { resume } => {
            let cfg = load_config(&cli.common, phase_is_train)?;
            let _ = ctrlc::set_handler(|| INTERRUPTED.store(true, Ordering::SeqCst));
            cmd_train(&cfg, resume, &INTERRUPTED).map(|_| ())
        }
        Command::Evaluate {
            paper_tables,
            q_before,
            q_after,
        } => {
            let cfg = load_config(&cli.common, phase_is_train)?;
            let comparison = if paper_tables {
                cmd_paper_tables(&cfg)?
            } else {
                let dir = &cfg.output_dir;
                let qb = q_before.unwrap_or_else(|| dir.join(Q_BEFORE_FILE));
                let qa = q_after.unwrap_or_else(|| dir.join(Q_AFTER_FILE));
                cmd_evaluate(&cfg, &qb, &qa)?
            };
            let mut text = Vec::new();
            write_report(&mut text, &comparison).map_err(runtime)?;
            print!("{}", String::from_utf8_lossy(&text));
            Ok(())
        }
    }
}

/// Reads the config file (if any) and applies command-line overrides.
pub fn load_config(common: &CommonArgs, train_phase: bool) -> Result<RunConfig, CliError> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path).map_err(|e| CliError::Usage(e.into()))?,
        None => RunConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.master_seed = seed;
    }
    if let Some(n) = common.episodes {
        if train_phase {
            cfg.episodes.train = n;
        } else {
            cfg.episodes.eval = n;
        }
    }
    if let Some(out) = &common.out {
        cfg.output_dir = out.clone();
    }
    cfg.validate().map_err(|e| CliError::Usage(e.into()))?;
    Ok(cfg)
}

#[derive(Debug, Serialize, Deserialize)]
struct Progress {
    completed: u64,
    log_bytes: u64,
    trace_bytes: u64,
}

fn checkpoint_paths(out: &Path) -> (PathBuf, PathBuf, PathBuf) {
    let dir = out.join(CHECKPOINT_DIR);
    (
        dir.join("q.csv"),
        dir.join("progress.json"),
        dir.join("config.toml"),
    )
}

fn write_checkpoint(cfg: &RunConfig, table: &QTable, progress: &Progress) -> anyhow::Result<()> {
    let (q, prog, conf) = checkpoint_paths(&cfg.output_dir);
    fs::create_dir_all(q.parent().expect("inside checkpoint dir"))?;
    table.save(&q)?;
    fs::write(&conf, cfg.to_toml())?;
    fs::write(&prog, serde_json::to_vec_pretty(progress)?)?;
    log::info!("checkpoint after {} episodes", progress.completed);
    Ok(())
}

/// Summary of a finished training run.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub q_after: QTable,
    pub episodes: u64,
}

/// Trains from the designed table. Writes `q_before.csv`, `q_after.csv`
/// (each with a `_stats.csv` sidecar), the episode log and the temperature
/// trace into the output directory.
///
/// `stop` is polled after every episode; once set, the run writes a
/// checkpoint and returns an error.
pub fn cmd_train(
    cfg: &RunConfig,
    resume: bool,
    stop: &AtomicBool,
) -> Result<TrainOutcome, CliError> {
    let out = &cfg.output_dir;
    fs::create_dir_all(out)
        .with_context(|| format!("creating {}", out.display()))
        .map_err(runtime)?;

    let q_b = make_initial_q(&cfg.learner);
    q_b.save(&out.join(Q_BEFORE_FILE)).map_err(runtime)?;

    let log_path = out.join(TRAIN_LOG_FILE);
    let trace_path = out.join(TRACE_FILE);
    let (ckpt_q, ckpt_prog, ckpt_conf) = checkpoint_paths(out);

    let (table, start, log_file, trace_file) = if resume {
        let saved = fs::read_to_string(&ckpt_conf)
            .with_context(|| format!("no checkpoint to resume in {}", out.display()))
            .map_err(CliError::Usage)?;
        if saved != cfg.to_toml() {
            return Err(CliError::Usage(anyhow::anyhow!(
                "checkpoint was written with a different configuration"
            )));
        }
        let progress: Progress = serde_json::from_slice(&fs::read(&ckpt_prog).map_err(runtime)?)
            .context("reading checkpoint progress")
            .map_err(runtime)?;
        let table = QTable::load(&ckpt_q).map_err(runtime)?;
        let open_at = |path: &Path, len: u64| -> anyhow::Result<File> {
            let mut f = OpenOptions::new().write(true).open(path)?;
            f.set_len(len)?;
            f.seek(SeekFrom::End(0))?;
            Ok(f)
        };
        let log_file = open_at(&log_path, progress.log_bytes).map_err(runtime)?;
        let trace_file = open_at(&trace_path, progress.trace_bytes).map_err(runtime)?;
        (table, progress.completed, log_file, trace_file)
    } else {
        let log_file = File::create(&log_path).map_err(runtime)?;
        let mut trace_file = File::create(&trace_path).map_err(runtime)?;
        writeln!(trace_file, "episode,state,n,T").map_err(runtime)?;
        (q_b, 0, log_file, trace_file)
    };

    let mut agent = Agent::new(table, cfg.learner, cfg.policy, true);
    let mut log = BufWriter::new(log_file);
    let mut trace = BufWriter::new(trace_file);
    let mixture = Mixture::from_world(&cfg.world);
    let n = cfg.episodes.train;
    let bytes =
        |log: &mut BufWriter<File>, trace: &mut BufWriter<File>| -> anyhow::Result<(u64, u64)> {
            log.flush()?;
            trace.flush()?;
            Ok((
                log.get_mut().stream_position()?,
                trace.get_mut().stream_position()?,
            ))
        };

    for i in start..n {
        let visits: Vec<u64> = TransitionState::all()
            .map(|s| agent.table.visits(s))
            .collect();
        let episode = run_indexed(
            &mut agent,
            &cfg.world,
            &cfg.estimator,
            mixture,
            cfg.train_seed(),
            i,
            Condition::Training,
        );
        sim::log::write_episodes(&mut log, std::slice::from_ref(&episode)).map_err(runtime)?;
        for (s, before) in TransitionState::all().zip(visits) {
            if agent.table.visits(s) != before {
                writeln!(
                    trace,
                    "{i},{s},{},{}",
                    agent.table.visits(s),
                    agent.table.temperature(s)
                )
                .map_err(runtime)?;
            }
        }
        let done = i + 1;
        let interrupted = stop.load(Ordering::SeqCst);
        let periodic = cfg.checkpoint_every > 0 && done % cfg.checkpoint_every == 0 && done < n;
        if interrupted || periodic {
            let (log_bytes, trace_bytes) = bytes(&mut log, &mut trace).map_err(runtime)?;
            write_checkpoint(
                cfg,
                &agent.table,
                &Progress {
                    completed: done,
                    log_bytes,
                    trace_bytes,
                },
            )
            .map_err(runtime)?;
        }
        if interrupted {
            return Err(runtime(anyhow::anyhow!(
                "interrupted after {done} of {n} episodes; rerun with `train --resume` to continue"
            )));
        }
    }
    bytes(&mut log, &mut trace).map_err(runtime)?;

    agent.table.save(&out.join(Q_AFTER_FILE)).map_err(runtime)?;
    let ckpt_dir = out.join(CHECKPOINT_DIR);
    if ckpt_dir.exists() {
        fs::remove_dir_all(&ckpt_dir).map_err(runtime)?;
    }
    println!(
        "trained on {n} episodes; wrote {}",
        out.join(Q_AFTER_FILE).display()
    );
    Ok(TrainOutcome {
        q_after: agent.table,
        episodes: n,
    })
}

fn write_report_file(cfg: &RunConfig, comparison: &Comparison) -> Result<(), CliError> {
    fs::create_dir_all(&cfg.output_dir).map_err(runtime)?;
    let path = cfg.output_dir.join(REPORT_FILE);
    let file = File::create(&path)
        .with_context(|| format!("creating {}", path.display()))
        .map_err(runtime)?;
    write_report(BufWriter::new(file), comparison).map_err(runtime)
}

/// Report on the published field matrices; no simulation involved.
pub fn cmd_paper_tables(cfg: &RunConfig) -> Result<Comparison, CliError> {
    let comparison =
        Comparison::new(FIELD_BEFORE, FIELD_AFTER, cfg.evaluation.significance).map_err(runtime)?;
    write_report_file(cfg, &comparison)?;
    Ok(comparison)
}

/// Frozen before/after evaluation of two tables on the same passersby.
pub fn evaluate_tables(
    cfg: &RunConfig,
    q_before: &QTable,
    q_after: &QTable,
) -> crate::Result<(Comparison, [Vec<crate::domain::Episode>; 2])> {
    let mixture = Mixture::from_world(&cfg.world);
    let run = |table: &QTable, condition| {
        let mut agent = Agent::new(table.clone(), cfg.learner, cfg.eval_policy, false);
        run_batch(
            &mut agent,
            &cfg.world,
            &cfg.estimator,
            cfg.episodes.eval,
            mixture,
            false,
            cfg.eval_seed(),
            condition,
        )
    };
    let before = run(q_before, Condition::Before);
    let after = run(q_after, Condition::After);
    let rules = &cfg.evaluation.cleanse;
    let kept_before = cleanse(before.clone(), rules);
    let kept_after = cleanse(after.clone(), rules);
    let mut comparison = Comparison::new(
        evaluate_episodes(&kept_before)?,
        evaluate_episodes(&kept_after)?,
        cfg.evaluation.significance,
    )?;
    comparison.episode_counts = Some([
        (before.len(), kept_before.len()),
        (after.len(), kept_after.len()),
    ]);
    Ok((comparison, [before, after]))
}

pub fn cmd_evaluate(
    cfg: &RunConfig,
    q_before: &Path,
    q_after: &Path,
) -> Result<Comparison, CliError> {
    let qb = QTable::load(q_before).map_err(runtime)?;
    let qa = QTable::load(q_after).map_err(runtime)?;
    let (comparison, [before, after]) = evaluate_tables(cfg, &qb, &qa).map_err(runtime)?;
    fs::create_dir_all(&cfg.output_dir).map_err(runtime)?;
    sim::log::save_episodes(&cfg.output_dir.join("episodes_before.jsonl"), &before)
        .map_err(runtime)?;
    sim::log::save_episodes(&cfg.output_dir.join("episodes_after.jsonl"), &after)
        .map_err(runtime)?;
    write_report_file(cfg, &comparison)?;
    Ok(comparison)
}

/// Output path of an export: `<stem>_heatmap.<ext>` in `out_dir`, or next
/// to the input when no directory is given.
pub fn export_path(q: &Path, format: HeatmapFormat, out_dir: Option<&Path>) -> PathBuf {
    let stem = q
        .file_stem()
        .map_or_else(|| "q".into(), |s| s.to_string_lossy().into_owned());
    let ext = match format {
        HeatmapFormat::Csv => "csv",
        HeatmapFormat::Png => "png",
    };
    let dir = out_dir
        .map(Path::to_path_buf)
        .or_else(|| q.parent().map(Path::to_path_buf))
        .unwrap_or_default();
    dir.join(format!("{stem}_heatmap.{ext}"))
}

pub fn cmd_export(q: &Path, format: HeatmapFormat, out_dir: Option<&Path>) -> Result<(), CliError> {
    let table = QTable::load(q).map_err(runtime)?;
    let path = export_path(q, format, out_dir);
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(runtime)?;
    }
    if path == q {
        return Err(CliError::Usage(anyhow::anyhow!(
            "refusing to overwrite the input {}",
            q.display()
        )));
    }
    export_heatmap(&table, &path, format).map_err(runtime)?;
    println!("wrote {}", path.display());
    Ok(())
}
