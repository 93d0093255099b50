//! Command-line front end: scenario presets, config files, sweeps and CSV
//! output.

mod config;
pub mod sweep;

use std::fmt;
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;

use clap::Parser;

pub use config::{ConfigError, Origin, RegimeChoice, Scenario, ScenarioConfig, TtiKind, KEYS};

use crate::mac::{CellResult, CellSim};
use crate::metrics::{self, aggregate, LatencyRow, TraceRow};
use crate::sim::SimTime;
use crate::transport::{run_path, CongestionEvent, PathResult};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "sim",
    about = "mmWave cell simulator: flexible-TTI MAC latency sweep and TCP/UDP capacity-drop trace",
    after_help = "Any config key can be given as --key value (dashes or underscores); run with --keys to list them."
)]
struct Args {
    /// mac-latency or tcp-drop
    #[arg(required_unless_present = "keys")]
    scenario: Option<String>,
    /// INI-style config file applied over the scenario preset
    #[arg(long)]
    config: Option<PathBuf>,
    /// List config keys and exit
    #[arg(long)]
    keys: bool,
    /// Config key overrides
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, hide = true)]
    overrides: Vec<String>,
}

/// A run that did not complete.
#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure {
    pub what: String,
    pub message: String,
}

impl fmt::Display for RunFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} failed: {}", self.what, self.message)
    }
}

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Runtime(Vec<RunFailure>),
    Io(PathBuf, std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Runtime(_) | CliError::Io(..) => EXIT_RUNTIME,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "config error: {e}"),
            CliError::Runtime(fails) => {
                let lines: Vec<String> = fails.iter().map(|x| x.to_string()).collect();
                f.write_str(&lines.join("\n"))
            }
            CliError::Io(p, e) => write!(f, "cannot write {}: {e}", p.display()),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

fn panic_message(p: Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "panic".into())
}

/// Runs one sweep cell, turning errors and panics into a failure that
/// names the cell.
fn guarded<R>(what: impl FnOnce() -> String, run: impl FnOnce() -> Result<R, String>) -> Result<R, RunFailure> {
    match panic::catch_unwind(AssertUnwindSafe(run)) {
        Ok(Ok(r)) => Ok(r),
        Ok(Err(message)) => Err(RunFailure { what: what(), message }),
        Err(p) => Err(RunFailure { what: what(), message: panic_message(p) }),
    }
}

/// Aggregate rows for one cell result, one per reported direction.
pub fn latency_rows(cfg: &ScenarioConfig, users: usize, subframe_us: u64, mode: TtiKind, r: &CellResult) -> Vec<LatencyRow> {
    cfg.directions
        .iter()
        .map(|&d| LatencyRow {
            users,
            subframe_us,
            tti_mode: mode.name(),
            direction: d.name(),
            stats: aggregate(r.latencies(d)),
            delivered: r.latencies(d).len(),
            still_queued: r.still_queued(d),
            outage_ues: r.outage_ues,
            seed: cfg.seed,
        })
        .collect()
}

/// Runs the MAC latency sweep. Rows come out in sweep order regardless of
/// `cfg.jobs`.
pub fn run_scenario_a(cfg: &ScenarioConfig) -> Result<Vec<LatencyRow>, Vec<RunFailure>> {
    let cells = cfg.sweep();
    let results = sweep::run_indexed(&cells, cfg.jobs, |_, &(users, us, mode)| {
        guarded(
            || format!("run (users={users}, subframe_us={us}, tti_mode={})", mode.name()),
            || {
                let sim = CellSim::new(cfg.cell(users, us, mode)).map_err(|e| e.to_string())?;
                Ok(latency_rows(cfg, users, us, mode, &sim.run()))
            },
        )
    });
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(mut v) => rows.append(&mut v),
            Err(f) => failures.push(f),
        }
    }
    if failures.is_empty() { Ok(rows) } else { Err(failures) }
}

/// Runs the capacity-drop experiment once per configured source.
pub fn run_scenario_b(cfg: &ScenarioConfig) -> Result<Vec<PathResult>, Vec<RunFailure>> {
    let results = sweep::run_indexed(&cfg.sources, cfg.jobs, |_, &source| {
        guarded(
            || format!("run (source={})", source.name()),
            || run_path(&cfg.path(source), |_, _| {}).map_err(|e| e.to_string()),
        )
    });
    let (ok, failures): (Vec<_>, Vec<_>) = results.into_iter().partition(Result::is_ok);
    if failures.is_empty() {
        Ok(ok.into_iter().map(Result::unwrap).collect())
    } else {
        Err(failures.into_iter().map(Result::unwrap_err).collect())
    }
}

/// Parses the command line and applies file then flags over the preset.
pub fn load_config(args: &[String]) -> Result<Option<ScenarioConfig>, CliError> {
    let parsed = match Args::try_parse_from(args) {
        Ok(p) => p,
        Err(e) if !e.use_stderr() => {
            // --help
            let _ = e.print();
            return Ok(None);
        }
        Err(e) => {
            let message = e.to_string().trim_end().to_string();
            return Err(CliError::Config(ConfigError { origin: None, message }));
        }
    };
    if parsed.keys {
        for (k, section, help) in KEYS {
            println!("{:<22} [{section}] {help}", k);
        }
        return Ok(None);
    }
    let scenario: Scenario = parsed
        .scenario
        .as_deref()
        .unwrap_or_default()
        .parse()
        .map_err(|m| CliError::Config(ConfigError { origin: None, message: m }))?;
    let mut cfg = ScenarioConfig::preset(scenario);
    if let Some(path) = &parsed.config {
        cfg.load_file(path)?;
    }
    cfg.apply_flags(&parsed.overrides)?;
    cfg.validate()?;
    Ok(Some(cfg))
}

fn fmt_opt(v: Option<f64>, scale: f64) -> String {
    v.map_or_else(|| "NA".into(), |x| format!("{:.1}", x * scale))
}

fn window_mean(rows: &[TraceRow], from: SimTime, to: SimTime) -> Option<f64> {
    let v: Vec<f64> = rows.iter().filter(|r| r.t > from && r.t <= to).map(|r| r.goodput_bps).collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn summarize_b(cfg: &ScenarioConfig, r: &PathResult) -> String {
    let drop = cfg
        .channel_script
        .transitions()
        .iter()
        .find(|(t, _)| *t > SimTime::ZERO && *t < cfg.duration)
        .map_or(cfg.duration, |(t, _)| *t);
    let pre = window_mean(&r.rows, SimTime::from_ms(1000).min(drop), drop);
    let post = window_mean(&r.rows, drop + SimTime::from_ms(500).min(cfg.duration - drop), cfg.duration);
    let peak = r.rows.iter().filter_map(|x| x.rtt_s).fold(None, |a: Option<f64>, x| Some(a.map_or(x, |a| a.max(x))));
    let first_cut: Option<&CongestionEvent> = r.congestion_events.iter().find(|e| e.t >= drop);
    let source = r.rows.first().map_or("?", |x| x.source);
    let mut s = format!(
        "{source}: goodput before drop {} Mb/s, after {} Mb/s (link {:.1} -> {:.1} Mb/s), peak RTT {} ms",
        fmt_opt(pre, 1e-6),
        fmt_opt(post, 1e-6),
        r.los_rate_bps as f64 / 1e6,
        r.nlos_rate_bps as f64 / 1e6,
        fmt_opt(peak, 1e3),
    );
    if let Some(e) = first_cut {
        s += &format!(
            ", first window cut at {:.3} s ({:?}, ssthresh {:.0} kB)",
            e.t.as_secs_f64(),
            e.kind,
            e.ssthresh_after as f64 / 1e3
        );
    }
    s
}

/// Executes a validated configuration: runs, writes the CSV, prints a
/// summary.
pub fn execute(cfg: &ScenarioConfig) -> Result<(), CliError> {
    match cfg.scenario {
        Scenario::MacLatency => {
            let rows = run_scenario_a(cfg).map_err(CliError::Runtime)?;
            metrics::write_csv(&cfg.out, &rows).map_err(|e| CliError::Io(cfg.out.clone(), e))?;
            println!("{:>6} {:>12} {:>9} {:>4} {:>14} {:>10}", "users", "subframe_us", "tti", "dir", "mean_us", "delivered");
            for r in &rows {
                println!(
                    "{:>6} {:>12} {:>9} {:>4} {:>14} {:>10}",
                    r.users,
                    r.subframe_us,
                    r.tti_mode,
                    r.direction,
                    r.stats.map_or_else(|| "NA".into(), |s| format!("{:.1}", s.mean_us())),
                    r.delivered
                );
            }
            println!("wrote {} rows to {}", rows.len(), cfg.out.display());
        }
        Scenario::TcpDrop => {
            let results = run_scenario_b(cfg).map_err(CliError::Runtime)?;
            let rows: Vec<TraceRow> = results.iter().flat_map(|r| r.rows.iter().cloned()).collect();
            metrics::write_csv(&cfg.out, &rows).map_err(|e| CliError::Io(cfg.out.clone(), e))?;
            for r in &results {
                println!("{}", summarize_b(cfg, r));
            }
            println!("wrote {} rows to {}", rows.len(), cfg.out.display());
        }
    }
    Ok(())
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with_args(args: &[String]) -> i32 {
    let run = load_config(args).and_then(|cfg| match cfg {
        Some(cfg) => execute(&cfg),
        None => Ok(()),
    });
    match run {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
