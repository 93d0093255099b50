//! Flat `key = value` configuration with `[section]` headers.
//!
//! Every key lives in exactly one section; a key placed in the wrong
//! section or an unknown key is an error that points at its line. The same
//! keys can be overridden from the command line as `--key value`, with
//! dashes and underscores interchangeable.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::channel::{ChannelParams, ChannelScript, LosLaw, McsTable, Regime};
use crate::frame::{FramePattern, TtiMode};
use crate::mac::{CellConfig, MacConfig, TrafficConfig, UlDelivery};
use crate::sim::SimTime;
use crate::traffic::{JitterMode, Placement};
use crate::transport::{PathConfig, SourceKind, TcpParams};
use crate::Direction;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    MacLatency,
    TcpDrop,
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::MacLatency => "mac-latency",
            Scenario::TcpDrop => "tcp-drop",
        }
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mac-latency" => Ok(Scenario::MacLatency),
            "tcp-drop" => Ok(Scenario::TcpDrop),
            _ => Err(format!("unknown scenario '{s}' (expected mac-latency or tcp-drop)")),
        }
    }
}

/// Where a setting came from, for error messages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Preset,
    File { path: PathBuf, line: usize },
    Flag(String),
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Preset => f.write_str("preset"),
            Origin::File { path, line } => write!(f, "{}:{}", path.display(), line),
            Origin::Flag(flag) => write!(f, "--{}", flag.replace('_', "-")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub origin: Option<Origin>,
    pub message: String,
}

impl ConfigError {
    fn at(origin: &Origin, message: impl Into<String>) -> Self {
        ConfigError { origin: Some(origin.clone()), message: message.into() }
    }

    fn bare(message: impl Into<String>) -> Self {
        ConfigError { origin: None, message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.origin {
            Some(o) => write!(f, "{o}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// `(key, section, description)`
pub const KEYS: &[(&str, &str, &str)] = &[
    ("seed", "run", "base seed"),
    ("duration_s", "run", "simulated seconds per run"),
    ("out", "run", "CSV output path"),
    ("jobs", "run", "worker threads for sweeps, 0 = all cores"),
    ("subframe_us", "frame", "subframe length(s) in us, comma list"),
    ("n_symbols", "frame", "symbols per subframe, 0 = subframe_us * 6 / 25"),
    ("n_dl_ctrl", "frame", "DL control symbols"),
    ("n_ul_ctrl", "frame", "UL control symbols"),
    ("tti_mode", "frame", "variable, fixed or a comma list"),
    ("fixed_tti_quantum", "frame", "slot size in symbols for fixed TTI"),
    ("max_dcis_per_symbol", "mac", "allocations per DL-CTRL symbol, 0 = unlimited"),
    ("ul_delivery", "mac", "region_end or slot_end"),
    ("los_alpha", "channel", "LOS path loss intercept, dB"),
    ("los_beta", "channel", "LOS path loss exponent"),
    ("nlos_alpha", "channel", "NLOS path loss intercept, dB"),
    ("nlos_beta", "channel", "NLOS path loss exponent"),
    ("tx_power_dbm", "channel", "transmit power"),
    ("bf_gain_db", "channel", "combined beamforming gain"),
    ("noise_figure_db", "channel", "receiver noise figure"),
    ("bandwidth_hz", "channel", "system bandwidth"),
    ("cp_fraction", "channel", "cyclic prefix and pilot overhead"),
    ("shadowing", "channel", "draw log-normal shadowing (true/false)"),
    ("sigma_los_db", "channel", "LOS shadowing std dev"),
    ("sigma_nlos_db", "channel", "NLOS shadowing std dev"),
    ("los_decay_per_m", "channel", "P(LOS) = exp(-k d)"),
    ("p_los", "channel", "fixed LOS probability instead of the distance law"),
    ("regime", "channel", "random, los or nlos"),
    ("mcs_table", "channel", "eff@min_sinr pairs, comma list"),
    ("distance", "channel", "put every user at this distance (m)"),
    ("min_distance_m", "channel", "placement lower bound"),
    ("max_distance_m", "channel", "placement upper bound"),
    ("users", "traffic", "user count(s), comma list"),
    ("packet_bytes", "traffic", "small-packet size"),
    ("flow_rate_Bps", "traffic", "per-flow rate, bytes/s"),
    ("jitter_mode", "traffic", "uniform or none"),
    ("dl_flows", "traffic", "give every user a DL flow too (true/false)"),
    ("directions", "traffic", "directions reported: ul, dl or ul,dl"),
    ("source", "transport", "tcp, udp or tcp,udp"),
    ("app_rate_bps", "transport", "application rate"),
    ("core_owd_ms", "transport", "one-way core delay"),
    ("mss", "transport", "TCP segment size"),
    ("initial_cwnd_mss", "transport", "initial window in segments"),
    ("min_rto_ms", "transport", "RTO floor"),
    ("udp_packet_bytes", "transport", "UDP datagram size"),
    ("buffer_cap_bytes", "transport", "radio buffer drop-tail cap, 0 = unbounded"),
    ("channel_script", "transport", "regime switches, e.g. 0:los,3:nlos"),
    ("tick_ms", "transport", "trace sampling interval"),
];

fn canonical_key(raw: &str) -> Option<&'static str> {
    let k = raw.trim().replace('-', "_");
    KEYS.iter().map(|(key, _, _)| *key).find(|key| key.eq_ignore_ascii_case(&k))
}

fn section_of(key: &str) -> &'static str {
    KEYS.iter().find(|(k, _, _)| *k == key).map(|(_, s, _)| *s).expect("registered key")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TtiKind {
    Variable,
    Fixed,
}

impl TtiKind {
    pub fn name(&self) -> &'static str {
        match self {
            TtiKind::Variable => "variable",
            TtiKind::Fixed => "fixed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegimeChoice {
    Random,
    Forced(Regime),
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub seed: u64,
    pub duration: SimTime,
    pub out: PathBuf,
    pub jobs: usize,
    pub subframes_us: Vec<u64>,
    pub n_symbols: usize,
    pub n_dl_ctrl: usize,
    pub n_ul_ctrl: usize,
    pub tti_modes: Vec<TtiKind>,
    pub fixed_tti_quantum: usize,
    pub mac: MacConfig,
    pub channel: ChannelParams,
    pub los_decay_per_m: f64,
    pub p_los: Option<f64>,
    pub regime: RegimeChoice,
    pub placement: Placement,
    pub users: Vec<usize>,
    pub traffic: TrafficConfig,
    pub directions: Vec<Direction>,
    pub sources: Vec<SourceKind>,
    pub app_rate_bps: u64,
    pub core_owd: SimTime,
    pub tcp: TcpParams,
    pub udp_packet_bytes: u32,
    pub buffer_cap_bytes: u64,
    pub channel_script: ChannelScript,
    pub tick: SimTime,
    origins: HashMap<&'static str, Origin>,
}

impl ScenarioConfig {
    pub fn preset(scenario: Scenario) -> Self {
        let mut cfg = ScenarioConfig {
            scenario,
            seed: 1,
            duration: SimTime::from_ms(5000),
            out: PathBuf::from("mac_latency.csv"),
            jobs: 0,
            subframes_us: vec![200, 100, 50],
            n_symbols: 0,
            n_dl_ctrl: 1,
            n_ul_ctrl: 1,
            tti_modes: vec![TtiKind::Variable, TtiKind::Fixed],
            fixed_tti_quantum: 6,
            mac: MacConfig::default(),
            channel: ChannelParams::default(),
            los_decay_per_m: 0.0149,
            p_los: None,
            regime: RegimeChoice::Random,
            placement: Placement::default(),
            users: vec![10, 20, 50, 100, 200],
            traffic: TrafficConfig::default(),
            directions: vec![Direction::Ul],
            sources: vec![SourceKind::Tcp, SourceKind::Udp],
            app_rate_bps: 1_000_000_000,
            core_owd: SimTime::from_ms(5),
            tcp: TcpParams::default(),
            udp_packet_bytes: 1500,
            buffer_cap_bytes: 0,
            channel_script: "0:los,3:nlos".parse().expect("static script"),
            tick: SimTime::from_ms(100),
            origins: HashMap::new(),
        };
        if scenario == Scenario::TcpDrop {
            cfg.duration = SimTime::from_ms(6000);
            cfg.out = PathBuf::from("tcp_drop.csv");
            cfg.subframes_us = vec![100];
            cfg.tti_modes = vec![TtiKind::Variable];
            cfg.channel.shadowing_enabled = false;
            cfg.placement.fixed_distance_m = Some(180.0);
            // a finite buffer so the window sees a loss after the drop
            cfg.buffer_cap_bytes = 12_500_000;
        }
        cfg
    }

    /// Reads a config file over the preset.
    pub fn load_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::bare(format!("{}: {e}", path.display())))?;
        self.apply_text(&text, path)
    }

    pub fn apply_text(&mut self, text: &str, path: &Path) -> Result<(), ConfigError> {
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let origin = Origin::File { path: path.to_path_buf(), line: i + 1 };
            let line = raw.split(['#', ';']).next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| ConfigError::at(&origin, "unterminated section header"))?
                    .trim()
                    .to_ascii_lowercase();
                if !KEYS.iter().any(|(_, s, _)| *s == name) {
                    return Err(ConfigError::at(&origin, format!("unknown section [{name}]")));
                }
                section = Some(name);
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::at(&origin, format!("expected key = value, got '{line}'")))?;
            let key = canonical_key(k)
                .ok_or_else(|| ConfigError::at(&origin, format!("unknown key '{}'", k.trim())))?;
            if let Some(s) = &section {
                let home = section_of(key);
                if home != s {
                    return Err(ConfigError::at(&origin, format!("key '{key}' belongs in [{home}], not [{s}]")));
                }
            }
            self.set(key, v.trim(), origin)?;
        }
        Ok(())
    }

    /// Applies `--key value` / `--key=value` pairs.
    pub fn apply_flags(&mut self, args: &[String]) -> Result<(), ConfigError> {
        let mut it = args.iter();
        while let Some(arg) = it.next() {
            let Some(flag) = arg.strip_prefix("--") else {
                return Err(ConfigError::bare(format!("unexpected argument '{arg}'")));
            };
            let (name, inline) = match flag.split_once('=') {
                Some((n, v)) => (n, Some(v.to_string())),
                None => (flag, None),
            };
            let origin = Origin::Flag(name.to_string());
            let key = canonical_key(name).ok_or_else(|| ConfigError::at(&origin, "unknown option"))?;
            let value = match inline {
                Some(v) => v,
                None => it
                    .next()
                    .cloned()
                    .ok_or_else(|| ConfigError::at(&origin, "missing value"))?,
            };
            self.set(key, value.trim(), Origin::Flag(key.to_string()))?;
        }
        Ok(())
    }

    fn set(&mut self, key: &'static str, v: &str, origin: Origin) -> Result<(), ConfigError> {
        let fail = |m: String| ConfigError::at(&origin, m);
        self.apply_value(key, v).map_err(|m| fail(format!("{key}: {m}")))?;
        self.origins.insert(key, origin);
        Ok(())
    }

    fn apply_value(&mut self, key: &str, v: &str) -> Result<(), String> {
        match key {
            "seed" => self.seed = num(v)?,
            "duration_s" => self.duration = secs(v, 1.0)?,
            "out" => {
                if v.is_empty() {
                    return Err("empty path".into());
                }
                self.out = PathBuf::from(v)
            }
            "jobs" => self.jobs = num(v)?,
            "subframe_us" => self.subframes_us = list(v)?,
            "n_symbols" => self.n_symbols = num(v)?,
            "n_dl_ctrl" => self.n_dl_ctrl = num(v)?,
            "n_ul_ctrl" => self.n_ul_ctrl = num(v)?,
            "tti_mode" => {
                self.tti_modes = split(v)
                    .map(|m| match m {
                        "variable" => Ok(TtiKind::Variable),
                        "fixed" => Ok(TtiKind::Fixed),
                        _ => Err(format!("'{m}' is not variable or fixed")),
                    })
                    .collect::<Result<_, _>>()?
            }
            "fixed_tti_quantum" => self.fixed_tti_quantum = num(v)?,
            "max_dcis_per_symbol" => self.mac.max_dcis_per_symbol = num(v)?,
            "ul_delivery" => {
                self.mac.ul_delivery = match v {
                    "region_end" => UlDelivery::RegionEnd,
                    "slot_end" => UlDelivery::SlotEnd,
                    _ => return Err(format!("'{v}' is not region_end or slot_end")),
                }
            }
            "los_alpha" => self.channel.pathloss.los_alpha = real(v)?,
            "los_beta" => self.channel.pathloss.los_beta = real(v)?,
            "nlos_alpha" => self.channel.pathloss.nlos_alpha = real(v)?,
            "nlos_beta" => self.channel.pathloss.nlos_beta = real(v)?,
            "tx_power_dbm" => self.channel.budget.tx_power_dbm = real(v)?,
            "bf_gain_db" => self.channel.budget.bf_gain_db = real(v)?,
            "noise_figure_db" => self.channel.budget.noise_figure_db = real(v)?,
            "bandwidth_hz" => self.channel.budget.bandwidth_hz = positive(v)?,
            "cp_fraction" => {
                let c = real(v)?;
                if !(0.0..1.0).contains(&c) {
                    return Err("must be in [0, 1)".into());
                }
                self.channel.cp_fraction = c
            }
            "shadowing" => self.channel.shadowing_enabled = boolean(v)?,
            "sigma_los_db" => self.channel.sigma_los_db = non_negative(v)?,
            "sigma_nlos_db" => self.channel.sigma_nlos_db = non_negative(v)?,
            "los_decay_per_m" => self.los_decay_per_m = non_negative(v)?,
            "p_los" => {
                let p = real(v)?;
                if !(0.0..=1.0).contains(&p) {
                    return Err("must be in [0, 1]".into());
                }
                self.p_los = Some(p)
            }
            "regime" => {
                self.regime = match v.to_ascii_lowercase().as_str() {
                    "random" => RegimeChoice::Random,
                    "los" => RegimeChoice::Forced(Regime::Los),
                    "nlos" => RegimeChoice::Forced(Regime::Nlos),
                    _ => return Err(format!("'{v}' is not random, los or nlos")),
                }
            }
            "mcs_table" => self.channel.mcs = v.parse::<McsTable>().map_err(|e| e.to_string())?,
            "distance" => self.placement.fixed_distance_m = Some(positive(v)?),
            "min_distance_m" => self.placement.min_distance_m = positive(v)?,
            "max_distance_m" => self.placement.max_distance_m = positive(v)?,
            "users" => self.users = list(v)?,
            "packet_bytes" => self.traffic.packet_bytes = num(v)?,
            "flow_rate_Bps" => self.traffic.rate_bytes_per_s = num(v)?,
            "jitter_mode" => {
                self.traffic.jitter_mode = match v {
                    "uniform" | "uniform-phase" | "uniform_phase" => JitterMode::UniformPhase,
                    "none" => JitterMode::None,
                    _ => return Err(format!("'{v}' is not uniform or none")),
                }
            }
            "dl_flows" => self.traffic.dl_enabled = boolean(v)?,
            "directions" => {
                self.directions = split(v)
                    .map(|d| match d {
                        "ul" => Ok(Direction::Ul),
                        "dl" => Ok(Direction::Dl),
                        _ => Err(format!("'{d}' is not ul or dl")),
                    })
                    .collect::<Result<_, _>>()?
            }
            "source" => {
                self.sources = split(v)
                    .map(|s| match s {
                        "tcp" => Ok(SourceKind::Tcp),
                        "udp" => Ok(SourceKind::Udp),
                        _ => Err(format!("'{s}' is not tcp or udp")),
                    })
                    .collect::<Result<_, _>>()?
            }
            "app_rate_bps" => self.app_rate_bps = num(v)?,
            "core_owd_ms" => self.core_owd = secs(v, 1e-3)?,
            "mss" => self.tcp.mss = num(v)?,
            "initial_cwnd_mss" => self.tcp.initial_cwnd_mss = num(v)?,
            "min_rto_ms" => self.tcp.min_rto = secs(v, 1e-3)?,
            "udp_packet_bytes" => self.udp_packet_bytes = num(v)?,
            "buffer_cap_bytes" => self.buffer_cap_bytes = num(v)?,
            "channel_script" => self.channel_script = v.parse().map_err(|e: crate::channel::ChannelError| e.to_string())?,
            "tick_ms" => self.tick = secs(v, 1e-3)?,
            _ => unreachable!("unregistered key {key}"),
        }
        Ok(())
    }

    fn err(&self, key: &str, message: String) -> ConfigError {
        ConfigError { origin: self.origins.get(key).cloned(), message }
    }

    /// Cross-field checks, run once everything has been applied and before
    /// any simulation starts.
    pub fn validate(&mut self) -> Result<(), ConfigError> {
        let nonempty = [
            ("users", self.users.is_empty()),
            ("subframe_us", self.subframes_us.is_empty()),
            ("tti_mode", self.tti_modes.is_empty()),
            ("directions", self.directions.is_empty()),
            ("source", self.sources.is_empty()),
        ];
        for (key, empty) in nonempty {
            if empty {
                return Err(self.err(key, format!("{key}: empty list")));
            }
        }
        if self.users.contains(&0) {
            return Err(self.err("users", "users: must be at least 1".into()));
        }
        if self.duration == SimTime::ZERO {
            return Err(self.err("duration_s", "duration_s: must be positive".into()));
        }
        if self.fixed_tti_quantum == 0 {
            return Err(self.err("fixed_tti_quantum", "fixed_tti_quantum: must be at least 1".into()));
        }
        for &us in &self.subframes_us {
            self.frame(us, TtiKind::Variable)
                .map_err(|e| self.err(if self.n_symbols > 0 { "n_symbols" } else { "subframe_us" }, e))?;
        }
        if self.placement.min_distance_m >= self.placement.max_distance_m {
            return Err(self.err("max_distance_m", "max_distance_m: must exceed min_distance_m".into()));
        }
        if self.traffic.packet_bytes == 0 || self.traffic.rate_bytes_per_s == 0 {
            let key = if self.traffic.packet_bytes == 0 { "packet_bytes" } else { "flow_rate_Bps" };
            return Err(self.err(key, format!("{key}: must be positive")));
        }
        if self.directions.contains(&Direction::Dl) && !self.traffic.dl_enabled {
            return Err(self.err("directions", "directions: dl reported but dl_flows is false".into()));
        }
        self.channel.los_law = match (self.regime, self.p_los) {
            (RegimeChoice::Forced(r), _) => LosLaw::Forced(r),
            (RegimeChoice::Random, Some(p_los)) => LosLaw::Fixed { p_los },
            (RegimeChoice::Random, None) => LosLaw::Exponential { decay_per_m: self.los_decay_per_m },
        };
        self.channel.validate().map_err(|e| self.err("p_los", e.to_string()))?;
        if self.scenario == Scenario::TcpDrop {
            if self.subframes_us.len() != 1 || self.tti_modes.len() != 1 {
                let key = if self.subframes_us.len() != 1 { "subframe_us" } else { "tti_mode" };
                return Err(self.err(key, format!("{key}: tcp-drop takes a single value")));
            }
            let checks = [
                ("app_rate_bps", self.app_rate_bps == 0),
                ("mss", self.tcp.mss == 0),
                ("initial_cwnd_mss", self.tcp.initial_cwnd_mss == 0),
                ("udp_packet_bytes", self.udp_packet_bytes == 0),
                ("tick_ms", self.tick == SimTime::ZERO),
            ];
            for (key, bad) in checks {
                if bad {
                    return Err(self.err(key, format!("{key}: must be positive")));
                }
            }
            if self.mss_fits_u32().is_none() {
                return Err(self.err("mss", "mss: too large".into()));
            }
        }
        Ok(())
    }

    fn mss_fits_u32(&self) -> Option<u32> {
        u32::try_from(self.tcp.mss).ok()
    }

    pub fn frame(&self, subframe_us: u64, mode: TtiKind) -> Result<FramePattern, String> {
        let tti = match mode {
            TtiKind::Variable => TtiMode::Variable,
            TtiKind::Fixed => TtiMode::Fixed { quantum: self.fixed_tti_quantum },
        };
        let n = if self.n_symbols > 0 {
            self.n_symbols
        } else {
            (subframe_us * 6 / 25) as usize
        };
        FramePattern::new(SimTime::from_us(subframe_us), n, self.n_dl_ctrl, self.n_ul_ctrl, tti)
            .map_err(|e| format!("subframe {subframe_us} us: {e}"))
    }

    /// One MAC latency run of the sweep.
    pub fn cell(&self, users: usize, subframe_us: u64, mode: TtiKind) -> CellConfig {
        CellConfig {
            frame: self.frame(subframe_us, mode).expect("validated"),
            channel: self.channel.clone(),
            mac: self.mac,
            users,
            traffic: self.traffic,
            placement: self.placement,
            duration: self.duration,
            seed: self.seed,
        }
    }

    /// The sweep, users outermost, then subframe, then TTI mode.
    pub fn sweep(&self) -> Vec<(usize, u64, TtiKind)> {
        let mut cells = Vec::new();
        for &u in &self.users {
            for &s in &self.subframes_us {
                for &m in &self.tti_modes {
                    cells.push((u, s, m));
                }
            }
        }
        cells
    }

    pub fn path(&self, source: SourceKind) -> PathConfig {
        PathConfig {
            source,
            app_rate_bps: self.app_rate_bps,
            core_owd: self.core_owd,
            tcp: self.tcp,
            udp_packet_bytes: self.udp_packet_bytes,
            buffer_cap_bytes: self.buffer_cap_bytes,
            distance_m: self.placement.fixed_distance_m.unwrap_or(180.0),
            initial_regime: match self.regime {
                RegimeChoice::Forced(r) => r,
                RegimeChoice::Random => Regime::Los,
            },
            script: self.channel_script.clone(),
            frame: self.frame(self.subframes_us[0], self.tti_modes[0]).expect("validated"),
            channel: self.channel.clone(),
            duration: self.duration,
            tick: self.tick,
            seed: self.seed,
        }
    }
}

fn split(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn num<T: FromStr>(v: &str) -> Result<T, String> {
    v.replace('_', "").parse().map_err(|_| format!("'{v}' is not a non-negative integer"))
}

fn list<T: FromStr>(v: &str) -> Result<Vec<T>, String> {
    split(v).map(num).collect()
}

fn real(v: &str) -> Result<f64, String> {
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(format!("'{v}' is not a number")),
    }
}

fn positive(v: &str) -> Result<f64, String> {
    let x = real(v)?;
    if x > 0.0 { Ok(x) } else { Err("must be positive".into()) }
}

fn non_negative(v: &str) -> Result<f64, String> {
    let x = real(v)?;
    if x >= 0.0 { Ok(x) } else { Err("must not be negative".into()) }
}

fn secs(v: &str, unit: f64) -> Result<SimTime, String> {
    Ok(SimTime::from_secs_f64(non_negative(v)? * unit))
}

fn boolean(v: &str) -> Result<bool, String> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(format!("'{v}' is not true or false")),
    }
}
