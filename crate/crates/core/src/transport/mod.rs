//! End-to-end path for the capacity-drop experiment: an application source
//! (TCP NewReno or UDP CBR), a fixed core delay, the radio buffer and a
//! fixed-delay ACK return path.

mod newreno;
mod path;
mod pipe;

pub use newreno::{AckInfo, AckOutcome, CongestionState, Phase, TcpParams};
pub use path::{run_path, CongestionEvent, CongestionKind, PathResult, PathStats};
pub use pipe::{serialization, Datagram, Delivered, LinkPipe};

use crate::channel::{ChannelError, ChannelParams, ChannelScript, LinkState, Regime};
use crate::frame::{FramePattern, TtiMode};
use crate::sim::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceKind {
    Tcp,
    Udp,
}

impl SourceKind {
    pub fn name(&self) -> &'static str {
        match self {
            SourceKind::Tcp => "tcp",
            SourceKind::Udp => "udp",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathConfig {
    pub source: SourceKind,
    pub app_rate_bps: u64,
    pub core_owd: SimTime,
    pub tcp: TcpParams,
    pub udp_packet_bytes: u32,
    /// Drop-tail limit of the radio buffer, 0 for unbounded.
    pub buffer_cap_bytes: u64,
    pub distance_m: f64,
    /// Regime before the first script entry.
    pub initial_regime: Regime,
    pub script: ChannelScript,
    pub frame: FramePattern,
    pub channel: ChannelParams,
    pub duration: SimTime,
    pub tick: SimTime,
    pub seed: u64,
}

impl Default for PathConfig {
    fn default() -> Self {
        let channel = ChannelParams {
            shadowing_enabled: false,
            ..ChannelParams::default()
        };
        PathConfig {
            source: SourceKind::Tcp,
            app_rate_bps: 1_000_000_000,
            core_owd: SimTime::from_ms(5),
            tcp: TcpParams::default(),
            udp_packet_bytes: 1500,
            buffer_cap_bytes: 0,
            distance_m: 180.0,
            initial_regime: Regime::Los,
            script: "0:los,3:nlos".parse().expect("static script"),
            frame: FramePattern::standard(100, TtiMode::Variable).expect("standard frame"),
            channel,
            duration: SimTime::from_ms(6000),
            tick: SimTime::from_ms(100),
            seed: 1,
        }
    }
}

/// Single-user capacity with the whole data region allocated, in bit/s.
/// Zero in outage.
pub fn drain_rate_bps(channel: &ChannelParams, frame: &FramePattern, link: &LinkState) -> u64 {
    let mcs = channel.select_mcs(link.sinr_db);
    match channel.bits_per_symbol(mcs, frame) {
        Ok(bits) => {
            let per_subframe = bits as u128 * frame.n_data() as u128;
            (per_subframe * 1_000_000_000_000 / frame.subframe().as_ps() as u128) as u64
        }
        Err(ChannelError::Outage) => 0,
        Err(e) => unreachable!("bits_per_symbol: {e}"),
    }
}

/// Send instants of a CBR source: one `packet_bytes` packet every
/// `packet_bytes * 8 / rate_bps`, starting at zero, strictly before `t_end`.
pub fn run_udp_source(rate_bps: u64, packet_bytes: u32, t_end: SimTime) -> impl Iterator<Item = SimTime> {
    assert!(rate_bps > 0, "source rate must be positive");
    (0u64..)
        .map(move |k| cbr_instant(k, packet_bytes, rate_bps))
        .take_while(move |t| *t < t_end)
}

/// Instant of the `k`-th unit of `bytes` at `rate_bps`, computed from k
/// directly so spacing never drifts.
pub(crate) fn cbr_instant(k: u64, bytes: u32, rate_bps: u64) -> SimTime {
    let ps = k as u128 * bytes as u128 * 8 * 1_000_000_000_000 / rate_bps as u128;
    SimTime::from_ps(ps as u64)
}
