//! Latency aggregation, time-series trace rows and CSV output.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use crate::sim::SimTime;

/// Order statistics use the nearest-rank definition; the mean is the exact
/// integer sum divided by the count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatencyStats {
    pub count: usize,
    pub mean_s: f64,
    pub p50: SimTime,
    pub p95: SimTime,
    pub p99: SimTime,
    pub max: SimTime,
}

impl LatencyStats {
    pub fn mean_us(&self) -> f64 {
        self.mean_s * 1e6
    }
}

fn nearest_rank(sorted: &[SimTime], pct: u32) -> SimTime {
    let n = sorted.len();
    let rank = (pct as usize * n).div_ceil(100).max(1);
    sorted[rank - 1]
}

/// `None` is the "no data" marker for an empty sample set.
pub fn aggregate(samples: &[SimTime]) -> Option<LatencyStats> {
    if samples.is_empty() {
        return None;
    }
    let mut sorted = samples.to_vec();
    sorted.sort_unstable();
    let sum: u128 = sorted.iter().map(|t| u128::from(t.as_ps())).sum();
    Some(LatencyStats {
        count: sorted.len(),
        mean_s: sum as f64 / sorted.len() as f64 / 1e12,
        p50: nearest_rank(&sorted, 50),
        p95: nearest_rank(&sorted, 95),
        p99: nearest_rank(&sorted, 99),
        max: *sorted.last().expect("non-empty"),
    })
}

/// One time-series sample of the end-to-end transport run.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t: SimTime,
    pub source: &'static str,
    pub goodput_bps: f64,
    /// Mean RTT over packets delivered in the tick; `None` when none were.
    pub rtt_s: Option<f64>,
    pub buffer_bytes: u64,
    pub cwnd_bytes: Option<u64>,
}

/// One aggregate row of the MAC latency sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct LatencyRow {
    pub users: usize,
    pub subframe_us: u64,
    pub tti_mode: &'static str,
    pub direction: &'static str,
    pub stats: Option<LatencyStats>,
    pub delivered: usize,
    pub still_queued: usize,
    pub outage_ues: usize,
    pub seed: u64,
}

pub const LATENCY_HEADER: [&str; 12] = [
    "users",
    "subframe_us",
    "tti_mode",
    "direction",
    "mean_latency_us",
    "p50_us",
    "p95_us",
    "p99_us",
    "delivered",
    "still_queued",
    "outage_ues",
    "seed",
];

pub const TRACE_HEADER: [&str; 6] = ["t_s", "source", "goodput_mbps", "rtt_ms", "buffer_kb", "cwnd_kb"];

const NO_DATA: &str = "NA";

fn us(t: SimTime) -> String {
    format!("{:.6}", t.as_us_f64())
}

/// Rows that serialize to a fixed column list.
pub trait CsvRecord {
    fn header() -> &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

impl CsvRecord for LatencyRow {
    fn header() -> &'static [&'static str] {
        &LATENCY_HEADER
    }

    fn fields(&self) -> Vec<String> {
        let (mean, p50, p95, p99) = match &self.stats {
            Some(s) => (format!("{:.6}", s.mean_us()), us(s.p50), us(s.p95), us(s.p99)),
            None => (NO_DATA.into(), NO_DATA.into(), NO_DATA.into(), NO_DATA.into()),
        };
        vec![
            self.users.to_string(),
            self.subframe_us.to_string(),
            self.tti_mode.to_string(),
            self.direction.to_string(),
            mean,
            p50,
            p95,
            p99,
            self.delivered.to_string(),
            self.still_queued.to_string(),
            self.outage_ues.to_string(),
            self.seed.to_string(),
        ]
    }
}

impl CsvRecord for TraceRow {
    fn header() -> &'static [&'static str] {
        &TRACE_HEADER
    }

    fn fields(&self) -> Vec<String> {
        vec![
            format!("{:.3}", self.t.as_secs_f64()),
            self.source.to_string(),
            format!("{:.3}", self.goodput_bps / 1e6),
            self.rtt_s.map_or_else(|| NO_DATA.into(), |r| format!("{:.3}", r * 1e3)),
            format!("{:.3}", self.buffer_bytes as f64 / 1e3),
            self.cwnd_bytes
                .map_or_else(|| NO_DATA.into(), |c| format!("{:.3}", c as f64 / 1e3)),
        ]
    }
}

/// Serializes a header line plus one line per record.
pub fn to_csv_bytes<R: CsvRecord>(rows: &[R]) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(R::header()).expect("in-memory write");
    for r in rows {
        w.write_record(r.fields()).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn write_csv<R: CsvRecord>(path: &Path, rows: &[R]) -> io::Result<()> {
    let mut f = File::create(path)?;
    f.write_all(&to_csv_bytes(rows))?;
    f.sync_all()
}
