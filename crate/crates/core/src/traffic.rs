//! Constant-bit-rate small-packet flows and user placement.

use rand::Rng;

use crate::channel::{ChannelParams, Regime};
use crate::sim::{RngStream, SimTime};
use crate::Direction;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JitterMode {
    None,
    /// Start phase drawn uniformly in `[0, inter_arrival)`.
    UniformPhase,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowSpec {
    pub packet_bytes: u32,
    pub rate_bytes_per_s: u64,
    pub direction: Direction,
    pub start_time: SimTime,
    pub jitter_mode: JitterMode,
}

impl FlowSpec {
    pub fn new(direction: Direction) -> Self {
        FlowSpec {
            packet_bytes: 100,
            rate_bytes_per_s: 100_000,
            direction,
            start_time: SimTime::ZERO,
            jitter_mode: JitterMode::UniformPhase,
        }
    }

    pub fn inter_arrival(&self) -> SimTime {
        let ps = u128::from(self.packet_bytes) * 1_000_000_000_000 / u128::from(self.rate_bytes_per_s);
        SimTime::from_ps(ps as u64)
    }

    pub fn offered_bps(&self) -> f64 {
        self.rate_bytes_per_s as f64 * 8.0
    }
}

/// Lazily yields the arrival instants of one flow.
#[derive(Debug, Clone)]
pub struct ArrivalStream {
    next: SimTime,
    step: SimTime,
    end: SimTime,
}

impl ArrivalStream {
    /// Next arrival without consuming it.
    pub fn peek(&self) -> Option<SimTime> {
        (self.next < self.end).then_some(self.next)
    }
}

impl Iterator for ArrivalStream {
    type Item = SimTime;

    fn next(&mut self) -> Option<SimTime> {
        let t = self.peek()?;
        self.next += self.step;
        Some(t)
    }
}

/// Arrivals at `start + phase + k * inter_arrival`, strictly before `t_end`.
pub fn generate_arrivals(flow: &FlowSpec, t_end: SimTime, rng: &mut RngStream) -> ArrivalStream {
    let step = flow.inter_arrival();
    assert!(step > SimTime::ZERO, "flow rate too high for picosecond spacing");
    let phase = match flow.jitter_mode {
        JitterMode::None => 0,
        JitterMode::UniformPhase => rng.random_range(0..step.as_ps()),
    };
    ArrivalStream {
        next: flow.start_time + SimTime::from_ps(phase),
        step,
        end: t_end,
    }
}

/// Placement bounds and overrides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Placement {
    pub min_distance_m: f64,
    pub max_distance_m: f64,
    /// Puts every user at this distance when set.
    pub fixed_distance_m: Option<f64>,
}

impl Default for Placement {
    fn default() -> Self {
        Placement {
            min_distance_m: 10.0,
            max_distance_m: 200.0,
            fixed_distance_m: None,
        }
    }
}

/// Distances i.i.d. uniform on the placement range; regime from the LOS law.
pub fn place_users(
    n_users: usize,
    placement: &Placement,
    channel: &ChannelParams,
    distance_rng: &mut RngStream,
    los_rng: &mut RngStream,
) -> Vec<(f64, Regime)> {
    (0..n_users)
        .map(|_| {
            let d = match placement.fixed_distance_m {
                Some(d) => d,
                None => distance_rng.random_range(placement.min_distance_m..=placement.max_distance_m),
            };
            (d, channel.los_draw(d, los_rng))
        })
        .collect()
}
