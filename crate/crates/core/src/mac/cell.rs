use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::channel::{ChannelError, ChannelParams};
use crate::frame::FramePattern;
use crate::sim::{Event, Model, RngStream, Scheduler, SimTime};
use crate::traffic::{self, ArrivalStream, FlowSpec, JitterMode, Placement};
use crate::Direction;

use super::{
    flow_id, on_packet_arrival, on_ul_ctrl, schedule_subframe, validate_plan, MacConfig, Packet,
    UeContext,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrafficConfig {
    pub packet_bytes: u32,
    pub rate_bytes_per_s: u64,
    pub jitter_mode: JitterMode,
    pub dl_enabled: bool,
    pub ul_enabled: bool,
}

impl Default for TrafficConfig {
    fn default() -> Self {
        TrafficConfig {
            packet_bytes: 100,
            rate_bytes_per_s: 100_000,
            jitter_mode: JitterMode::UniformPhase,
            dl_enabled: true,
            ul_enabled: true,
        }
    }
}

/// One small-packet latency run: a cell with `users` UEs, each with a DL
/// and a UL constant-rate flow.
#[derive(Debug, Clone, PartialEq)]
pub struct CellConfig {
    pub frame: FramePattern,
    pub channel: ChannelParams,
    pub mac: MacConfig,
    pub users: usize,
    pub traffic: TrafficConfig,
    pub placement: Placement,
    pub duration: SimTime,
    pub seed: u64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CellResult {
    pub ul_latencies: Vec<SimTime>,
    pub dl_latencies: Vec<SimTime>,
    pub still_queued_ul: usize,
    pub still_queued_dl: usize,
    pub outage_ues: usize,
    pub generated: usize,
    pub subframes: u64,
    pub events: u64,
}

impl CellResult {
    pub fn latencies(&self, direction: Direction) -> &[SimTime] {
        match direction {
            Direction::Dl => &self.dl_latencies,
            Direction::Ul => &self.ul_latencies,
        }
    }

    pub fn still_queued(&self, direction: Direction) -> usize {
        match direction {
            Direction::Dl => self.still_queued_dl,
            Direction::Ul => self.still_queued_ul,
        }
    }

    pub fn mean_ul_latency_s(&self) -> Option<f64> {
        mean_s(&self.ul_latencies)
    }
}

fn mean_s(v: &[SimTime]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    let sum: u128 = v.iter().map(|t| u128::from(t.as_ps())).sum();
    Some(sum as f64 / v.len() as f64 / 1e12)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CellEvent {
    SubframeStart(u64),
    UlCtrl(u64),
    Arrival(usize),
}

struct Flow {
    ue: usize,
    direction: Direction,
    stream: ArrivalStream,
}

pub struct CellSim {
    cfg: CellConfig,
    ues: Vec<UeContext>,
    flows: Vec<Flow>,
    next_arrivals: BinaryHeap<Reverse<(SimTime, usize)>>,
    result: CellResult,
}

impl CellSim {
    pub fn new(cfg: CellConfig) -> Result<Self, ChannelError> {
        cfg.channel.validate()?;
        let mut distance_rng = RngStream::new(cfg.seed, "placement");
        let mut los_rng = RngStream::new(cfg.seed, "los");
        let mut shadow_rng = RngStream::new(cfg.seed, "shadowing");
        let mut traffic_rng = RngStream::new(cfg.seed, "traffic");

        let placed = traffic::place_users(
            cfg.users,
            &cfg.placement,
            &cfg.channel,
            &mut distance_rng,
            &mut los_rng,
        );
        let mut ues = Vec::with_capacity(cfg.users);
        for (id, (distance, regime)) in placed.into_iter().enumerate() {
            let shadowing = cfg.channel.draw_shadowing(regime, &mut shadow_rng);
            let link = cfg.channel.link(distance, regime, shadowing)?;
            ues.push(UeContext::new(id, link));
        }

        let mut flows = Vec::new();
        for ue in 0..cfg.users {
            for (direction, enabled) in [
                (Direction::Dl, cfg.traffic.dl_enabled),
                (Direction::Ul, cfg.traffic.ul_enabled),
            ] {
                let spec = FlowSpec {
                    packet_bytes: cfg.traffic.packet_bytes,
                    rate_bytes_per_s: cfg.traffic.rate_bytes_per_s,
                    direction,
                    start_time: SimTime::ZERO,
                    jitter_mode: cfg.traffic.jitter_mode,
                };
                // draw the phase even for disabled flows so enabling one
                // direction never reshuffles the other
                let stream = traffic::generate_arrivals(&spec, cfg.duration, &mut traffic_rng);
                if enabled {
                    flows.push(Flow { ue, direction, stream });
                }
            }
        }
        let next_arrivals = flows
            .iter()
            .enumerate()
            .filter_map(|(i, f)| f.stream.peek().map(|t| Reverse((t, i))))
            .collect();

        let outage_ues = ues
            .iter()
            .filter(|u| cfg.channel.select_mcs(u.link.sinr_db).is_outage())
            .count();
        Ok(CellSim {
            cfg,
            ues,
            flows,
            next_arrivals,
            result: CellResult {
                outage_ues,
                ..CellResult::default()
            },
        })
    }

    pub fn ues(&self) -> &[UeContext] {
        &self.ues
    }

    /// First arrival instant of a UE's flow, if it has one before the end.
    pub fn first_arrival(&self, ue: usize, direction: Direction) -> Option<SimTime> {
        self.flows
            .iter()
            .find(|f| f.ue == ue && f.direction == direction)
            .and_then(|f| f.stream.peek())
    }

    pub fn run(mut self) -> CellResult {
        let mut sched = Scheduler::new();
        let frame = self.cfg.frame;
        self.feed_arrivals(&mut sched, frame.subframe_start(1));
        sched.schedule(SimTime::ZERO, CellEvent::SubframeStart(0));
        sched.run_until(self.cfg.duration, &mut self);
        self.result.still_queued_dl = self.ues.iter().map(|u| u.dl_queue.len()).sum();
        self.result.still_queued_ul = self.ues.iter().map(|u| u.ul_queue.len()).sum();
        self.result.events = sched.dispatched();
        self.result
    }

    /// Inserts arrival events strictly before `until`. Called one subframe
    /// ahead of each boundary so that an arrival coinciding with a boundary
    /// always has the smaller sequence number.
    fn feed_arrivals(&mut self, sched: &mut Scheduler<CellEvent>, until: SimTime) {
        while let Some(&Reverse((t, flow))) = self.next_arrivals.peek() {
            if t >= until {
                break;
            }
            self.next_arrivals.pop();
            sched.schedule(t, CellEvent::Arrival(flow));
            let stream = &mut self.flows[flow].stream;
            stream.next();
            if let Some(next) = stream.peek() {
                self.next_arrivals.push(Reverse((next, flow)));
            }
        }
    }

    fn on_subframe(&mut self, n: u64, sched: &mut Scheduler<CellEvent>) {
        let frame = self.cfg.frame;
        let outcome = schedule_subframe(&mut self.ues, &frame, &self.cfg.channel, &self.cfg.mac, n);
        if cfg!(debug_assertions) {
            if let Err(v) = validate_plan(&outcome.plan, &frame, self.cfg.mac.max_allocations(&frame)) {
                panic!("invalid plan in subframe {n}: {v}");
            }
        }
        for p in &outcome.delivered {
            let latency = p.latency().expect("delivered packets carry a delivery time");
            match p.direction {
                Direction::Dl => self.result.dl_latencies.push(latency),
                Direction::Ul => self.result.ul_latencies.push(latency),
            }
        }
        self.result.subframes += 1;

        sched.schedule(frame.ul_ctrl_start(n), CellEvent::UlCtrl(n));
        let next = frame.subframe_start(n + 1);
        if next < self.cfg.duration {
            self.feed_arrivals(sched, frame.subframe_start(n + 2));
            sched.schedule(next, CellEvent::SubframeStart(n + 1));
        }
    }
}

impl Model<CellEvent> for CellSim {
    fn handle(&mut self, event: Event<CellEvent>, sched: &mut Scheduler<CellEvent>) {
        match event.kind {
            CellEvent::Arrival(flow) => {
                let f = &self.flows[flow];
                let ue = &mut self.ues[f.ue];
                let pkt = Packet::new(
                    flow_id(ue.ue_id, f.direction),
                    f.direction,
                    self.cfg.traffic.packet_bytes,
                    event.fire_time,
                );
                on_packet_arrival(pkt, ue, &self.cfg.frame);
                self.result.generated += 1;
            }
            CellEvent::SubframeStart(n) => self.on_subframe(n, sched),
            CellEvent::UlCtrl(n) => {
                for ue in &mut self.ues {
                    on_ul_ctrl(ue, &self.cfg.frame, n);
                }
            }
        }
    }
}
