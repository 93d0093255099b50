//! Per-subframe FCFS TDMA scheduling with variable or fixed TTI.
//!
//! Control timing: a scheduling request (SR) rides the UL-CTRL of the
//! subframe it is raised in (or the next one if UL-CTRL has already
//! started); the grant appears in the DL-CTRL of the following subframe and
//! the UL slot is placed in that same subframe.

mod cell;
mod plan;
mod scheduler;

use std::collections::VecDeque;

use crate::channel::LinkState;
use crate::frame::FramePattern;
use crate::sim::SimTime;
use crate::Direction;

pub use cell::{CellConfig, CellResult, CellSim, TrafficConfig};
pub use plan::{validate_plan, Allocation, PlanViolation, SubframePlan};
pub use scheduler::{schedule_subframe, SubframeOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Packet {
    pub flow_id: u32,
    pub direction: Direction,
    pub size_bytes: u32,
    pub arrival_time: SimTime,
    pub delivery_time: Option<SimTime>,
}

impl Packet {
    pub fn new(flow_id: u32, direction: Direction, size_bytes: u32, arrival_time: SimTime) -> Self {
        Packet {
            flow_id,
            direction,
            size_bytes,
            arrival_time,
            delivery_time: None,
        }
    }

    pub fn latency(&self) -> Option<SimTime> {
        self.delivery_time.map(|d| d - self.arrival_time)
    }
}

/// When a UL transport block counts as delivered to the BS PDCP.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UlDelivery {
    /// At the end of the UL data region, i.e. when UL-CTRL begins.
    #[default]
    RegionEnd,
    /// At the end of the UE's own slot.
    SlotEnd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MacConfig {
    /// DCIs per DL-CTRL symbol; 0 means unlimited.
    pub max_dcis_per_symbol: usize,
    pub ul_delivery: UlDelivery,
}

impl MacConfig {
    pub fn max_allocations(&self, frame: &FramePattern) -> Option<usize> {
        (self.max_dcis_per_symbol > 0).then(|| self.max_dcis_per_symbol * frame.n_dl_ctrl())
    }
}

/// Flow ids are derived from the UE id so FCFS ties break the same way in
/// every run.
pub fn flow_id(ue_id: usize, direction: Direction) -> u32 {
    (ue_id as u32) * 2
        + match direction {
            Direction::Dl => 0,
            Direction::Ul => 1,
        }
}

#[derive(Debug, Clone)]
pub struct UeContext {
    pub ue_id: usize,
    pub link: LinkState,
    pub dl_queue: VecDeque<Packet>,
    pub ul_queue: VecDeque<Packet>,
    pub sr_pending: bool,
    /// Subframe whose UL-CTRL carries the pending SR.
    pub sr_subframe: u64,
    /// Head-of-queue UL packets covered by the outstanding grant.
    pub granted_packets: usize,
    pub granted_bytes_ul: u64,
    /// First subframe in which the grant may be used.
    pub grant_from: u64,
}

impl UeContext {
    pub fn new(ue_id: usize, link: LinkState) -> Self {
        UeContext {
            ue_id,
            link,
            dl_queue: VecDeque::new(),
            ul_queue: VecDeque::new(),
            sr_pending: false,
            sr_subframe: 0,
            granted_packets: 0,
            granted_bytes_ul: 0,
            grant_from: 0,
        }
    }

    pub fn queue(&self, direction: Direction) -> &VecDeque<Packet> {
        match direction {
            Direction::Dl => &self.dl_queue,
            Direction::Ul => &self.ul_queue,
        }
    }

    pub fn queue_mut(&mut self, direction: Direction) -> &mut VecDeque<Packet> {
        match direction {
            Direction::Dl => &mut self.dl_queue,
            Direction::Ul => &mut self.ul_queue,
        }
    }

    pub fn queued(&self) -> usize {
        self.dl_queue.len() + self.ul_queue.len()
    }
}

/// Enqueues an arriving packet. For UL packets with neither an SR nor a
/// grant outstanding, raises an SR and returns the subframe whose UL-CTRL
/// will carry it.
pub fn on_packet_arrival(pkt: Packet, ue: &mut UeContext, frame: &FramePattern) -> Option<u64> {
    let queue = ue.queue_mut(pkt.direction);
    debug_assert!(
        queue
            .back()
            .is_none_or(|last| (last.arrival_time, last.flow_id) <= (pkt.arrival_time, pkt.flow_id)),
        "queue must stay FIFO by arrival"
    );
    queue.push_back(pkt);
    if pkt.direction == Direction::Ul && !ue.sr_pending && ue.granted_packets == 0 {
        ue.sr_pending = true;
        ue.sr_subframe = frame.sr_subframe(pkt.arrival_time);
        return Some(ue.sr_subframe);
    }
    None
}

/// Processes the UL-CTRL of `subframe_index`: a pending SR due in this
/// UL-CTRL becomes a grant, usable from the next subframe, for every UL
/// packet that arrived before UL-CTRL started.
pub fn on_ul_ctrl(ue: &mut UeContext, frame: &FramePattern, subframe_index: u64) -> bool {
    if !ue.sr_pending || ue.sr_subframe > subframe_index {
        return false;
    }
    let cutoff = frame.ul_ctrl_start(subframe_index);
    let covered: Vec<&Packet> = ue
        .ul_queue
        .iter()
        .skip(ue.granted_packets)
        .take_while(|p| p.arrival_time < cutoff)
        .collect();
    debug_assert!(!covered.is_empty(), "SR raised without a queued packet");
    ue.granted_bytes_ul += covered.iter().map(|p| u64::from(p.size_bytes)).sum::<u64>();
    ue.granted_packets += covered.len();
    ue.grant_from = subframe_index + 1;
    ue.sr_pending = false;
    true
}

/// Closed-form single-UE UL latency for one packet arriving at
/// `arrival_time` into an idle cell: SR in the next UL-CTRL, grant in the
/// following subframe, data in the last data symbol(s) before UL-CTRL.
pub fn uplink_latency_oracle(frame: &FramePattern, arrival_time: SimTime) -> SimTime {
    let sr = frame.sr_subframe(arrival_time);
    frame.ul_ctrl_start(sr + 1) - arrival_time
}
