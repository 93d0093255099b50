use std::collections::HashSet;

use thiserror::Error;

use crate::frame::{FramePattern, TtiMode};
use crate::Direction;

/// One contiguous symbol range granted to one UE in one direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Allocation {
    pub ue_id: usize,
    pub direction: Direction,
    pub start_symbol: usize,
    pub n_symbols: usize,
    pub mcs_index: usize,
    pub payload_bytes: u64,
    pub n_packets: usize,
}

impl Allocation {
    pub fn end_symbol(&self) -> usize {
        self.start_symbol + self.n_symbols
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SubframePlan {
    pub subframe_index: u64,
    /// In FCFS service order.
    pub allocations: Vec<Allocation>,
    pub guard_symbols: usize,
    /// Position of the DL-to-UL guard, directly before the first UL symbol.
    pub guard_symbol: Option<usize>,
}

impl SubframePlan {
    pub fn empty(subframe_index: u64) -> Self {
        SubframePlan {
            subframe_index,
            ..SubframePlan::default()
        }
    }

    pub fn used_symbols(&self) -> usize {
        self.allocations.iter().map(|a| a.n_symbols).sum::<usize>() + self.guard_symbols
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlanViolation {
    #[error("allocation for UE {0} has {1} symbols")]
    BadLength(usize, usize),
    #[error("allocation for UE {0} leaves the data region")]
    OutsideDataRegion(usize),
    #[error("allocations for UEs {0} and {1} overlap")]
    Overlap(usize, usize),
    #[error("UE {0} holds more than one allocation")]
    DuplicateUe(usize),
    #[error("DL allocation for UE {0} follows a UL symbol")]
    DlAfterUl(usize),
    #[error("fixed-TTI allocation for UE {0} is not a multiple of the quantum")]
    NotQuantum(usize),
    #[error("guard accounting wrong: {0}")]
    Guard(&'static str),
    #[error("{0} allocations exceed the DCI capacity {1}")]
    TooManyDcis(usize, usize),
    #[error("allocation for UE {0} carries no packets")]
    Empty(usize),
}

/// Checks every structural rule a subframe plan must satisfy.
pub fn validate_plan(
    plan: &SubframePlan,
    frame: &FramePattern,
    max_allocations: Option<usize>,
) -> Result<(), PlanViolation> {
    let region = frame.data_region();
    let mut seen = HashSet::new();
    for a in &plan.allocations {
        if a.n_symbols == 0 || a.n_symbols > frame.n_data() {
            return Err(PlanViolation::BadLength(a.ue_id, a.n_symbols));
        }
        if a.start_symbol < region.start || a.end_symbol() > region.end {
            return Err(PlanViolation::OutsideDataRegion(a.ue_id));
        }
        if let TtiMode::Fixed { quantum } = frame.tti_mode() {
            if a.n_symbols % quantum != 0 {
                return Err(PlanViolation::NotQuantum(a.ue_id));
            }
        }
        if a.n_packets == 0 {
            return Err(PlanViolation::Empty(a.ue_id));
        }
        if !seen.insert(a.ue_id) {
            return Err(PlanViolation::DuplicateUe(a.ue_id));
        }
    }
    for (i, a) in plan.allocations.iter().enumerate() {
        for b in &plan.allocations[i + 1..] {
            if a.start_symbol < b.end_symbol() && b.start_symbol < a.end_symbol() {
                return Err(PlanViolation::Overlap(a.ue_id, b.ue_id));
            }
        }
    }
    let first_ul = plan
        .allocations
        .iter()
        .filter(|a| a.direction == Direction::Ul)
        .map(|a| a.start_symbol)
        .min();
    let last_dl_end = plan
        .allocations
        .iter()
        .filter(|a| a.direction == Direction::Dl)
        .map(|a| a.end_symbol())
        .max();
    if let (Some(ul), Some(dl_end)) = (first_ul, last_dl_end) {
        if let Some(a) = plan
            .allocations
            .iter()
            .find(|a| a.direction == Direction::Dl && a.end_symbol() > ul)
        {
            return Err(PlanViolation::DlAfterUl(a.ue_id));
        }
        if plan.guard_symbols != 1 {
            return Err(PlanViolation::Guard("mixed plan needs exactly one guard"));
        }
        match plan.guard_symbol {
            Some(g) if g >= dl_end && g < ul => {}
            _ => return Err(PlanViolation::Guard("guard not between DL and UL")),
        }
    } else if plan.guard_symbols != 0 || plan.guard_symbol.is_some() {
        return Err(PlanViolation::Guard("single-direction plan has a guard"));
    }
    if plan.used_symbols() > frame.n_data() {
        return Err(PlanViolation::Guard("data plus guard exceed the data region"));
    }
    if let Some(cap) = max_allocations {
        if plan.allocations.len() > cap {
            return Err(PlanViolation::TooManyDcis(plan.allocations.len(), cap));
        }
    }
    Ok(())
}
