use crate::channel::ChannelParams;
use crate::frame::{FramePattern, SymbolRef};
use crate::Direction;

use super::{flow_id, Allocation, MacConfig, Packet, SubframePlan, UeContext, UlDelivery};

#[derive(Debug, Clone, Default)]
pub struct SubframeOutcome {
    pub plan: SubframePlan,
    /// Packets carried by this subframe, with `delivery_time` set.
    pub delivered: Vec<Packet>,
    /// UEs whose current MCS is outage; they were not considered.
    pub outage_ues: usize,
}

struct Candidate {
    ue: usize,
    direction: Direction,
    head: (crate::sim::SimTime, u32),
    eligible: usize,
    bits_per_symbol: u64,
    mcs_index: usize,
}

/// Builds and executes the plan for the subframe starting now.
///
/// DL heads that arrived at or before the subframe start and UL packets
/// under a grant usable in this subframe compete in global FCFS order of
/// their head packet. Each served UE gets one slot sized to its queued
/// payload (rounded up to the TTI quantum in fixed mode); when the whole
/// queue does not fit, as many whole packets as fit are sent. A UE for which
/// not even one packet fits is passed over and keeps its place.
pub fn schedule_subframe(
    ues: &mut [UeContext],
    frame: &FramePattern,
    channel: &ChannelParams,
    cfg: &MacConfig,
    subframe_index: u64,
) -> SubframeOutcome {
    let start = frame.subframe_start(subframe_index);
    let mut outcome = SubframeOutcome {
        plan: SubframePlan::empty(subframe_index),
        ..SubframeOutcome::default()
    };

    let mut candidates = Vec::new();
    for (idx, ue) in ues.iter().enumerate() {
        let mcs = channel.select_mcs(ue.link.sinr_db);
        if mcs.is_outage() {
            outcome.outage_ues += 1;
            continue;
        }
        let bits_per_symbol = channel
            .bits_per_symbol(mcs, frame)
            .expect("non-outage MCS has capacity");
        let dl_eligible = ue
            .dl_queue
            .iter()
            .take_while(|p| p.arrival_time <= start)
            .count();
        if dl_eligible > 0 {
            let head = ue.dl_queue[0];
            candidates.push(Candidate {
                ue: idx,
                direction: Direction::Dl,
                head: (head.arrival_time, head.flow_id),
                eligible: dl_eligible,
                bits_per_symbol,
                mcs_index: mcs.index,
            });
        }
        if ue.granted_packets > 0 && ue.grant_from <= subframe_index {
            let head = ue.ul_queue[0];
            candidates.push(Candidate {
                ue: idx,
                direction: Direction::Ul,
                head: (head.arrival_time, head.flow_id),
                eligible: ue.granted_packets,
                bits_per_symbol,
                mcs_index: mcs.index,
            });
        }
    }
    candidates.sort_by_key(|c| (c.head, flow_id(ues[c.ue].ue_id, c.direction)));

    let n_data = frame.n_data();
    let mode = frame.tti_mode();
    let cap = cfg.max_allocations(frame);
    let mut used = 0usize;
    let (mut has_dl, mut has_ul) = (false, false);
    let mut served = vec![false; ues.len()];
    // index into `ues` for each allocation, in service order
    let mut owners = Vec::new();

    for c in &candidates {
        if served[c.ue] {
            continue;
        }
        if cap.is_some_and(|cap| owners.len() >= cap) {
            break;
        }
        let mixed = (has_dl || c.direction == Direction::Dl) && (has_ul || c.direction == Direction::Ul);
        let Some(avail) = n_data.checked_sub(used + usize::from(mixed)) else {
            continue;
        };
        let queue = ues[c.ue].queue(c.direction);
        let (mut n_packets, mut symbols, mut bytes) = (0usize, 0usize, 0u64);
        let mut bits = 0u64;
        for p in queue.iter().take(c.eligible) {
            bits += u64::from(p.size_bytes) * 8;
            let need = mode.round_symbols(bits.div_ceil(c.bits_per_symbol) as usize);
            if need > avail {
                break;
            }
            n_packets += 1;
            symbols = need;
            bytes += u64::from(p.size_bytes);
        }
        if n_packets == 0 {
            continue;
        }
        served[c.ue] = true;
        used += symbols;
        match c.direction {
            Direction::Dl => has_dl = true,
            Direction::Ul => has_ul = true,
        }
        owners.push(c.ue);
        outcome.plan.allocations.push(Allocation {
            ue_id: ues[c.ue].ue_id,
            direction: c.direction,
            start_symbol: 0,
            n_symbols: symbols,
            mcs_index: c.mcs_index,
            payload_bytes: bytes,
            n_packets,
        });
    }

    // layout: DL from the left edge, UL against UL-CTRL, both in service order
    let region = frame.data_region();
    let (mut dl_cursor, mut ul_cursor) = (region.start, region.end);
    for a in outcome.plan.allocations.iter_mut() {
        match a.direction {
            Direction::Dl => {
                a.start_symbol = dl_cursor;
                dl_cursor += a.n_symbols;
            }
            Direction::Ul => {
                ul_cursor -= a.n_symbols;
                a.start_symbol = ul_cursor;
            }
        }
    }
    if has_dl && has_ul {
        outcome.plan.guard_symbols = 1;
        outcome.plan.guard_symbol = Some(ul_cursor - 1);
    }

    let ul_region_end = frame.start_time(SymbolRef {
        subframe_index,
        symbol_index: region.end,
    });
    for (a, &owner) in outcome.plan.allocations.iter().zip(&owners) {
        let last = SymbolRef {
            subframe_index,
            symbol_index: a.end_symbol() - 1,
        };
        let delivery = match (a.direction, cfg.ul_delivery) {
            (Direction::Ul, UlDelivery::RegionEnd) => ul_region_end,
            _ => frame.end_time(last),
        };
        let ue = &mut ues[owner];
        for mut p in ue.queue_mut(a.direction).drain(..a.n_packets) {
            p.delivery_time = Some(delivery);
            outcome.delivered.push(p);
        }
        if a.direction == Direction::Ul {
            ue.granted_packets -= a.n_packets;
            ue.granted_bytes_ul -= a.payload_bytes;
            if ue.granted_packets == 0 && !ue.ul_queue.is_empty() && !ue.sr_pending {
                // grant exhausted with data left behind: SR in this subframe's UL-CTRL
                ue.sr_pending = true;
                ue.sr_subframe = subframe_index;
            }
        }
    }
    outcome
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{LinkState, Regime};
    use crate::frame::TtiMode;
    use crate::mac::validate_plan;
    use crate::sim::SimTime;

    // SINR picks for the default table: 3 dB -> eff 1.0 (3875 bits/symbol at
    // 100 us), -5 dB -> eff 0.2 (775), -10 dB -> outage
    fn ue(id: usize, sinr_db: f64) -> UeContext {
        let link = LinkState { distance_m: 50.0, regime: Regime::Los, shadowing_db: 0.0, sinr_db };
        UeContext::new(id, link)
    }

    fn add(u: &mut UeContext, dir: Direction, n: usize, arrival_us: u64) {
        for _ in 0..n {
            let p = Packet::new(flow_id(u.ue_id, dir), dir, 100, SimTime::from_us(arrival_us));
            u.queue_mut(dir).push_back(p);
        }
        if dir == Direction::Ul {
            u.granted_packets += n;
            u.granted_bytes_ul += 100 * n as u64;
        }
    }

    fn run(ues: &mut [UeContext], mode: TtiMode, cfg: MacConfig) -> SubframeOutcome {
        let f = FramePattern::standard(100, mode).unwrap();
        let out = schedule_subframe(ues, &f, &ChannelParams::default(), &cfg, 1);
        validate_plan(&out.plan, &f, cfg.max_allocations(&f)).unwrap();
        out
    }

    fn summary(out: &SubframeOutcome) -> Vec<(usize, Direction, usize, usize)> {
        out.plan
            .allocations
            .iter()
            .map(|a| (a.ue_id, a.direction, a.start_symbol, a.n_symbols))
            .collect()
    }

    #[test]
    fn nothing_queued_gives_empty_plan() {
        let mut ues = vec![ue(0, 3.0), ue(1, 3.0)];
        let out = run(&mut ues, TtiMode::Variable, MacConfig::default());
        assert!(out.plan.allocations.is_empty());
        assert_eq!(out.plan.guard_symbols, 0);
    }

    #[test]
    fn single_dl_packet_variable_and_fixed() {
        let mut ues = vec![ue(0, 3.0)];
        add(&mut ues[0], Direction::Dl, 1, 50);
        let out = run(&mut ues, TtiMode::Variable, MacConfig::default());
        assert_eq!(summary(&out), [(0, Direction::Dl, 1, 1)]);
        let f = FramePattern::standard(100, TtiMode::Variable).unwrap();
        assert_eq!(out.delivered[0].delivery_time, Some(f.end_time(SymbolRef { subframe_index: 1, symbol_index: 1 })));

        let mut ues = vec![ue(0, 3.0)];
        add(&mut ues[0], Direction::Dl, 1, 50);
        let out = run(&mut ues, TtiMode::Fixed { quantum: 6 }, MacConfig::default());
        assert_eq!(summary(&out), [(0, Direction::Dl, 1, 6)]);
    }

    #[test]
    fn dl_arriving_after_subframe_start_waits() {
        let mut ues = vec![ue(0, 3.0)];
        add(&mut ues[0], Direction::Dl, 1, 101);
        let out = run(&mut ues, TtiMode::Variable, MacConfig::default());
        assert!(out.plan.allocations.is_empty());
        assert_eq!(ues[0].dl_queue.len(), 1);
    }

    #[test]
    fn two_uplink_ues_share_the_region_whole_packets_only() {
        let mut ues = vec![ue(0, 3.0), ue(1, 3.0)];
        // 58 packets = 46400 bits -> 12 symbols each
        add(&mut ues[0], Direction::Ul, 58, 10);
        add(&mut ues[1], Direction::Ul, 58, 20);
        let out = run(&mut ues, TtiMode::Variable, MacConfig::default());
        // first served sits against UL-CTRL; the second gets the 10 left
        assert_eq!(summary(&out), [(0, Direction::Ul, 11, 12), (1, Direction::Ul, 1, 10)]);
        assert_eq!(out.plan.allocations[1].n_packets, 48);
        assert_eq!(ues[1].granted_packets, 10);
        // grant exhausted for ue 0 only
        assert!(!ues[0].sr_pending && ues[0].ul_queue.is_empty());
        assert!(!ues[1].sr_pending);
    }

    #[test]
    fn fcfs_by_head_arrival_then_flow_id() {
        let mut ues = vec![ue(0, 3.0), ue(1, 3.0), ue(2, 3.0)];
        add(&mut ues[0], Direction::Dl, 1, 30);
        add(&mut ues[1], Direction::Dl, 1, 10);
        add(&mut ues[2], Direction::Dl, 1, 30);
        let out = run(&mut ues, TtiMode::Variable, MacConfig::default());
        let order: Vec<_> = out.plan.allocations.iter().map(|a| a.ue_id).collect();
        assert_eq!(order, [1, 0, 2]);
        assert_eq!(summary(&out)[0].2, 1);
    }

    #[test]
    fn one_allocation_per_ue_dl_before_ul_on_tie() {
        let mut ues = vec![ue(0, 3.0)];
        add(&mut ues[0], Direction::Dl, 2, 10);
        add(&mut ues[0], Direction::Ul, 2, 10);
        let out = run(&mut ues, TtiMode::Variable, MacConfig::default());
        assert_eq!(summary(&out), [(0, Direction::Dl, 1, 1)]);
        assert_eq!(ues[0].ul_queue.len(), 2);
    }

    #[test]
    fn guard_symbol_between_directions() {
        let mut ues = vec![ue(0, 3.0), ue(1, 3.0)];
        add(&mut ues[0], Direction::Dl, 1, 10);
        add(&mut ues[1], Direction::Ul, 1, 20);
        let out = run(&mut ues, TtiMode::Variable, MacConfig::default());
        assert_eq!(summary(&out), [(0, Direction::Dl, 1, 1), (1, Direction::Ul, 22, 1)]);
        assert_eq!(out.plan.guard_symbol, Some(21));
    }

    #[test]
    fn passes_over_what_cannot_fit() {
        let mut ues = vec![ue(0, 3.0), ue(1, -5.0), ue(2, 3.0)];
        // 101 packets -> 21 symbols, leaving 1
        add(&mut ues[0], Direction::Dl, 101, 10);
        // one packet at eff 0.2 needs 2 symbols plus a guard
        add(&mut ues[1], Direction::Ul, 1, 20);
        add(&mut ues[2], Direction::Dl, 1, 30);
        let out = run(&mut ues, TtiMode::Variable, MacConfig::default());
        assert_eq!(summary(&out), [(0, Direction::Dl, 1, 21), (2, Direction::Dl, 22, 1)]);
        assert_eq!(ues[1].granted_packets, 1);
    }

    #[test]
    fn outage_ue_is_skipped_and_counted() {
        let mut ues = vec![ue(0, -10.0), ue(1, 3.0)];
        add(&mut ues[0], Direction::Dl, 1, 10);
        add(&mut ues[1], Direction::Dl, 1, 20);
        let out = run(&mut ues, TtiMode::Variable, MacConfig::default());
        assert_eq!(out.outage_ues, 1);
        assert_eq!(summary(&out), [(1, Direction::Dl, 1, 1)]);
    }

    #[test]
    fn dci_cap_limits_allocations() {
        let mut ues: Vec<_> = (0..3).map(|i| ue(i, 3.0)).collect();
        for u in ues.iter_mut() {
            add(u, Direction::Dl, 1, 10);
        }
        let cfg = MacConfig { max_dcis_per_symbol: 2, ..MacConfig::default() };
        let out = run(&mut ues, TtiMode::Variable, cfg);
        assert_eq!(out.plan.allocations.len(), 2);
        assert_eq!(ues[2].dl_queue.len(), 1);
    }

    #[test]
    fn fixed_mode_rounds_to_quantum_and_fits_fewer() {
        let mut ues: Vec<_> = (0..5).map(|i| ue(i, 3.0)).collect();
        for u in ues.iter_mut() {
            add(u, Direction::Dl, 1, 10);
        }
        let out = run(&mut ues, TtiMode::Fixed { quantum: 6 }, MacConfig::default());
        // 22 data symbols hold three 6-symbol slots
        assert_eq!(out.plan.allocations.len(), 3);
        assert!(out.plan.allocations.iter().all(|a| a.n_symbols == 6));
    }

    #[test]
    fn slot_end_delivery_option() {
        let f = FramePattern::standard(100, TtiMode::Variable).unwrap();
        for (mode, expect_symbol) in [(UlDelivery::RegionEnd, 23), (UlDelivery::SlotEnd, 22)] {
            let mut ues = vec![ue(0, 3.0), ue(1, 3.0)];
            add(&mut ues[0], Direction::Ul, 1, 10);
            add(&mut ues[1], Direction::Ul, 1, 20);
            let cfg = MacConfig { ul_delivery: mode, ..MacConfig::default() };
            let out = run(&mut ues, TtiMode::Variable, cfg);
            let t = f.start_time(SymbolRef { subframe_index: 1, symbol_index: expect_symbol });
            assert_eq!(out.delivered[1].delivery_time, Some(t), "{mode:?}");
        }
    }
}
