//! Exhaustive search for the FCFS packing of small instances, plus random
//! instance generation.

use mmwave_sim::channel::{ChannelParams, LinkState, Regime};
use mmwave_sim::frame::{FramePattern, TtiMode};
use mmwave_sim::mac::{flow_id, MacConfig, Packet, UeContext};
use mmwave_sim::sim::SimTime;
use mmwave_sim::Direction;
use rand::seq::IndexedRandom;
use rand::Rng;

pub const SINRS: [f64; 9] = [-10.0, -5.0, -2.0, 3.0, 6.0, 10.0, 14.0, 18.0, 25.0];

pub struct Instance {
    pub frame: FramePattern,
    pub mac: MacConfig,
    pub ues: Vec<UeContext>,
    pub subframe: u64,
}

/// Random UEs with random queues, grants and arrival times around the
/// start of subframe `subframe`.
pub fn random_instance<R: Rng>(rng: &mut R, frame: FramePattern, max_ues: usize, max_queue: usize) -> Instance {
    let subframe = rng.random_range(2..50u64);
    let start = frame.subframe_start(subframe).as_ps();
    let span = frame.subframe().as_ps();
    let n_ues = rng.random_range(1..=max_ues);
    let mut ues = Vec::new();
    for id in 0..n_ues {
        let link = LinkState { distance_m: 50.0, regime: Regime::Los, shadowing_db: 0.0, sinr_db: *SINRS.choose(rng).unwrap() };
        let mut ue = UeContext::new(id, link);
        for dir in [Direction::Dl, Direction::Ul] {
            let n = rng.random_range(0..=max_queue);
            let mut times: Vec<u64> = (0..n)
                .map(|_| rng.random_range(start.saturating_sub(3 * span)..start + span / 2))
                .collect();
            times.sort();
            for t in times {
                let size = *[40u32, 100, 100, 300, 800, 1500].choose(rng).unwrap();
                ue.queue_mut(dir).push_back(Packet::new(flow_id(id, dir), dir, size, SimTime::from_ps(t)));
            }
        }
        if !ue.ul_queue.is_empty() {
            ue.granted_packets = rng.random_range(0..=ue.ul_queue.len());
            ue.granted_bytes_ul = ue.ul_queue.iter().take(ue.granted_packets).map(|p| p.size_bytes as u64).sum();
            ue.grant_from = rng.random_range(subframe - 1..=subframe + 1);
        }
        ues.push(ue);
    }
    let mac = MacConfig { max_dcis_per_symbol: *[0usize, 0, 1, 2].choose(rng).unwrap(), ..MacConfig::default() };
    Instance { frame, mac, ues, subframe }
}

pub fn random_mode<R: Rng>(rng: &mut R) -> TtiMode {
    match rng.random_range(0..4) {
        0 => TtiMode::Fixed { quantum: 2 },
        1 => TtiMode::Fixed { quantum: 3 },
        2 => TtiMode::Fixed { quantum: 6 },
        _ => TtiMode::Variable,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Expected {
    pub ue_id: usize,
    pub direction: Direction,
    pub start_symbol: usize,
    pub n_symbols: usize,
    pub n_packets: usize,
}

struct Cand {
    ue: usize,
    dir: Direction,
    /// symbols needed for the first k packets, k = 0..=eligible
    need: Vec<usize>,
}

/// Enumerates every assignment of packet counts to candidates and keeps
/// the lexicographically largest feasible one in FCFS order, then lays it
/// out (DL from the left edge, UL from the right edge, in service order).
pub fn brute_force(inst: &Instance, channel: &ChannelParams) -> (Vec<Expected>, Option<usize>) {
    let f = &inst.frame;
    let start = f.subframe_start(inst.subframe);
    let mut keyed = Vec::new();
    for (i, ue) in inst.ues.iter().enumerate() {
        let mcs = channel.select_mcs(ue.link.sinr_db);
        let Ok(bps) = channel.bits_per_symbol(mcs, f) else { continue };
        let mut per_dir = Vec::new();
        let dl: Vec<&Packet> = ue.dl_queue.iter().filter(|p| p.arrival_time <= start).collect();
        // DL packets are FIFO, so the eligible ones form a prefix
        assert!(ue.dl_queue.iter().take(dl.len()).all(|p| p.arrival_time <= start));
        per_dir.push((Direction::Dl, dl));
        if ue.grant_from <= inst.subframe {
            per_dir.push((Direction::Ul, ue.ul_queue.iter().take(ue.granted_packets).collect()));
        }
        for (dir, pkts) in per_dir {
            if pkts.is_empty() {
                continue;
            }
            let mut need = vec![0];
            let mut bits = 0u64;
            for p in &pkts {
                bits += p.size_bytes as u64 * 8;
                let raw = bits.div_ceil(bps) as usize;
                need.push(match f.tti_mode() {
                    TtiMode::Variable => raw,
                    TtiMode::Fixed { quantum } => raw.div_ceil(quantum) * quantum,
                });
            }
            keyed.push(((pkts[0].arrival_time, flow_id(ue.ue_id, dir)), Cand { ue: i, dir, need }));
        }
    }
    keyed.sort_by_key(|(k, _)| *k);
    let cands: Vec<Cand> = keyed.into_iter().map(|(_, c)| c).collect();
    let cap = inst.mac.max_allocations(f);

    let mut best: Option<Vec<usize>> = None;
    let mut ks = vec![0usize; cands.len()];
    loop {
        if feasible(&cands, &ks, f.n_data(), cap) && best.as_ref().is_none_or(|b| ks > *b) {
            best = Some(ks.clone());
        }
        // odometer over k_i in 0..=eligible_i
        let mut i = 0;
        while i < ks.len() {
            if ks[i] + 1 < cands[i].need.len() {
                ks[i] += 1;
                break;
            }
            ks[i] = 0;
            i += 1;
        }
        if i == ks.len() {
            break;
        }
    }
    let ks = best.unwrap_or_default();

    let region = f.data_region();
    let (mut dl, mut ul) = (region.start, region.end);
    let mut out = Vec::new();
    for (c, &k) in cands.iter().zip(&ks) {
        if k == 0 {
            continue;
        }
        let n = c.need[k];
        let start_symbol = match c.dir {
            Direction::Dl => {
                dl += n;
                dl - n
            }
            Direction::Ul => {
                ul -= n;
                ul
            }
        };
        out.push(Expected { ue_id: inst.ues[c.ue].ue_id, direction: c.dir, start_symbol, n_symbols: n, n_packets: k });
    }
    let mixed = out.iter().any(|e| e.direction == Direction::Dl) && out.iter().any(|e| e.direction == Direction::Ul);
    (out, mixed.then(|| ul - 1))
}

fn feasible(cands: &[Cand], ks: &[usize], n_data: usize, cap: Option<usize>) -> bool {
    let mut used = 0;
    let (mut dl, mut ul) = (false, false);
    let mut ues = Vec::new();
    for (c, &k) in cands.iter().zip(ks) {
        if k == 0 {
            continue;
        }
        if ues.contains(&c.ue) {
            return false;
        }
        ues.push(c.ue);
        used += c.need[k];
        match c.dir {
            Direction::Dl => dl = true,
            Direction::Ul => ul = true,
        }
    }
    if cap.is_some_and(|cap| ues.len() > cap) {
        return false;
    }
    used + usize::from(dl && ul) <= n_data
}

/// Compares the scheduler against [`brute_force`] on `cases` random
/// instances with at most 3 UEs and 12 data symbols. Returns how many
/// instances had a non-empty plan.
pub fn check_against_brute_force(seed: u64, cases: usize) -> Result<usize, String> {
    use mmwave_sim::mac::schedule_subframe;
    use rand::SeedableRng;

    let channel = ChannelParams::default();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut nonempty = 0;
    for case in 0..cases {
        let n_symbols = rng.random_range(4..=14);
        let frame = FramePattern::new(SimTime::from_us(50), n_symbols, 1, 1, random_mode(&mut rng)).unwrap();
        let inst = random_instance(&mut rng, frame, 3, 3);
        let (expect, guard) = brute_force(&inst, &channel);
        let mut ues = inst.ues.clone();
        let out = schedule_subframe(&mut ues, &inst.frame, &channel, &inst.mac, inst.subframe);
        let got: Vec<_> = out
            .plan
            .allocations
            .iter()
            .map(|a| Expected {
                ue_id: a.ue_id,
                direction: a.direction,
                start_symbol: a.start_symbol,
                n_symbols: a.n_symbols,
                n_packets: a.n_packets,
            })
            .collect();
        if got != expect || out.plan.guard_symbol != guard {
            return Err(format!("case {case}: scheduler {got:?} guard {:?}, search {expect:?} guard {guard:?}", out.plan.guard_symbol));
        }
        nonempty += usize::from(!expect.is_empty());
    }
    Ok(nonempty)
}

/// Random subframes on the standard frames: every plan must pass
/// `validate_plan`, slots must be sized exactly to their payload, and
/// delivery times must fall inside the subframe.
pub fn check_random_plans(seed: u64, cases: usize) -> Result<(), String> {
    use mmwave_sim::frame::SymbolRef;
    use mmwave_sim::mac::{schedule_subframe, validate_plan};
    use rand::SeedableRng;

    let channel = ChannelParams::default();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for case in 0..cases {
        let us = [200, 100, 50][rng.random_range(0..3)];
        let frame = FramePattern::standard(us, random_mode(&mut rng)).unwrap();
        let inst = random_instance(&mut rng, frame, 30, 6);
        let mut ues = inst.ues.clone();
        let out = schedule_subframe(&mut ues, &frame, &channel, &inst.mac, inst.subframe);
        validate_plan(&out.plan, &frame, inst.mac.max_allocations(&frame)).map_err(|v| format!("case {case}: {v}"))?;
        let carried: usize = out.plan.allocations.iter().map(|a| a.n_packets).sum();
        if carried != out.delivered.len() {
            return Err(format!("case {case}: {carried} packets planned, {} delivered", out.delivered.len()));
        }
        for a in &out.plan.allocations {
            let ue = &inst.ues[a.ue_id];
            let bps = channel.bits_per_symbol(channel.select_mcs(ue.link.sinr_db), &frame).unwrap();
            let raw = (a.payload_bytes * 8).div_ceil(bps) as usize;
            if a.n_symbols != frame.tti_mode().round_symbols(raw) {
                return Err(format!("case {case}: UE {} slot of {} symbols for {raw} needed", a.ue_id, a.n_symbols));
            }
        }
        let start = frame.subframe_start(inst.subframe);
        let ul_end = frame.start_time(SymbolRef { subframe_index: inst.subframe, symbol_index: frame.data_region().end });
        for p in &out.delivered {
            let d = p.delivery_time.unwrap();
            let inside = d > start && d <= frame.subframe_start(inst.subframe + 1);
            if !inside || (p.direction == Direction::Ul && d != ul_end) {
                return Err(format!("case {case}: delivery at {d} outside its slot"));
            }
        }
    }
    Ok(())
}
