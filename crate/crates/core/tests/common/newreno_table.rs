//! Reference NewReno written as an explicit transition table, kept apart
//! from the library so the two can be diffed step by step.

use mmwave_sim::transport::{AckInfo, CongestionState, Phase, TcpParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum P {
    Ss,
    Ca,
    Fr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ev {
    /// cumulative ack, snd_una, snd_nxt
    Ack(u64, u64, u64),
    /// flight, highest sent
    Timeout(u64, u64),
}

/// Event class after guards are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Class {
    NewAck,
    FullAck,
    PartialAck,
    Dup,
    ThirdDup,
    ThirdDupBlocked,
    Ignored,
    Timeout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    Grow,
    ToSsthresh,
    Deflate,
    CountDup,
    Halve,
    Inflate,
    Collapse,
    Nothing,
}

// (from, class, op, to); `None` as target means "SS or CA by window".
const TABLE: &[(P, Class, Op, Option<P>)] = &[
    (P::Ss, Class::NewAck, Op::Grow, None),
    (P::Ca, Class::NewAck, Op::Grow, None),
    (P::Fr, Class::FullAck, Op::ToSsthresh, Some(P::Ca)),
    (P::Fr, Class::PartialAck, Op::Deflate, Some(P::Fr)),
    (P::Ss, Class::Dup, Op::CountDup, Some(P::Ss)),
    (P::Ca, Class::Dup, Op::CountDup, Some(P::Ca)),
    (P::Ss, Class::ThirdDupBlocked, Op::CountDup, Some(P::Ss)),
    (P::Ca, Class::ThirdDupBlocked, Op::CountDup, Some(P::Ca)),
    (P::Ss, Class::ThirdDup, Op::Halve, Some(P::Fr)),
    (P::Ca, Class::ThirdDup, Op::Halve, Some(P::Fr)),
    (P::Fr, Class::Dup, Op::Inflate, Some(P::Fr)),
    (P::Ss, Class::Ignored, Op::Nothing, Some(P::Ss)),
    (P::Ca, Class::Ignored, Op::Nothing, Some(P::Ca)),
    (P::Fr, Class::Ignored, Op::Nothing, Some(P::Fr)),
    (P::Ss, Class::Timeout, Op::Collapse, Some(P::Ss)),
    (P::Ca, Class::Timeout, Op::Collapse, Some(P::Ss)),
    (P::Fr, Class::Timeout, Op::Collapse, Some(P::Ss)),
];

#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    pub phase: P,
    pub cwnd: u64,
    pub ssthresh: u64,
    pub dups: u32,
    pub recover: Option<u64>,
    pub rto_ps: u64,
    /// Times each table row fired.
    pub visits: Vec<usize>,
    mss: u64,
    max_rto_ps: u64,
}

impl Reference {
    pub fn new(p: &TcpParams) -> Self {
        Reference {
            phase: P::Ss,
            cwnd: p.initial_cwnd_mss * p.mss,
            ssthresh: u64::MAX,
            dups: 0,
            recover: None,
            rto_ps: p.initial_rto.as_ps(),
            visits: vec![0; TABLE.len()],
            mss: p.mss,
            max_rto_ps: p.max_rto.as_ps(),
        }
    }

    fn classify(&self, ev: Ev) -> Class {
        match ev {
            Ev::Timeout(..) => Class::Timeout,
            Ev::Ack(ack, una, nxt) => {
                if ack > una {
                    match (self.phase, self.recover) {
                        (P::Fr, Some(r)) if ack >= r => Class::FullAck,
                        (P::Fr, _) => Class::PartialAck,
                        _ => Class::NewAck,
                    }
                } else if ack == una && nxt > una {
                    if self.phase == P::Fr {
                        Class::Dup
                    } else if self.dups + 1 == 3 {
                        if self.recover.is_none_or(|r| ack > r) {
                            Class::ThirdDup
                        } else {
                            Class::ThirdDupBlocked
                        }
                    } else {
                        Class::Dup
                    }
                } else {
                    Class::Ignored
                }
            }
        }
    }

    /// Applies one event; returns the retransmission the table asks for.
    pub fn step(&mut self, ev: Ev) -> Option<u64> {
        let class = self.classify(ev);
        let row = TABLE
            .iter()
            .position(|(from, c, _, _)| *from == self.phase && *c == class)
            .unwrap_or_else(|| panic!("no edge from {:?} on {:?}", self.phase, class));
        self.visits[row] += 1;
        let (_, _, op, to) = TABLE[row];
        let mss = self.mss;
        let mut rtx = None;
        match (op, ev) {
            (Op::Grow, Ev::Ack(ack, una, _)) => {
                self.dups = 0;
                if self.phase == P::Ss {
                    self.cwnd += (ack - una).min(mss);
                } else {
                    self.cwnd += std::cmp::max(1, mss * mss / self.cwnd);
                }
            }
            (Op::ToSsthresh, _) => {
                self.dups = 0;
                self.cwnd = self.ssthresh;
            }
            (Op::Deflate, Ev::Ack(ack, una, _)) => {
                self.dups = 0;
                let acked = ack - una;
                let mut w = self.cwnd.saturating_sub(acked);
                if acked >= mss {
                    w += mss;
                }
                self.cwnd = w.max(mss);
                rtx = Some(ack);
            }
            (Op::CountDup, _) => self.dups += 1,
            (Op::Halve, Ev::Ack(_, una, nxt)) => {
                self.dups += 1;
                self.ssthresh = std::cmp::max((nxt - una) / 2, 2 * mss);
                self.cwnd = self.ssthresh + 3 * mss;
                self.recover = Some(nxt);
                rtx = Some(una);
            }
            (Op::Inflate, _) => self.cwnd += mss,
            (Op::Collapse, Ev::Timeout(flight, high)) => {
                self.ssthresh = std::cmp::max(flight / 2, 2 * mss);
                self.cwnd = mss;
                self.dups = 0;
                self.recover = Some(high);
                self.rto_ps = std::cmp::min(self.rto_ps * 2, self.max_rto_ps);
            }
            (Op::Nothing, _) => {}
            (op, ev) => panic!("malformed row {op:?} for {ev:?}"),
        }
        self.phase = match to {
            Some(p) => p,
            None if self.cwnd < self.ssthresh => P::Ss,
            None => P::Ca,
        };
        rtx
    }
}

pub fn phase_of(s: &CongestionState) -> P {
    match s.phase() {
        Phase::SlowStart => P::Ss,
        Phase::CongestionAvoidance => P::Ca,
        Phase::FastRecovery => P::Fr,
    }
}

/// Drives the library and the reference with the same random trace.
/// Returns the reference's row visit counts, or the first divergence.
pub fn diff_trace(seed: u64, steps: usize) -> Result<Vec<usize>, String> {
    let params = TcpParams::default();
    let mss = params.mss;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lib = CongestionState::new(params);
    let mut oracle = Reference::new(&params);
    let (mut una, mut nxt, mut high) = (0u64, 10 * mss, 10 * mss);
    let mut step = 0;
    while step < steps {
        let roll: f64 = rng.random();
        if nxt == una || roll < 0.10 {
            // the sender pushes more data; no congestion-control event
            nxt += rng.random_range(1..=8) * mss;
            high = high.max(nxt);
            continue;
        }
        let ev = if roll < 0.45 {
            let flight = nxt - una;
            let acked = if rng.random_bool(0.8) {
                rng.random_range(1..=flight.div_ceil(mss)) * mss
            } else {
                rng.random_range(1..=flight)
            };
            Ev::Ack(una + acked.min(flight), una, nxt)
        } else if roll < 0.93 {
            Ev::Ack(una, una, nxt)
        } else if roll < 0.96 && una > 0 {
            Ev::Ack(rng.random_range(0..una), una, nxt)
        } else {
            Ev::Timeout(nxt - una, high)
        };
        let got = match ev {
            Ev::Ack(ack, u, n) => lib.on_ack(AckInfo { ack, snd_una: u, snd_nxt: n }).retransmit(),
            Ev::Timeout(flight, h) => {
                lib.on_timeout(flight, h);
                None
            }
        };
        let want = oracle.step(ev);
        if got != want {
            return Err(format!("step {step}: {ev:?} retransmit {got:?} vs reference {want:?}"));
        }
        let l = (phase_of(&lib), lib.cwnd, lib.ssthresh, lib.dup_acks, lib.recover, lib.rto.as_ps());
        let r = (oracle.phase, oracle.cwnd, oracle.ssthresh, oracle.dups, oracle.recover, oracle.rto_ps);
        if l != r {
            return Err(format!("step {step} after {ev:?}: library {l:?} vs reference {r:?}"));
        }
        if lib.cwnd < mss {
            return Err(format!("step {step}: cwnd below one MSS"));
        }
        match ev {
            Ev::Ack(ack, _, _) if ack > una => una = ack,
            Ev::Timeout(..) => nxt = una + mss,
            _ => {}
        }
        step += 1;
    }
    Ok(oracle.visits)
}
