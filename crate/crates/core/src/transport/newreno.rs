//! NewReno congestion control as a pure state machine.
//!
//! Window arithmetic is in bytes. The sender feeds it classified events
//! (cumulative ACKs, retransmission timeouts, RTT samples) together with
//! its sequence-space bookkeeping and acts on the returned retransmit hint.

use crate::sim::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    SlowStart,
    CongestionAvoidance,
    FastRecovery,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TcpParams {
    pub mss: u64,
    pub initial_cwnd_mss: u64,
    pub initial_rto: SimTime,
    pub min_rto: SimTime,
    pub max_rto: SimTime,
}

impl Default for TcpParams {
    fn default() -> Self {
        TcpParams {
            mss: 1460,
            initial_cwnd_mss: 10,
            initial_rto: SimTime::from_ms(1000),
            min_rto: SimTime::from_ms(200),
            max_rto: SimTime::from_ms(60_000),
        }
    }
}

/// Sender sequence space at the moment an ACK arrives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AckInfo {
    /// Cumulative acknowledgment (next byte the receiver expects).
    pub ack: u64,
    pub snd_una: u64,
    pub snd_nxt: u64,
}

impl AckInfo {
    pub fn flight(&self) -> u64 {
        self.snd_nxt - self.snd_una
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AckOutcome {
    /// Advanced `snd_una`; `restart_timer` when the RTO should be rearmed.
    NewData { retransmit: Option<u64>, restart_timer: bool },
    Duplicate { retransmit: Option<u64> },
    /// Old or unexpected ACK with nothing outstanding.
    Ignored,
}

impl AckOutcome {
    pub fn retransmit(&self) -> Option<u64> {
        match *self {
            AckOutcome::NewData { retransmit, .. } | AckOutcome::Duplicate { retransmit } => retransmit,
            AckOutcome::Ignored => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CongestionState {
    pub cwnd: u64,
    pub ssthresh: u64,
    pub in_fast_recovery: bool,
    pub dup_acks: u32,
    pub srtt: Option<f64>,
    pub rttvar: f64,
    pub rto: SimTime,
    /// Highest sequence sent when the last loss episode began.
    pub recover: Option<u64>,
    /// Whether the first partial ACK of the current recovery was seen.
    partial_seen: bool,
    params: TcpParams,
}

impl CongestionState {
    pub fn new(params: TcpParams) -> Self {
        CongestionState {
            cwnd: params.initial_cwnd_mss * params.mss,
            ssthresh: u64::MAX,
            in_fast_recovery: false,
            dup_acks: 0,
            srtt: None,
            rttvar: 0.0,
            rto: params.initial_rto,
            recover: None,
            partial_seen: false,
            params,
        }
    }

    pub fn params(&self) -> &TcpParams {
        &self.params
    }

    pub fn phase(&self) -> Phase {
        if self.in_fast_recovery {
            Phase::FastRecovery
        } else if self.cwnd < self.ssthresh {
            Phase::SlowStart
        } else {
            Phase::CongestionAvoidance
        }
    }

    fn reduced_ssthresh(&self, flight: u64) -> u64 {
        (flight / 2).max(2 * self.params.mss)
    }

    pub fn on_ack(&mut self, info: AckInfo) -> AckOutcome {
        let mss = self.params.mss;
        if info.ack > info.snd_una {
            let acked = info.ack - info.snd_una;
            self.dup_acks = 0;
            if self.in_fast_recovery {
                if self.recover.is_some_and(|r| info.ack >= r) {
                    self.cwnd = self.ssthresh;
                    self.in_fast_recovery = false;
                    return AckOutcome::NewData { retransmit: None, restart_timer: true };
                }
                // partial ACK: the next hole is lost too
                self.cwnd = self.cwnd.saturating_sub(acked);
                if acked >= mss {
                    self.cwnd += mss;
                }
                self.cwnd = self.cwnd.max(mss);
                let first = !self.partial_seen;
                self.partial_seen = true;
                return AckOutcome::NewData {
                    retransmit: Some(info.ack),
                    restart_timer: first,
                };
            }
            if self.cwnd < self.ssthresh {
                self.cwnd += acked.min(mss);
            } else {
                self.cwnd += (mss * mss / self.cwnd).max(1);
            }
            return AckOutcome::NewData { retransmit: None, restart_timer: true };
        }
        if info.ack == info.snd_una && info.flight() > 0 {
            if self.in_fast_recovery {
                self.cwnd += mss;
                return AckOutcome::Duplicate { retransmit: None };
            }
            self.dup_acks += 1;
            if self.dup_acks == 3 && self.recover.is_none_or(|r| info.ack > r) {
                self.ssthresh = self.reduced_ssthresh(info.flight());
                self.recover = Some(info.snd_nxt);
                self.cwnd = self.ssthresh + 3 * mss;
                self.in_fast_recovery = true;
                self.partial_seen = false;
                return AckOutcome::Duplicate { retransmit: Some(info.snd_una) };
            }
            return AckOutcome::Duplicate { retransmit: None };
        }
        AckOutcome::Ignored
    }

    /// Retransmission timeout with `flight` bytes outstanding; `snd_nxt` is
    /// the highest sequence sent so far.
    pub fn on_timeout(&mut self, flight: u64, snd_nxt: u64) {
        self.ssthresh = self.reduced_ssthresh(flight);
        self.cwnd = self.params.mss;
        self.in_fast_recovery = false;
        self.dup_acks = 0;
        self.recover = Some(snd_nxt);
        self.rto = SimTime::from_ps((self.rto.as_ps() * 2).min(self.params.max_rto.as_ps()));
    }

    /// Smoothed RTT update; only call with samples from segments that were
    /// never retransmitted.
    pub fn on_rtt_sample(&mut self, rtt: SimTime) {
        let r = rtt.as_secs_f64();
        match self.srtt {
            None => {
                self.srtt = Some(r);
                self.rttvar = r / 2.0;
            }
            Some(srtt) => {
                self.rttvar = 0.75 * self.rttvar + 0.25 * (srtt - r).abs();
                self.srtt = Some(0.875 * srtt + 0.125 * r);
            }
        }
        let raw = SimTime::from_secs_f64(self.srtt.unwrap_or(r) + 4.0 * self.rttvar);
        self.rto = raw.clamp(self.params.min_rto, self.params.max_rto);
    }
}
