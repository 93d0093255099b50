use std::collections::{BTreeSet, VecDeque};

use super::newreno::{AckInfo, AckOutcome, CongestionState};
use super::pipe::{Datagram, Delivered, LinkPipe};
use super::{cbr_instant, drain_rate_bps, PathConfig, SourceKind};
use crate::channel::{ChannelError, LinkState, Regime};
use crate::metrics::TraceRow;
use crate::sim::{Event, EventHandle, Model, RngStream, Scheduler, SimTime};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Segment {
    seq: u64,
    len: u32,
    sent_at: SimTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PathEvent {
    AppTick(u64),
    AtBaseStation(Segment),
    PipeWake,
    Ack(u64),
    Rto,
    Regime(Regime),
    Measure(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CongestionKind {
    FastRetransmit,
    Timeout,
}

/// A window reduction, with the state just before and just after it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CongestionEvent {
    pub t: SimTime,
    pub kind: CongestionKind,
    pub flight_bytes: u64,
    pub cwnd_before: u64,
    pub cwnd_after: u64,
    pub ssthresh_after: u64,
}

/// Byte counters along the forward path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PathStats {
    pub injected: u64,
    pub in_core: u64,
    pub buffered: u64,
    pub delivered: u64,
    pub dropped: u64,
    pub retransmitted: u64,
    pub goodput_bytes: u64,
}

impl PathStats {
    pub fn conserved(&self) -> bool {
        self.injected == self.in_core + self.buffered + self.delivered + self.dropped
    }
}

#[derive(Debug, Clone)]
pub struct PathResult {
    pub rows: Vec<TraceRow>,
    pub congestion_events: Vec<CongestionEvent>,
    pub stats: PathStats,
    pub los_rate_bps: u64,
    pub nlos_rate_bps: u64,
    pub events: u64,
}

#[derive(Debug, Clone, Copy)]
struct SentMeta {
    sent_at: SimTime,
    retransmitted: bool,
}

struct TcpSender {
    cc: CongestionState,
    mss: u64,
    snd_una: u64,
    snd_nxt: u64,
    high_tx: u64,
    app_bytes: u64,
    /// One entry per MSS from `snd_una` up to `high_tx`.
    sent: VecDeque<SentMeta>,
    rto_timer: Option<EventHandle>,
}

#[derive(Default)]
struct Receiver {
    rcv_nxt: u64,
    out_of_order: BTreeSet<u64>,
}

#[derive(Default)]
struct TickAccumulator {
    goodput_bytes: u64,
    rtt_sum_s: f64,
    rtt_count: u64,
}

struct PathModel<'a> {
    cfg: &'a PathConfig,
    link: LinkState,
    shadow_db: [f64; 2],
    pipe: LinkPipe<Segment>,
    wake: Option<(EventHandle, SimTime)>,
    tcp: Option<TcpSender>,
    rx: Receiver,
    acc: TickAccumulator,
    stats: PathStats,
    rows: Vec<TraceRow>,
    congestion_events: Vec<CongestionEvent>,
}

impl PathModel<'_> {
    fn owd(&self) -> SimTime {
        self.cfg.core_owd
    }

    fn emit(&mut self, seg: Segment, sched: &mut Scheduler<PathEvent>) {
        self.stats.injected += seg.len as u64;
        self.stats.in_core += seg.len as u64;
        sched.schedule_in(self.owd(), PathEvent::AtBaseStation(seg));
    }

    fn rearm_wake(&mut self, sched: &mut Scheduler<PathEvent>) {
        let next = self.pipe.next_completion();
        if self.wake.map(|(_, t)| t) == next {
            return;
        }
        if let Some((h, _)) = self.wake.take() {
            sched.cancel(h);
        }
        if let Some(t) = next {
            self.wake = Some((sched.schedule(t, PathEvent::PipeWake), t));
        }
    }

    fn sync_buffer(&mut self) {
        self.stats.buffered = self.pipe.buffered_bytes();
        self.stats.dropped = self.pipe.dropped_bytes();
    }

    fn on_delivered(&mut self, out: Vec<Delivered<Segment>>, sched: &mut Scheduler<PathEvent>) {
        for d in out {
            let seg = d.datagram.tag;
            self.stats.delivered += seg.len as u64;
            let rtt = d.delivered_at - seg.sent_at + self.owd();
            self.acc.rtt_sum_s += rtt.as_secs_f64();
            self.acc.rtt_count += 1;
            let fresh = match self.cfg.source {
                SourceKind::Udp => seg.len as u64,
                SourceKind::Tcp => self.receive_tcp(seg),
            };
            self.acc.goodput_bytes += fresh;
            self.stats.goodput_bytes += fresh;
            if self.cfg.source == SourceKind::Tcp {
                let at = (d.delivered_at + self.owd()).max(sched.now());
                sched.schedule(at, PathEvent::Ack(self.rx.rcv_nxt));
            }
        }
        self.sync_buffer();
    }

    /// In-order bytes newly released to the application.
    fn receive_tcp(&mut self, seg: Segment) -> u64 {
        let rx = &mut self.rx;
        let before = rx.rcv_nxt;
        if seg.seq == rx.rcv_nxt {
            rx.rcv_nxt += seg.len as u64;
            while rx.out_of_order.remove(&rx.rcv_nxt) {
                rx.rcv_nxt += seg.len as u64;
            }
        } else if seg.seq > rx.rcv_nxt {
            rx.out_of_order.insert(seg.seq);
        }
        rx.rcv_nxt - before
    }

    fn transmit(&mut self, seq: u64, sched: &mut Scheduler<PathEvent>) {
        let now = sched.now();
        let tcp = self.tcp.as_mut().expect("tcp source");
        let idx = ((seq - tcp.snd_una) / tcp.mss) as usize;
        if seq < tcp.high_tx {
            tcp.sent[idx] = SentMeta { sent_at: now, retransmitted: true };
            self.stats.retransmitted += tcp.mss;
        } else {
            debug_assert_eq!(idx, tcp.sent.len());
            tcp.sent.push_back(SentMeta { sent_at: now, retransmitted: false });
            tcp.high_tx = seq + tcp.mss;
        }
        if tcp.rto_timer.is_none() {
            tcp.rto_timer = Some(sched.schedule_in(tcp.cc.rto, PathEvent::Rto));
        }
        let seg = Segment { seq, len: tcp.mss as u32, sent_at: now };
        self.emit(seg, sched);
    }

    fn restart_rto(&mut self, sched: &mut Scheduler<PathEvent>) {
        let tcp = self.tcp.as_mut().expect("tcp source");
        if let Some(h) = tcp.rto_timer.take() {
            sched.cancel(h);
        }
        if tcp.snd_una < tcp.snd_nxt {
            tcp.rto_timer = Some(sched.schedule_in(tcp.cc.rto, PathEvent::Rto));
        }
    }

    fn send_window(&mut self, sched: &mut Scheduler<PathEvent>) {
        loop {
            let tcp = self.tcp.as_mut().expect("tcp source");
            let flight = tcp.snd_nxt - tcp.snd_una;
            if tcp.snd_nxt >= tcp.app_bytes || flight + tcp.mss > tcp.cc.cwnd {
                return;
            }
            let seq = tcp.snd_nxt;
            tcp.snd_nxt += tcp.mss;
            self.transmit(seq, sched);
        }
    }

    fn on_ack(&mut self, ack: u64, sched: &mut Scheduler<PathEvent>) {
        let now = sched.now();
        let tcp = self.tcp.as_mut().expect("tcp source");
        if ack > tcp.snd_una {
            let n = ((ack - tcp.snd_una) / tcp.mss) as usize;
            let last = tcp.sent.drain(..n).next_back().expect("acked segment");
            if !last.retransmitted {
                tcp.cc.on_rtt_sample(now - last.sent_at);
            }
        }
        tcp.snd_nxt = tcp.snd_nxt.max(ack);
        let info = AckInfo { ack, snd_una: tcp.snd_una, snd_nxt: tcp.snd_nxt };
        let was_recovering = tcp.cc.in_fast_recovery;
        let cwnd_before = tcp.cc.cwnd;
        let outcome = tcp.cc.on_ack(info);
        if !was_recovering && tcp.cc.in_fast_recovery {
            self.congestion_events.push(CongestionEvent {
                t: now,
                kind: CongestionKind::FastRetransmit,
                flight_bytes: info.flight(),
                cwnd_before,
                cwnd_after: tcp.cc.cwnd,
                ssthresh_after: tcp.cc.ssthresh,
            });
        }
        tcp.snd_una = tcp.snd_una.max(ack);
        if let Some(seq) = outcome.retransmit() {
            self.transmit(seq, sched);
        }
        if let AckOutcome::NewData { restart_timer, .. } = outcome {
            let tcp = self.tcp.as_ref().expect("tcp source");
            if restart_timer || tcp.snd_una == tcp.snd_nxt {
                self.restart_rto(sched);
            }
        }
        self.send_window(sched);
    }

    fn on_rto(&mut self, sched: &mut Scheduler<PathEvent>) {
        let now = sched.now();
        let tcp = self.tcp.as_mut().expect("tcp source");
        tcp.rto_timer = None;
        let flight = tcp.snd_nxt - tcp.snd_una;
        if flight == 0 {
            return;
        }
        let cwnd_before = tcp.cc.cwnd;
        tcp.cc.on_timeout(flight, tcp.high_tx);
        self.congestion_events.push(CongestionEvent {
            t: now,
            kind: CongestionKind::Timeout,
            flight_bytes: flight,
            cwnd_before,
            cwnd_after: tcp.cc.cwnd,
            ssthresh_after: tcp.cc.ssthresh,
        });
        // go back N
        let seq = tcp.snd_una;
        tcp.snd_nxt = seq + tcp.mss;
        self.transmit(seq, sched);
        self.send_window(sched);
    }

    fn set_regime(&mut self, regime: Regime, sched: &mut Scheduler<PathEvent>) {
        self.link.shadowing_db = self.shadow_db[regime as usize];
        self.link
            .set_regime(regime, &self.cfg.channel)
            .expect("distance validated at setup");
        let rate = drain_rate_bps(&self.cfg.channel, &self.cfg.frame, &self.link);
        let out = self.pipe.set_rate(sched.now(), rate);
        self.on_delivered(out, sched);
        self.rearm_wake(sched);
    }

    fn measure(&mut self, k: u64, sched: &mut Scheduler<PathEvent>) {
        let out = self.pipe.drain_step(sched.now());
        self.on_delivered(out, sched);
        self.rearm_wake(sched);
        let acc = std::mem::take(&mut self.acc);
        self.rows.push(TraceRow {
            t: sched.now(),
            source: self.cfg.source.name(),
            goodput_bps: acc.goodput_bytes as f64 * 8.0 / self.cfg.tick.as_secs_f64(),
            rtt_s: (acc.rtt_count > 0).then(|| acc.rtt_sum_s / acc.rtt_count as f64),
            buffer_bytes: self.pipe.buffered_bytes(),
            cwnd_bytes: self.tcp.as_ref().map(|t| t.cc.cwnd),
        });
        let next = SimTime::from_ps(self.cfg.tick.as_ps() * (k + 1));
        if next <= self.cfg.duration {
            sched.schedule(next, PathEvent::Measure(k + 1));
        }
    }
}

impl Model<PathEvent> for PathModel<'_> {
    fn handle(&mut self, ev: Event<PathEvent>, sched: &mut Scheduler<PathEvent>) {
        let now = sched.now();
        match ev.kind {
            PathEvent::AppTick(k) => {
                match self.cfg.source {
                    SourceKind::Udp => {
                        let seg = Segment { seq: k, len: self.cfg.udp_packet_bytes, sent_at: now };
                        self.emit(seg, sched);
                    }
                    SourceKind::Tcp => {
                        let tcp = self.tcp.as_mut().expect("tcp source");
                        tcp.app_bytes += tcp.mss;
                        self.send_window(sched);
                    }
                }
                let unit = match self.cfg.source {
                    SourceKind::Udp => self.cfg.udp_packet_bytes,
                    SourceKind::Tcp => self.cfg.tcp.mss as u32,
                };
                let next = cbr_instant(k + 1, unit, self.cfg.app_rate_bps);
                if next < self.cfg.duration {
                    sched.schedule(next, PathEvent::AppTick(k + 1));
                }
            }
            PathEvent::AtBaseStation(seg) => {
                self.stats.in_core -= seg.len as u64;
                let d = Datagram { size_bytes: seg.len, tag: seg };
                let (_, out) = self.pipe.enqueue(now, d);
                self.on_delivered(out, sched);
                self.rearm_wake(sched);
            }
            PathEvent::PipeWake => {
                self.wake = None;
                let out = self.pipe.drain_step(now);
                self.on_delivered(out, sched);
                self.rearm_wake(sched);
            }
            PathEvent::Ack(ack) => self.on_ack(ack, sched),
            PathEvent::Rto => self.on_rto(sched),
            PathEvent::Regime(r) => self.set_regime(r, sched),
            PathEvent::Measure(k) => self.measure(k, sched),
        }
    }
}

/// Runs one source over the scripted channel and samples the trace every
/// `cfg.tick`. `observe` sees the byte counters after every event.
pub fn run_path(
    cfg: &PathConfig,
    mut observe: impl FnMut(SimTime, &PathStats),
) -> Result<PathResult, ChannelError> {
    cfg.channel.validate()?;
    let mut shadow_db = [0.0; 2];
    if cfg.channel.shadowing_enabled {
        let mut rng = RngStream::new(cfg.seed, "shadowing");
        shadow_db[Regime::Los as usize] = cfg.channel.draw_shadowing(Regime::Los, &mut rng);
        shadow_db[Regime::Nlos as usize] = cfg.channel.draw_shadowing(Regime::Nlos, &mut rng);
    }
    let rate_for = |r: Regime| -> Result<u64, ChannelError> {
        let link = cfg.channel.link(cfg.distance_m, r, shadow_db[r as usize])?;
        Ok(drain_rate_bps(&cfg.channel, &cfg.frame, &link))
    };
    let los_rate_bps = rate_for(Regime::Los)?;
    let nlos_rate_bps = rate_for(Regime::Nlos)?;

    let regime0 = cfg.script.regime_at(SimTime::ZERO, cfg.initial_regime);
    let link = cfg.channel.link(cfg.distance_m, regime0, shadow_db[regime0 as usize])?;
    let rate0 = drain_rate_bps(&cfg.channel, &cfg.frame, &link);
    let tcp = (cfg.source == SourceKind::Tcp).then(|| TcpSender {
        cc: CongestionState::new(cfg.tcp),
        mss: cfg.tcp.mss,
        snd_una: 0,
        snd_nxt: 0,
        high_tx: 0,
        app_bytes: 0,
        sent: VecDeque::new(),
        rto_timer: None,
    });
    let mut model = PathModel {
        cfg,
        link,
        shadow_db,
        pipe: LinkPipe::new(rate0, cfg.buffer_cap_bytes),
        wake: None,
        tcp,
        rx: Receiver::default(),
        acc: TickAccumulator::default(),
        stats: PathStats::default(),
        rows: Vec::new(),
        congestion_events: Vec::new(),
    };

    let mut sched = Scheduler::new();
    for &(t, r) in cfg.script.transitions() {
        if t > SimTime::ZERO && t < cfg.duration {
            sched.schedule(t, PathEvent::Regime(r));
        }
    }
    if cfg.duration > SimTime::ZERO {
        sched.schedule(SimTime::ZERO, PathEvent::AppTick(0));
    }
    if cfg.tick > SimTime::ZERO && cfg.tick <= cfg.duration {
        sched.schedule(cfg.tick, PathEvent::Measure(1));
    }
    while let Some(ev) = sched.next_event(cfg.duration) {
        model.handle(ev, &mut sched);
        observe(sched.now(), &model.stats);
    }
    Ok(PathResult {
        rows: model.rows,
        congestion_events: model.congestion_events,
        stats: model.stats,
        los_rate_bps,
        nlos_rate_bps,
        events: sched.dispatched(),
    })
}
