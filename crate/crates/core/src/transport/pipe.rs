//! Radio-link buffer drained at a channel-determined rate.

use std::collections::VecDeque;

use crate::sim::SimTime;

const PS_PER_S: u128 = 1_000_000_000_000;

/// A packet as seen by the radio buffer. `tag` is opaque to the pipe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Datagram<T> {
    pub size_bytes: u32,
    pub tag: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Delivered<T> {
    pub datagram: Datagram<T>,
    pub enqueued_at: SimTime,
    pub delivered_at: SimTime,
}

impl<T> Delivered<T> {
    /// Time spent in the buffer including its own serialization.
    pub fn sojourn(&self) -> SimTime {
        self.delivered_at - self.enqueued_at
    }
}

/// FIFO drained at `rate_bps`. Progress on the head packet is kept in
/// bit-picoseconds so rate changes mid-packet lose nothing to rounding.
#[derive(Debug, Clone)]
pub struct LinkPipe<T> {
    queue: VecDeque<(Datagram<T>, SimTime)>,
    queued_bytes: u64,
    cap_bytes: Option<u64>,
    rate_bps: u64,
    head_done: u128,
    last: SimTime,
    dropped_bytes: u64,
    dropped_packets: u64,
}

impl<T: Copy> LinkPipe<T> {
    /// `cap_bytes = 0` means unbounded.
    pub fn new(rate_bps: u64, cap_bytes: u64) -> Self {
        LinkPipe {
            queue: VecDeque::new(),
            queued_bytes: 0,
            cap_bytes: (cap_bytes > 0).then_some(cap_bytes),
            rate_bps,
            head_done: 0,
            last: SimTime::ZERO,
            dropped_bytes: 0,
            dropped_packets: 0,
        }
    }

    pub fn rate_bps(&self) -> u64 {
        self.rate_bps
    }

    pub fn buffered_bytes(&self) -> u64 {
        self.queued_bytes
    }

    pub fn buffered_packets(&self) -> usize {
        self.queue.len()
    }

    pub fn dropped_bytes(&self) -> u64 {
        self.dropped_bytes
    }

    pub fn dropped_packets(&self) -> u64 {
        self.dropped_packets
    }

    /// Settles the pipe to `now` and switches rate. Packets already complete
    /// by `now` are returned.
    pub fn set_rate(&mut self, now: SimTime, rate_bps: u64) -> Vec<Delivered<T>> {
        let out = self.drain_step(now);
        self.rate_bps = rate_bps;
        out
    }

    /// Tail-drops when the cap would be exceeded. Returns whether the
    /// packet was accepted, plus anything that finished before `now`.
    pub fn enqueue(&mut self, now: SimTime, d: Datagram<T>) -> (bool, Vec<Delivered<T>>) {
        let out = self.drain_step(now);
        let size = d.size_bytes as u64;
        if self.cap_bytes.is_some_and(|cap| self.queued_bytes + size > cap) {
            self.dropped_bytes += size;
            self.dropped_packets += 1;
            return (false, out);
        }
        self.queue.push_back((d, now));
        self.queued_bytes += size;
        (true, out)
    }

    fn head_remaining(&self) -> Option<u128> {
        let (d, _) = self.queue.front()?;
        Some(d.size_bytes as u128 * 8 * PS_PER_S - self.head_done)
    }

    /// Moves the pipe forward to `now`, returning packets whose last bit
    /// left the buffer at or before `now`, with their exact departure times.
    pub fn drain_step(&mut self, now: SimTime) -> Vec<Delivered<T>> {
        assert!(now >= self.last, "pipe driven backwards");
        let mut out = Vec::new();
        while let Some(remaining) = self.head_remaining() {
            if self.rate_bps == 0 {
                break;
            }
            let rate = self.rate_bps as u128;
            let elapsed = (now - self.last).as_ps() as u128;
            if rate * elapsed < remaining {
                self.head_done += rate * elapsed;
                break;
            }
            let finish = self.last + SimTime::from_ps(remaining.div_ceil(rate) as u64);
            let (datagram, enqueued_at) = self.queue.pop_front().expect("head");
            self.queued_bytes -= datagram.size_bytes as u64;
            self.head_done = 0;
            self.last = finish;
            out.push(Delivered { datagram, enqueued_at, delivered_at: finish });
        }
        self.last = now;
        out
    }

    /// When the head packet will finish at the current rate, if ever.
    pub fn next_completion(&self) -> Option<SimTime> {
        let remaining = self.head_remaining()?;
        if self.rate_bps == 0 {
            return None;
        }
        let ps = remaining.div_ceil(self.rate_bps as u128);
        Some(self.last + SimTime::from_ps(ps as u64))
    }

    /// Time for the whole backlog to leave at the current rate.
    pub fn backlog_drain_time(&self) -> Option<SimTime> {
        if self.rate_bps == 0 {
            return (self.queued_bytes == 0).then_some(SimTime::ZERO);
        }
        let work = self.queued_bytes as u128 * 8 * PS_PER_S - self.head_done;
        Some(SimTime::from_ps(work.div_ceil(self.rate_bps as u128) as u64))
    }
}

/// Serialization time of `bytes` at `rate_bps`, rounded up to the picosecond.
pub fn serialization(bytes: u64, rate_bps: u64) -> SimTime {
    SimTime::from_ps((bytes as u128 * 8 * PS_PER_S).div_ceil(rate_bps as u128) as u64)
}
