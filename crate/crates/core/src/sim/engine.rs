use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashSet};

use super::SimTime;

/// A scheduled occurrence. `kind` carries both the discriminator and the
/// payload; each model defines its own event enum.
#[derive(Debug, Clone)]
pub struct Event<K> {
    pub fire_time: SimTime,
    pub sequence: u64,
    pub kind: K,
}

impl<K> PartialEq for Event<K> {
    fn eq(&self, other: &Self) -> bool {
        self.fire_time == other.fire_time && self.sequence == other.sequence
    }
}

impl<K> Eq for Event<K> {}

impl<K> PartialOrd for Event<K> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<K> Ord for Event<K> {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.fire_time, self.sequence).cmp(&(other.fire_time, other.sequence))
    }
}

/// Identifies a scheduled event for cancellation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EventHandle(u64);

/// Something that reacts to dispatched events.
pub trait Model<K> {
    fn handle(&mut self, event: Event<K>, sched: &mut Scheduler<K>);
}

/// Single-threaded event queue with a monotonic clock.
///
/// Events dispatch in `(fire_time, sequence)` order, where `sequence` is
/// assigned at insertion.
#[derive(Debug)]
pub struct Scheduler<K> {
    clock: SimTime,
    next_sequence: u64,
    queue: BinaryHeap<Reverse<Event<K>>>,
    cancelled: HashSet<u64>,
    dispatched: u64,
}

impl<K> Default for Scheduler<K> {
    fn default() -> Self {
        Self::new()
    }
}

impl<K> Scheduler<K> {
    pub fn new() -> Self {
        Scheduler {
            clock: SimTime::ZERO,
            next_sequence: 0,
            queue: BinaryHeap::new(),
            cancelled: HashSet::new(),
            dispatched: 0,
        }
    }

    pub fn now(&self) -> SimTime {
        self.clock
    }

    /// Number of events dispatched so far (cancelled events excluded).
    pub fn dispatched(&self) -> u64 {
        self.dispatched
    }

    /// Number of queued events, including cancelled ones not yet discarded.
    pub fn pending(&self) -> usize {
        self.queue.len()
    }

    /// Queues `kind` to fire at `at`.
    ///
    /// # Panics
    ///
    /// Scheduling in the past is a programming error and halts the run.
    pub fn schedule(&mut self, at: SimTime, kind: K) -> EventHandle {
        assert!(
            at >= self.clock,
            "event scheduled in the past: {} < clock {}",
            at,
            self.clock
        );
        let sequence = self.next_sequence;
        self.next_sequence += 1;
        self.queue.push(Reverse(Event {
            fire_time: at,
            sequence,
            kind,
        }));
        EventHandle(sequence)
    }

    pub fn schedule_in(&mut self, delay: SimTime, kind: K) -> EventHandle {
        let at = self.clock + delay;
        self.schedule(at, kind)
    }

    /// Cancels a pending event. Cancelling an already-dispatched event is a no-op.
    pub fn cancel(&mut self, handle: EventHandle) {
        if handle.0 < self.next_sequence {
            self.cancelled.insert(handle.0);
        }
    }

    /// Pops the next live event with `fire_time <= limit`, advancing the clock.
    pub fn next_event(&mut self, limit: SimTime) -> Option<Event<K>> {
        loop {
            let fire_time = self.queue.peek()?.0.fire_time;
            if fire_time > limit {
                return None;
            }
            let Reverse(event) = self.queue.pop().expect("peeked");
            if self.cancelled.remove(&event.sequence) {
                continue;
            }
            debug_assert!(event.fire_time >= self.clock);
            self.clock = event.fire_time;
            self.dispatched += 1;
            return Some(event);
        }
    }

    /// Dispatches every event with `fire_time <= t_end`, then sets the clock
    /// to `t_end`.
    pub fn run_until<M: Model<K>>(&mut self, t_end: SimTime, model: &mut M) {
        assert!(t_end >= self.clock, "run_until target precedes clock");
        while let Some(event) = self.next_event(t_end) {
            model.handle(event, self);
        }
        self.clock = t_end;
    }
}
