//! Discrete-event engine: virtual clock, ordered event queue and seeded
//! random streams.

mod engine;
mod rng;
mod time;

pub use engine::{Event, EventHandle, Model, Scheduler};
pub use rng::RngStream;
pub use time::SimTime;
