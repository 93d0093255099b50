//! Discrete-event simulator of a single mmWave cell with a flexible-TTI,
//! dynamic-TDD MAC, plus an end-to-end TCP/UDP path over a radio buffer
//! whose drain rate follows the channel.

use std::fmt;

pub mod channel;
pub mod cli;
pub mod frame;
pub mod mac;
pub mod metrics;
pub mod sim;
pub mod traffic;
pub mod transport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Dl,
    Ul,
}

impl Direction {
    pub fn name(&self) -> &'static str {
        match self {
            Direction::Dl => "dl",
            Direction::Ul => "ul",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
