use std::str::FromStr;

use super::{ChannelError, Regime};
use crate::sim::SimTime;

/// Scripted regime switches, e.g. `0:los,3:nlos`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChannelScript {
    transitions: Vec<(SimTime, Regime)>,
}

impl ChannelScript {
    pub fn new(transitions: Vec<(SimTime, Regime)>) -> Result<Self, ChannelError> {
        if transitions.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(ChannelError::UnorderedScript);
        }
        Ok(ChannelScript { transitions })
    }

    pub fn transitions(&self) -> &[(SimTime, Regime)] {
        &self.transitions
    }

    /// Regime in force at `t`; a transition at `t` already applies.
    pub fn regime_at(&self, t: SimTime, initial: Regime) -> Regime {
        self.transitions
            .iter()
            .take_while(|(at, _)| *at <= t)
            .last()
            .map_or(initial, |(_, r)| *r)
    }
}

impl FromStr for ChannelScript {
    type Err = ChannelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut transitions = Vec::new();
        for item in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let bad = || ChannelError::BadScript(format!("bad script entry '{item}'"));
            let (t, r) = item.split_once(':').ok_or_else(bad)?;
            let secs: f64 = t.trim().parse().map_err(|_| bad())?;
            if !(secs >= 0.0) {
                return Err(bad());
            }
            let regime = match r.trim().to_ascii_lowercase().as_str() {
                "los" => Regime::Los,
                "nlos" => Regime::Nlos,
                _ => return Err(bad()),
            };
            transitions.push((SimTime::from_secs_f64(secs), regime));
        }
        ChannelScript::new(transitions)
    }
}
