//! Link budget: path loss, SINR, MCS selection and per-symbol capacity.

mod mcs;
mod script;

use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::frame::FramePattern;
use crate::sim::RngStream;

pub use mcs::{McsEntry, McsTable};
pub use script::ChannelScript;

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("distance must be positive, got {0} m")]
    NonPositiveDistance(f64),
    #[error("MCS index 0 is outage and carries no bits")]
    Outage,
    #[error("invalid MCS table: {0}")]
    BadMcsTable(String),
    #[error("invalid channel script: {0}")]
    BadScript(String),
    #[error("channel script times must be strictly increasing")]
    UnorderedScript,
    #[error("LOS probability {0} outside [0, 1]")]
    BadProbability(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Los,
    Nlos,
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::Los => "los",
            Regime::Nlos => "nlos",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `PL = alpha + 10 * beta * log10(d) + shadowing`, one coefficient pair per regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossModel {
    pub los_alpha: f64,
    pub los_beta: f64,
    pub nlos_alpha: f64,
    pub nlos_beta: f64,
}

impl Default for PathLossModel {
    fn default() -> Self {
        PathLossModel {
            los_alpha: 61.4,
            los_beta: 2.0,
            nlos_alpha: 72.0,
            nlos_beta: 2.92,
        }
    }
}

impl PathLossModel {
    pub fn pathloss_db(
        &self,
        distance_m: f64,
        regime: Regime,
        shadowing_db: f64,
    ) -> Result<f64, ChannelError> {
        if !(distance_m > 0.0) {
            return Err(ChannelError::NonPositiveDistance(distance_m));
        }
        let (alpha, beta) = match regime {
            Regime::Los => (self.los_alpha, self.los_beta),
            Regime::Nlos => (self.nlos_alpha, self.nlos_beta),
        };
        Ok(alpha + 10.0 * beta * distance_m.log10() + shadowing_db)
    }
}

/// Transmit-side and receiver-side constants that turn path loss into SINR.
/// `bf_gain_db` lumps both ends' directional gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub tx_power_dbm: f64,
    pub bf_gain_db: f64,
    pub noise_figure_db: f64,
    pub bandwidth_hz: f64,
}

impl Default for LinkBudget {
    fn default() -> Self {
        LinkBudget {
            tx_power_dbm: 30.0,
            bf_gain_db: 28.0,
            noise_figure_db: 5.0,
            bandwidth_hz: 1e9,
        }
    }
}

impl LinkBudget {
    pub fn noise_floor_dbm(&self) -> f64 {
        -174.0 + 10.0 * self.bandwidth_hz.log10() + self.noise_figure_db
    }

    /// Single cell, no interference: SINR equals SNR.
    pub fn sinr_db(&self, pathloss_db: f64) -> f64 {
        self.tx_power_dbm + self.bf_gain_db - pathloss_db - self.noise_floor_dbm()
    }
}

/// How a UE's regime is chosen at placement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LosLaw {
    /// `P(LOS) = exp(-decay_per_m * d)`.
    Exponential { decay_per_m: f64 },
    Fixed { p_los: f64 },
    Forced(Regime),
}

impl Default for LosLaw {
    fn default() -> Self {
        LosLaw::Exponential { decay_per_m: 0.0149 }
    }
}

impl LosLaw {
    pub fn p_los(&self, distance_m: f64) -> f64 {
        match *self {
            LosLaw::Exponential { decay_per_m } => (-decay_per_m * distance_m).exp(),
            LosLaw::Fixed { p_los } => p_los,
            LosLaw::Forced(Regime::Los) => 1.0,
            LosLaw::Forced(Regime::Nlos) => 0.0,
        }
    }
}

/// Everything needed to turn geometry into a per-symbol bit budget.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelParams {
    pub pathloss: PathLossModel,
    pub budget: LinkBudget,
    pub cp_fraction: f64,
    pub shadowing_enabled: bool,
    pub sigma_los_db: f64,
    pub sigma_nlos_db: f64,
    pub los_law: LosLaw,
    pub mcs: McsTable,
}

impl Default for ChannelParams {
    fn default() -> Self {
        ChannelParams {
            pathloss: PathLossModel::default(),
            budget: LinkBudget::default(),
            cp_fraction: 0.07,
            shadowing_enabled: true,
            sigma_los_db: 5.8,
            sigma_nlos_db: 8.7,
            los_law: LosLaw::default(),
            mcs: McsTable::default(),
        }
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<(), ChannelError> {
        if let LosLaw::Fixed { p_los } = self.los_law {
            if !(0.0..=1.0).contains(&p_los) {
                return Err(ChannelError::BadProbability(p_los));
            }
        }
        Ok(())
    }

    pub fn sinr_db(&self, link: &LinkState) -> Result<f64, ChannelError> {
        let pl = self
            .pathloss
            .pathloss_db(link.distance_m, link.regime, link.shadowing_db)?;
        Ok(self.budget.sinr_db(pl))
    }

    pub fn select_mcs(&self, sinr_db: f64) -> McsEntry {
        self.mcs.select(sinr_db)
    }

    /// `floor(eff * B * T_sym * (1 - cp))`.
    pub fn bits_per_symbol(&self, mcs: McsEntry, frame: &FramePattern) -> Result<u64, ChannelError> {
        if mcs.index == 0 || mcs.spectral_eff <= 0.0 {
            return Err(ChannelError::Outage);
        }
        let raw = mcs.spectral_eff
            * self.budget.bandwidth_hz
            * frame.symbol_duration_s()
            * (1.0 - self.cp_fraction);
        // absorb the 1-ulp error of products like 4166.66..*0.93
        Ok((raw + 1e-6).floor() as u64)
    }

    pub fn los_draw(&self, distance_m: f64, rng: &mut RngStream) -> Regime {
        match self.los_law {
            LosLaw::Forced(r) => r,
            law => {
                if rng.random::<f64>() < law.p_los(distance_m) {
                    Regime::Los
                } else {
                    Regime::Nlos
                }
            }
        }
    }

    /// Block shadowing for one UE, zero when disabled.
    pub fn draw_shadowing(&self, regime: Regime, rng: &mut RngStream) -> f64 {
        if !self.shadowing_enabled {
            return 0.0;
        }
        let sigma = match regime {
            Regime::Los => self.sigma_los_db,
            Regime::Nlos => self.sigma_nlos_db,
        };
        if sigma <= 0.0 {
            return 0.0;
        }
        Normal::new(0.0, sigma).expect("finite sigma").sample(rng)
    }

    pub fn link(&self, distance_m: f64, regime: Regime, shadowing_db: f64) -> Result<LinkState, ChannelError> {
        let mut link = LinkState {
            distance_m,
            regime,
            shadowing_db,
            sinr_db: 0.0,
        };
        link.sinr_db = self.sinr_db(&link)?;
        Ok(link)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkState {
    pub distance_m: f64,
    pub regime: Regime,
    pub shadowing_db: f64,
    pub sinr_db: f64,
}

impl LinkState {
    pub fn set_regime(&mut self, regime: Regime, params: &ChannelParams) -> Result<(), ChannelError> {
        self.regime = regime;
        self.sinr_db = params.sinr_db(self)?;
        Ok(())
    }

    pub fn set_distance(&mut self, distance_m: f64, params: &ChannelParams) -> Result<(), ChannelError> {
        self.distance_m = distance_m;
        self.sinr_db = params.sinr_db(self)?;
        Ok(())
    }
}
