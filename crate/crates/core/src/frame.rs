//! Subframe numerology and structural layout.
//!
//! A subframe is `[DL-CTRL | data region | UL-CTRL]`. The data region holds
//! DL slots packed from the left, an optional guard symbol, and UL slots
//! packed against UL-CTRL.

use std::fmt;
use std::ops::Range;

use thiserror::Error;

use crate::sim::SimTime;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FrameError {
    #[error("subframe duration must be positive")]
    ZeroDuration,
    #[error("n_symbols must be positive")]
    NoSymbols,
    #[error("control symbols ({dl} DL + {ul} UL) leave no data symbols out of {total}")]
    NoDataRegion { dl: usize, ul: usize, total: usize },
    #[error("fixed TTI quantum must be at least 1")]
    ZeroQuantum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TtiMode {
    Variable,
    Fixed { quantum: usize },
}

impl TtiMode {
    pub const DEFAULT_QUANTUM: usize = 6;

    pub fn name(&self) -> &'static str {
        match self {
            TtiMode::Variable => "variable",
            TtiMode::Fixed { .. } => "fixed",
        }
    }

    /// Rounds a symbol requirement up to what the mode can actually grant.
    pub fn round_symbols(&self, symbols: usize) -> usize {
        match *self {
            TtiMode::Variable => symbols,
            TtiMode::Fixed { quantum } => symbols.div_ceil(quantum) * quantum,
        }
    }
}

impl fmt::Display for TtiMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Position of one OFDM symbol on the global timeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct SymbolRef {
    pub subframe_index: u64,
    pub symbol_index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FramePattern {
    subframe: SimTime,
    n_symbols: usize,
    n_dl_ctrl: usize,
    n_ul_ctrl: usize,
    tti_mode: TtiMode,
}

impl FramePattern {
    pub fn new(
        subframe: SimTime,
        n_symbols: usize,
        n_dl_ctrl: usize,
        n_ul_ctrl: usize,
        tti_mode: TtiMode,
    ) -> Result<Self, FrameError> {
        if subframe == SimTime::ZERO {
            return Err(FrameError::ZeroDuration);
        }
        if n_symbols == 0 {
            return Err(FrameError::NoSymbols);
        }
        if n_dl_ctrl + n_ul_ctrl >= n_symbols {
            return Err(FrameError::NoDataRegion {
                dl: n_dl_ctrl,
                ul: n_ul_ctrl,
                total: n_symbols,
            });
        }
        if let TtiMode::Fixed { quantum: 0 } = tti_mode {
            return Err(FrameError::ZeroQuantum);
        }
        Ok(FramePattern {
            subframe,
            n_symbols,
            n_dl_ctrl,
            n_ul_ctrl,
            tti_mode,
        })
    }

    /// One of the 25/6 µs-symbol patterns (200/48, 100/24, 50/12 and any
    /// other multiple of 25 µs), with one DL-CTRL and one UL-CTRL symbol.
    pub fn standard(subframe_us: u64, tti_mode: TtiMode) -> Result<Self, FrameError> {
        let n_symbols = (subframe_us * 6 / 25) as usize;
        Self::new(SimTime::from_us(subframe_us), n_symbols, 1, 1, tti_mode)
    }

    pub fn subframe(&self) -> SimTime {
        self.subframe
    }

    pub fn n_symbols(&self) -> usize {
        self.n_symbols
    }

    pub fn n_dl_ctrl(&self) -> usize {
        self.n_dl_ctrl
    }

    pub fn n_ul_ctrl(&self) -> usize {
        self.n_ul_ctrl
    }

    pub fn tti_mode(&self) -> TtiMode {
        self.tti_mode
    }

    pub fn with_tti_mode(mut self, tti_mode: TtiMode) -> Self {
        self.tti_mode = tti_mode;
        self
    }

    /// Nominal symbol duration in seconds (exact rational, rounded once).
    pub fn symbol_duration_s(&self) -> f64 {
        self.subframe.as_secs_f64() / self.n_symbols as f64
    }

    pub fn n_data(&self) -> usize {
        self.n_symbols - self.n_dl_ctrl - self.n_ul_ctrl
    }

    pub fn data_region(&self) -> Range<usize> {
        self.n_dl_ctrl..self.n_symbols - self.n_ul_ctrl
    }

    pub fn control_overhead(&self) -> f64 {
        (self.n_dl_ctrl + self.n_ul_ctrl) as f64 / self.n_symbols as f64
    }

    /// Offset of symbol boundary `k` (0..=n_symbols) from the subframe start.
    pub fn boundary_offset(&self, k: usize) -> SimTime {
        debug_assert!(k <= self.n_symbols);
        let ps = self.subframe.as_ps() as u128 * k as u128 / self.n_symbols as u128;
        SimTime::from_ps(ps as u64)
    }

    pub fn subframe_start(&self, subframe_index: u64) -> SimTime {
        SimTime::from_ps(self.subframe.as_ps() * subframe_index)
    }

    pub fn start_time(&self, at: SymbolRef) -> SimTime {
        self.subframe_start(at.subframe_index) + self.boundary_offset(at.symbol_index)
    }

    pub fn end_time(&self, at: SymbolRef) -> SimTime {
        self.subframe_start(at.subframe_index) + self.boundary_offset(at.symbol_index + 1)
    }

    /// Start of the UL-CTRL region in the given subframe.
    pub fn ul_ctrl_start(&self, subframe_index: u64) -> SimTime {
        self.start_time(SymbolRef {
            subframe_index,
            symbol_index: self.n_symbols - self.n_ul_ctrl,
        })
    }

    /// Index of the subframe containing `t`.
    pub fn subframe_at(&self, t: SimTime) -> u64 {
        t.as_ps() / self.subframe.as_ps()
    }

    /// Subframe whose UL-CTRL carries a scheduling request raised at `t`:
    /// the current one if `t` precedes its UL-CTRL, otherwise the next.
    pub fn sr_subframe(&self, t: SimTime) -> u64 {
        let n = self.subframe_at(t);
        if t < self.ul_ctrl_start(n) {
            n
        } else {
            n + 1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pattern(us: u64) -> FramePattern {
        FramePattern::standard(us, TtiMode::Variable).unwrap()
    }

    #[test]
    fn standard_patterns_share_symbol_duration() {
        for (us, n) in [(200, 48), (100, 24), (50, 12)] {
            let f = pattern(us);
            assert_eq!(f.n_symbols(), n);
            assert!((f.symbol_duration_s() - 25.0 / 6.0 * 1e-6).abs() < 1e-15);
        }
    }

    #[test]
    fn data_regions() {
        assert_eq!(pattern(100).data_region(), 1..23);
        assert_eq!(pattern(100).n_data(), 22);
        assert_eq!(pattern(50).data_region(), 1..11);
        assert_eq!(pattern(50).n_data(), 10);
        assert_eq!(pattern(200).data_region(), 1..47);
        assert_eq!(pattern(200).n_data(), 46);
    }

    #[test]
    fn control_overhead_ratios() {
        assert!((pattern(200).control_overhead() - 1.0 / 24.0).abs() < 1e-12);
        assert!((pattern(100).control_overhead() - 1.0 / 12.0).abs() < 1e-12);
        assert!((pattern(50).control_overhead() - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn symbol_end_times() {
        let f = pattern(100);
        let first = f.end_time(SymbolRef { subframe_index: 0, symbol_index: 0 });
        assert_eq!(first.as_ps(), 4_166_666);
        let s22 = f.end_time(SymbolRef { subframe_index: 1, symbol_index: 22 });
        // 100 µs + 23 * 25/6 µs = 195.8333.. µs
        assert_eq!(s22.as_ps(), 195_833_333);
        let f200 = pattern(200);
        let last = f200.end_time(SymbolRef { subframe_index: 0, symbol_index: 47 });
        assert_eq!(last, SimTime::from_us(200));
    }

    #[test]
    fn sr_subframe_follows_ul_ctrl_start() {
        let f = pattern(100);
        assert_eq!(f.ul_ctrl_start(0).as_ps(), 95_833_333);
        assert_eq!(f.sr_subframe(SimTime::from_us(10)), 0);
        assert_eq!(f.sr_subframe(SimTime::from_us(97)), 1);
        assert_eq!(f.sr_subframe(f.ul_ctrl_start(0)), 1);
        assert_eq!(f.sr_subframe(SimTime::from_us(100)), 1);
    }

    #[test]
    fn rejects_bad_numerology() {
        assert_eq!(
            FramePattern::new(SimTime::from_us(10), 2, 1, 1, TtiMode::Variable),
            Err(FrameError::NoDataRegion { dl: 1, ul: 1, total: 2 })
        );
        assert_eq!(
            FramePattern::new(SimTime::ZERO, 12, 1, 1, TtiMode::Variable),
            Err(FrameError::ZeroDuration)
        );
        assert_eq!(
            FramePattern::new(SimTime::from_us(50), 12, 1, 1, TtiMode::Fixed { quantum: 0 }),
            Err(FrameError::ZeroQuantum)
        );
    }

    #[test]
    fn fixed_mode_rounds_to_quantum() {
        let m = TtiMode::Fixed { quantum: 6 };
        assert_eq!(m.round_symbols(1), 6);
        assert_eq!(m.round_symbols(6), 6);
        assert_eq!(m.round_symbols(7), 12);
        assert_eq!(TtiMode::Variable.round_symbols(7), 7);
    }
}
