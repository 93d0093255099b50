use std::str::FromStr;

use super::ChannelError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McsEntry {
    pub index: usize,
    /// bits/s/Hz
    pub spectral_eff: f64,
    pub min_sinr_db: f64,
}

impl McsEntry {
    pub fn is_outage(&self) -> bool {
        self.index == 0
    }
}

/// Ordered link-adaptation table. Entry 0 is the outage entry.
#[derive(Debug, Clone, PartialEq)]
pub struct McsTable {
    entries: Vec<McsEntry>,
}

const OUTAGE: McsEntry = McsEntry {
    index: 0,
    spectral_eff: 0.0,
    min_sinr_db: f64::NEG_INFINITY,
};

impl Default for McsTable {
    fn default() -> Self {
        McsTable::from_pairs(&[
            (0.2, -6.0),
            (0.5, -3.0),
            (1.0, 1.0),
            (1.5, 5.0),
            (2.0, 8.0),
            (3.0, 12.0),
            (4.0, 16.0),
            (4.8, 20.0),
        ])
        .expect("default table is ordered")
    }
}

impl McsTable {
    /// Builds a table from `(spectral_eff, min_sinr_db)` pairs for indices 1.. .
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self, ChannelError> {
        if pairs.is_empty() {
            return Err(ChannelError::BadMcsTable("no entries".into()));
        }
        let mut entries = vec![OUTAGE];
        for (i, &(eff, sinr)) in pairs.iter().enumerate() {
            let prev = entries[i];
            if !(eff > prev.spectral_eff) || !(sinr > prev.min_sinr_db) || !sinr.is_finite() {
                return Err(ChannelError::BadMcsTable(format!(
                    "entry {} ({eff} @ {sinr} dB) is not strictly above its predecessor",
                    i + 1
                )));
            }
            entries.push(McsEntry {
                index: i + 1,
                spectral_eff: eff,
                min_sinr_db: sinr,
            });
        }
        Ok(McsTable { entries })
    }

    pub fn entries(&self) -> &[McsEntry] {
        &self.entries
    }

    pub fn entry(&self, index: usize) -> McsEntry {
        self.entries[index]
    }

    pub fn max_index(&self) -> usize {
        self.entries.len() - 1
    }

    /// Highest entry whose threshold is at or below `sinr_db`.
    pub fn select(&self, sinr_db: f64) -> McsEntry {
        self.entries
            .iter()
            .rev()
            .find(|e| e.min_sinr_db <= sinr_db)
            .copied()
            .unwrap_or(OUTAGE)
    }
}

/// Parses `eff@sinr,eff@sinr,...`.
impl FromStr for McsTable {
    type Err = ChannelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut pairs = Vec::new();
        for item in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (eff, sinr) = item
                .split_once('@')
                .ok_or_else(|| ChannelError::BadMcsTable(format!("expected eff@sinr, got '{item}'")))?;
            let parse = |v: &str| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| ChannelError::BadMcsTable(format!("bad number '{v}'")))
            };
            pairs.push((parse(eff)?, parse(sinr)?));
        }
        McsTable::from_pairs(&pairs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection_examples() {
        let t = McsTable::default();
        let top = t.select(35.6);
        assert_eq!(top.index, 8);
        assert_eq!(top.spectral_eff, 4.8);
        assert!(t.select(-10.0).is_outage());
        assert_eq!(t.select(5.0).index, 4);
        assert_eq!(t.select(4.999).index, 3);
    }

    #[test]
    fn default_table_is_strictly_increasing() {
        let t = McsTable::default();
        assert_eq!(t.max_index(), 8);
        for w in t.entries().windows(2) {
            assert!(w[1].spectral_eff > w[0].spectral_eff);
            assert!(w[1].min_sinr_db > w[0].min_sinr_db);
        }
    }

    #[test]
    fn parse_and_reject() {
        let t: McsTable = "0.5@-2, 2.0@6".parse().unwrap();
        assert_eq!(t.max_index(), 2);
        assert_eq!(t.select(6.0).spectral_eff, 2.0);
        assert!("1.0@5,0.5@8".parse::<McsTable>().is_err());
        assert!("1.0@5,2.0@4".parse::<McsTable>().is_err());
        assert!("1.0".parse::<McsTable>().is_err());
        assert!("".parse::<McsTable>().is_err());
    }
}
