//! Frozen ratio bands and the regression check against them.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{HarnessError, Result};

/// Multiplicative slack applied around frozen bands in check mode.
pub const BAND_SLACK: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub min: f64,
    pub max: f64,
}

/// Ratio bands per `(family, p, τ, ᾱ)` group, created only by freeze runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Baseline {
    pub suite: String,
    pub seed: u64,
    pub slack: f64,
    pub bands: BTreeMap<String, Band>,
}

impl Baseline {
    pub fn new(suite: &str, seed: u64) -> Self {
        Baseline {
            suite: suite.to_string(),
            seed,
            slack: BAND_SLACK,
            bands: BTreeMap::new(),
        }
    }

    /// Widen (or create) the band for `key` to cover `ratio`.
    pub fn absorb(&mut self, key: &str, ratio: f64) {
        let band = self.bands.entry(key.to_string()).or_insert(Band {
            min: ratio,
            max: ratio,
        });
        band.min = band.min.min(ratio);
        band.max = band.max.max(ratio);
    }

    /// Whether `ratio` lies within the frozen band for `key`, widened by the
    /// recorded slack.
    pub fn check(&self, key: &str, ratio: f64) -> Result<bool> {
        let band = self
            .bands
            .get(key)
            .ok_or_else(|| HarnessError::MissingBand(key.to_string()))?;
        if !ratio.is_finite() {
            return Ok(false);
        }
        Ok(ratio >= band.min * (1.0 - self.slack) && ratio <= band.max * (1.0 + self.slack))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&crate::read_file(path)?)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        crate::write_file(path, &text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn absorb_and_check() {
        let mut b = Baseline::new("test", 1);
        b.absorb("k", 1.0);
        b.absorb("k", 2.0);
        assert!(b.check("k", 1.5).unwrap());
        assert!(b.check("k", 0.76).unwrap());
        assert!(!b.check("k", 0.74).unwrap());
        assert!(!b.check("k", 2.51).unwrap());
        assert!(!b.check("k", f64::INFINITY).unwrap());
        assert!(matches!(
            b.check("absent", 1.0),
            Err(HarnessError::MissingBand(_))
        ));
    }

    #[test]
    fn file_round_trip() {
        let mut b = Baseline::new("test", 9);
        b.absorb("a|2|2|1x1", 0.5);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("b.json");
        b.save(&path).unwrap();
        assert_eq!(Baseline::load(&path).unwrap(), b);
    }
}
