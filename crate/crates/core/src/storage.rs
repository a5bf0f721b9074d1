//! Server storage for tiled cubemaps versus per-viewport offset cubemaps.
//!
//! An offset cubemap needs one encode per (viewport, bandwidth profile)
//! pair. Tiles are stored once per ladder level and shared by every
//! viewport. Sizes are in bytes; megabytes are decimal.

use crate::error::{Error, Result};
use crate::rd_model::RateTable;

#[derive(Debug, Clone, PartialEq)]
pub struct StorageScenario {
    pub n_viewports: u32,
    pub ladder_levels: u32,
    pub duration_s: f64,
    /// One bitrate per bandwidth profile.
    pub offset_bitrates_bps: Vec<f64>,
}

impl StorageScenario {
    pub fn new(n_viewports: u32, offset_bitrates_bps: Vec<f64>, duration_s: f64) -> Result<Self> {
        let s = StorageScenario {
            n_viewports,
            ladder_levels: 6,
            duration_s,
            offset_bitrates_bps,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_viewports == 0 || self.ladder_levels == 0 || self.offset_bitrates_bps.is_empty() {
            return Err(Error::Invalid("storage counts must be at least 1".into()));
        }
        if self.offset_bitrates_bps.iter().any(|&b| !(b > 0.0 && b.is_finite())) {
            return Err(Error::Invalid("offset bitrates must be positive".into()));
        }
        if !(self.duration_s > 0.0 && self.duration_s.is_finite()) {
            return Err(Error::Invalid(format!("duration {} must be positive", self.duration_s)));
        }
        Ok(())
    }

    pub fn n_profiles(&self) -> u32 {
        self.offset_bitrates_bps.len() as u32
    }

    /// Number of offset-cubemap encodes the server keeps.
    pub fn offset_versions(&self) -> u32 {
        self.n_viewports * self.n_profiles()
    }
}

impl Default for StorageScenario {
    /// 30 viewports, profiles of 2, 4 and 10 Mbps, one minute.
    fn default() -> Self {
        StorageScenario {
            n_viewports: 30,
            ladder_levels: 6,
            duration_s: 60.0,
            offset_bitrates_bps: vec![2e6, 4e6, 10e6],
        }
    }
}

pub fn storage_offset_cubemap(s: &StorageScenario) -> f64 {
    let per_viewport: f64 = s
        .offset_bitrates_bps
        .iter()
        .map(|b| b * s.duration_s / 8.0)
        .sum();
    f64::from(s.n_viewports) * per_viewport
}

/// Bytes needed to store every entry of `table`, scaled from the span the
/// table covers to `duration_s`.
pub fn storage_tiled_cubemap(table: &RateTable, duration_s: f64) -> f64 {
    let chunks = table.chunks().len();
    if chunks == 0 {
        return 0.0;
    }
    let chunk_s = table.chunk_duration_s();
    let bits: f64 = table
        .entries()
        .map(|e| e.bitrate_bps as f64 * chunk_s)
        .sum();
    let covered_s = chunks as f64 * chunk_s;
    bits / 8.0 * (duration_s / covered_s)
}

/// `100 * (offset - tiled) / tiled`, i.e. how much more the offset cubemap
/// needs, relative to the tiled layout.
pub fn storage_savings_percent(offset_bytes: f64, tiled_bytes: f64) -> Result<f64> {
    if tiled_bytes == 0.0 {
        return Err(Error::Invalid("tiled storage is zero".into()));
    }
    Ok(100.0 * (offset_bytes - tiled_bytes) / tiled_bytes)
}

/// Decimal megabytes per minute.
pub fn mb_per_min(bytes: f64, duration_s: f64) -> f64 {
    bytes / 1e6 / (duration_s / 60.0)
}
