#![allow(dead_code)]

use std::path::PathBuf;

use rand::Rng;
use tiled_cubemap::{RateEntry, RateTable, TileLayout};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

/// Random single-chunk table with strictly positive, non-decreasing ladders.
pub fn random_monotone_table(rng: &mut impl Rng, layout: &TileLayout, q_max: u32) -> RateTable {
    let mut entries = Vec::new();
    for &tile in layout.tiles() {
        let mut bitrate = rng.random_range(10_000..300_000u64);
        for level in 0..=q_max {
            entries.push(RateEntry {
                chunk: 0,
                tile,
                level,
                bitrate_bps: bitrate,
                psnr_db: None,
            });
            // occasional flat steps exercise ties
            if rng.random_bool(0.9) {
                bitrate += rng.random_range(1..400_000u64);
            }
        }
    }
    RateTable::from_entries(entries).expect("monotone by construction")
}

/// Sum of every tile's bitrate at `level` in `chunk`.
pub fn uniform_total(table: &RateTable, layout: &TileLayout, chunk: usize, level: u32) -> u64 {
    layout
        .tiles()
        .iter()
        .map(|&t| table.bitrate(chunk, t, level).unwrap())
        .sum()
}

/// Prints one acceptance line and fails the test when `ok` is false.
pub fn verdict(id: u32, name: &str, ok: bool, detail: &str) {
    let tag = if ok { "PASS" } else { "FAIL" };
    println!("[{tag}] criterion {id}: {name} ({detail})");
    assert!(ok, "criterion {id} failed: {name} ({detail})");
}
