// Compare the sigma scan with the exhaustive search on random rate tables.
//
// `cargo run --release --example oracle_check`

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tiled_cubemap::{
    adapt_chunk, assign_priorities, optimize_exhaustive, AdaptationConfig, LayoutName, QualityLadder, RateEntry,
    RateTable, TileLayout, Viewport,
};

fn random_table(rng: &mut ChaCha8Rng, layout: &TileLayout) -> Result<RateTable, tiled_cubemap::Error> {
    let mut entries = Vec::new();
    for &tile in layout.tiles() {
        let mut bitrate = rng.random_range(10_000..300_000u64);
        for level in 0..=5 {
            entries.push(RateEntry { chunk: 0, tile, level, bitrate_bps: bitrate, psnr_db: None });
            bitrate += rng.random_range(0..400_000u64);
        }
    }
    RateTable::from_entries(entries)
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cfg = AdaptationConfig::default();
    let ladder = QualityLadder::default();
    for name in [LayoutName::TiledCubemap1, LayoutName::TiledCubemap2] {
        let layout = TileLayout::new(name);
        let (mut same, mut gaps, mut worst) = (0, 0, 0.0f64);
        for _ in 0..200 {
            let table = random_table(&mut rng, &layout)?;
            let total = |level| layout.tiles().iter().map(|&t| table.bitrate(0, t, level)).sum::<Result<u64, _>>();
            let budget = rng.random_range(total(0)?..=total(5)?) as f64;
            let pm = assign_priorities(&layout, &Viewport::facing(rng.random_range(0.0..360.0))?);
            let scan = adapt_chunk(&layout, &pm, &table, 0, budget, &cfg)?;
            let best = optimize_exhaustive(&layout, &pm, &table, 0, budget, &ladder, &cfg)?;
            if (scan.q_max_used, scan.utility) == (best.q_max_used, best.utility) {
                same += 1;
            } else {
                gaps += 1;
                worst = worst.max(best.utility - scan.utility);
            }
        }
        println!("{}: {same} identical, {gaps} where the finer grid gains utility (max gain {worst:.3})", name.as_str());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
