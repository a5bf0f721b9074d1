// Fit a six-level PSNR ladder to an R-D sweep and print one tile's ladder.
//
// `cargo run --example ladder_fit`

use std::path::PathBuf;

use tiled_cubemap::{fit_ladder, QualityLadder, RdSweep, TileId};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let sweep = RdSweep::load(&fixtures.join("rd_sweep_tc1.csv"))?;
    let ladder = QualityLadder::default();
    let table = fit_ladder(&sweep, &ladder)?;

    println!("{} entries across chunks {:?}", table.len(), table.chunks());
    for tile in [TileId::TOP, "front_0".parse()?] {
        println!("chunk 0, {tile}:");
        for level in 0..=ladder.q_max() {
            println!(
                "  level {level}: target {:>4} dB -> {:>8} bps at {:.2} dB",
                ladder.target_db(level).unwrap_or_default(),
                table.bitrate(0, tile, level)?,
                table.psnr_db(0, tile, level).unwrap_or(f64::NAN),
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
