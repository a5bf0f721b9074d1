// Server storage of tiled cubemaps against one offset cubemap per viewport.
//
// `cargo run --example storage`

use std::path::PathBuf;

use tiled_cubemap::load_rate_table;
use tiled_cubemap::storage::{mb_per_min, storage_offset_cubemap, storage_savings_percent, storage_tiled_cubemap, StorageScenario};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let scenario = StorageScenario::default();
    let offset = storage_offset_cubemap(&scenario);
    println!(
        "offset cubemap: {} versions, {:.1} MB/min",
        scenario.offset_versions(),
        mb_per_min(offset, scenario.duration_s)
    );
    for file in ["rates_tc1.csv", "rates_tc2.csv"] {
        let table = load_rate_table(&fixtures.join(file))?;
        let tiled = storage_tiled_cubemap(&table, scenario.duration_s);
        println!(
            "{file}: {:.1} MB/min, offset cubemap needs {:.0}% more",
            mb_per_min(tiled, scenario.duration_s),
            storage_savings_percent(offset, tiled)?
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
