// Adapt one chunk at several bandwidths and show how the quality curve flattens.
//
// `cargo run --example adapt_chunk`

use std::path::PathBuf;

use tiled_cubemap::{adapt_chunk, assign_priorities, load_rate_table, AdaptationConfig, LayoutName, TileLayout, Viewport};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let table = load_rate_table(&fixtures.join("rates_tc1.csv"))?;
    let layout = TileLayout::new(LayoutName::TiledCubemap1);
    let priorities = assign_priorities(&layout, &Viewport::facing(0.0)?);
    let cfg = AdaptationConfig::default();

    println!("{:>10} {:>6} {:>6} {:>8} {:>10}  levels", "bandwidth", "q_max", "sigma", "utility", "used_bps");
    for bps in [1.0e6, 2.0e6, 3.0e6, 4.0e6, 5.0e6] {
        let a = adapt_chunk(&layout, &priorities, &table, 0, bps, &cfg)?;
        let levels: Vec<String> = layout.tiles().iter().map(|&t| a.level(t).unwrap_or_default().to_string()).collect();
        println!(
            "{bps:>10} {:>6} {:>6.1} {:>8.3} {:>10}  {}{}",
            a.q_max_used,
            a.sigma_max,
            a.utility,
            a.total_bitrate_bps,
            levels.join(""),
            if a.feasible { "" } else { "  (infeasible)" }
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
