// Trace-driven session: per-priority quality at three network conditions,
// then the PSNR ladder against a QP ladder.
//
// `cargo run --example simulate`

use std::path::PathBuf;

use tiled_cubemap::session::{compare_policies, run_session, BandwidthTrace, ViewportTrace};
use tiled_cubemap::{load_rate_table, AdaptationConfig, LayoutName, TileLayout};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let layout = TileLayout::new(LayoutName::TiledCubemap1);
    let table = load_rate_table(&fixtures.join("rates_tc1.csv"))?;
    let viewports = ViewportTrace::load(&fixtures.join("viewports_aligned.csv"), 90.0)?;
    let cfg = AdaptationConfig::default();

    for bps in [2e6, 4e6, 10e6] {
        let bandwidth = BandwidthTrace::constant(bps, table.chunks().len())?;
        let report = run_session(&layout, &table, &viewports, &bandwidth, &cfg)?;
        let curve: Vec<String> = report
            .mean_level_by_priority
            .iter()
            .map(|(p, l)| format!("P{p}={l:.2}"))
            .collect();
        println!(
            "{:>4} Mbps: utility {:.3}, PSNR {:.2} dB, {}",
            bps / 1e6,
            report.mean_utility,
            report.mean_weighted_psnr_db.unwrap_or(f64::NAN),
            curve.join(" ")
        );
    }

    let qp = load_rate_table(&fixtures.join("rates_qp_tc1.csv"))?;
    let trace = BandwidthTrace::load(&fixtures.join("bandwidth.csv"))?;
    let cmp = compare_policies(&layout, &table, &qp, &viewports, &trace, &cfg)?;
    println!("PSNR ladder minus QP ladder, per face:");
    for (face, gain) in &cmp.face_psnr_gain_db {
        println!("  {face:>6}: {gain:+.2} dB");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
