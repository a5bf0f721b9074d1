// Spatial and temporal information of a synthetic cubemap clip, per tile.
//
// `cargo run --example siti`

use tiled_cubemap::complexity::{compute_siti, tile_crop, LumaFrame, LumaSequence, TileGeometry};
use tiled_cubemap::{LayoutName, TileLayout};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let face = 32;
    let (w, h) = (3 * face, 2 * face);
    // a still left half next to a panning right half
    let frames = (0..12)
        .map(|n| {
            let samples = (0..h)
                .flat_map(|y| (0..w).map(move |x| (x, y)))
                .map(|(x, y)| {
                    if x < w / 2 {
                        ((x * 7 + y * 3) % 64) as u8 + 40
                    } else {
                        let phase = (x + 3 * n) as f64 * 0.4;
                        (120.0 + 60.0 * phase.sin()) as u8 + (y % 9) as u8
                    }
                })
                .collect();
            LumaFrame::new(w, h, samples)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let clip = LumaSequence::new(frames)?;
    let whole = compute_siti(&clip);
    println!("full frame: SI {:.2}, TI {:.2}", whole.si, whole.ti);

    let layout = TileLayout::new(LayoutName::TiledCubemap1);
    let geometry = TileGeometry::unfolded_3x2(&layout, face)?;
    for (tile, _) in geometry.iter() {
        let crops = clip
            .frames()
            .iter()
            .map(|f| tile_crop(f, &geometry, tile))
            .collect::<Result<Vec<_>, _>>()?;
        let s = compute_siti(&LumaSequence::new(crops)?);
        println!("{tile:>8}: SI {:>6.2}, TI {:>6.2}", s.si, s.ti);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
