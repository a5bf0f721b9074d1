// Tile priorities for a viewer turning around the sphere.
//
// `cargo run --example priorities`

use tiled_cubemap::{assign_priorities, fov_tiles, LayoutName, TileLayout, Viewport};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for name in [LayoutName::TiledCubemap1, LayoutName::TiledCubemap2] {
        let layout = TileLayout::new(name);
        println!("{} ({} tiles)", name.as_str(), layout.tiles().len());
        for yaw in [0.0, 30.0, 135.0, 300.0] {
            let vp = Viewport::facing(yaw)?;
            let pm = assign_priorities(&layout, &vp);
            let visible: Vec<String> = fov_tiles(&layout, &vp).iter().map(|t| t.to_string()).collect();
            let row: Vec<String> = layout
                .tiles()
                .iter()
                .map(|&t| format!("{t}={}", pm.get(t).unwrap_or_default()))
                .collect();
            println!("  yaw {yaw:>5}: fov [{}]", visible.join(" "));
            println!("             {}", row.join(" "));
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
