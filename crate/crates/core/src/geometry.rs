//! Tile layouts of the tiled cubemap and viewport-driven tile priorities.
//!
//! Each of the four side faces (front, right, back, left) is cut into `S`
//! vertical slices; top and bottom are kept whole. The side slices form an
//! equatorial ring. Walking the ring in order of increasing yaw gives
//! `front_0, front_1, .., right_0, .., back_0, .., left_0, ..`, with slice 0
//! being the western slice of its face. Yaw 0 points at the centre of the
//! front face, so `front_0` starts at -45 degrees.
//!
//! Priorities are one-dimensional on the ring. Tiles whose horizontal span
//! meets the field of view get priority 0, every other ring tile gets its
//! ring distance to the nearest FOV tile, and top/bottom get the priority of
//! the first ring tiles outside the FOV.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Face {
    Front,
    Right,
    Back,
    Left,
    Top,
    Bottom,
}

impl Face {
    pub const ALL: [Face; 6] = [
        Face::Front,
        Face::Right,
        Face::Back,
        Face::Left,
        Face::Top,
        Face::Bottom,
    ];

    /// Side faces in ring order.
    pub const SIDES: [Face; 4] = [Face::Front, Face::Right, Face::Back, Face::Left];

    pub fn is_side(self) -> bool {
        !matches!(self, Face::Top | Face::Bottom)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Face::Front => "front",
            Face::Right => "right",
            Face::Back => "back",
            Face::Left => "left",
            Face::Top => "top",
            Face::Bottom => "bottom",
        }
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A tile of the tiled cubemap: a face plus the slice index within it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TileId {
    face: Face,
    slice: u8,
}

impl TileId {
    pub const TOP: TileId = TileId {
        face: Face::Top,
        slice: 0,
    };
    pub const BOTTOM: TileId = TileId {
        face: Face::Bottom,
        slice: 0,
    };

    /// A side-face slice. Top and bottom only accept slice 0.
    pub fn new(face: Face, slice: u8) -> Result<Self> {
        if !face.is_side() && slice != 0 {
            return Err(Error::Invalid(format!("{face} has no slice {slice}")));
        }
        Ok(TileId { face, slice })
    }

    pub fn face(self) -> Face {
        self.face
    }

    pub fn slice_index(self) -> u8 {
        self.slice
    }
}

impl fmt::Display for TileId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.face.is_side() {
            write!(f, "{}_{}", self.face, self.slice)
        } else {
            f.write_str(self.face.as_str())
        }
    }
}

impl FromStr for TileId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownTile(s.to_string());
        match s {
            "top" => return Ok(TileId::TOP),
            "bottom" => return Ok(TileId::BOTTOM),
            _ => {}
        }
        let (face, slice) = s.rsplit_once('_').ok_or_else(unknown)?;
        let face = Face::SIDES
            .into_iter()
            .find(|f| f.as_str() == face)
            .ok_or_else(unknown)?;
        // reject forms like "front_+1" or "front_01"
        if slice.is_empty() || !slice.bytes().all(|b| b.is_ascii_digit()) || slice.len() > 1 && slice.starts_with('0') {
            return Err(unknown());
        }
        let slice: u8 = slice.parse().map_err(|_| unknown())?;
        Ok(TileId { face, slice })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LayoutName {
    TiledCubemap1,
    TiledCubemap2,
}

impl LayoutName {
    pub fn as_str(self) -> &'static str {
        match self {
            LayoutName::TiledCubemap1 => "tiled_cubemap_1",
            LayoutName::TiledCubemap2 => "tiled_cubemap_2",
        }
    }

    pub fn slices_per_side_face(self) -> u8 {
        match self {
            LayoutName::TiledCubemap1 => 2,
            LayoutName::TiledCubemap2 => 4,
        }
    }
}

impl fmt::Display for LayoutName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LayoutName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tiled_cubemap_1" => Ok(LayoutName::TiledCubemap1),
            "tiled_cubemap_2" => Ok(LayoutName::TiledCubemap2),
            other => Err(Error::UnknownLayout(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TileLayout {
    name: LayoutName,
    slices: u8,
    /// Ring tiles in ring order, then top, then bottom.
    tiles: Vec<TileId>,
    areas: BTreeMap<TileId, f64>,
}

/// Builds one of the two canonical layouts by name.
pub fn build_layout(name: &str) -> Result<TileLayout> {
    Ok(TileLayout::new(name.parse()?))
}

impl TileLayout {
    pub fn new(name: LayoutName) -> Self {
        let slices = name.slices_per_side_face();
        let side_area = 1.0 / (6.0 * f64::from(slices));
        let mut tiles = Vec::with_capacity(4 * usize::from(slices) + 2);
        let mut areas = BTreeMap::new();
        for face in Face::SIDES {
            for slice in 0..slices {
                let t = TileId { face, slice };
                tiles.push(t);
                areas.insert(t, side_area);
            }
        }
        for t in [TileId::TOP, TileId::BOTTOM] {
            tiles.push(t);
            areas.insert(t, 1.0 / 6.0);
        }
        TileLayout {
            name,
            slices,
            tiles,
            areas,
        }
    }

    pub fn name(&self) -> LayoutName {
        self.name
    }

    pub fn slices_per_side_face(&self) -> u8 {
        self.slices
    }

    pub fn tiles(&self) -> &[TileId] {
        &self.tiles
    }

    /// Side tiles in circular ring order.
    pub fn ring(&self) -> &[TileId] {
        &self.tiles[..self.ring_len()]
    }

    pub fn ring_len(&self) -> usize {
        4 * usize::from(self.slices)
    }

    pub fn contains(&self, tile: TileId) -> bool {
        self.areas.contains_key(&tile)
    }

    /// Fraction of the cube surface covered by `tile`, 0 for foreign tiles.
    pub fn area(&self, tile: TileId) -> f64 {
        self.areas.get(&tile).copied().unwrap_or(0.0)
    }

    pub fn ring_position(&self, tile: TileId) -> Option<usize> {
        self.ring().iter().position(|&t| t == tile)
    }

    /// Horizontal width of one ring tile in degrees.
    pub fn tile_span_deg(&self) -> f64 {
        90.0 / f64::from(self.slices)
    }

    /// Half-open yaw span `[start, end)` of a ring tile; `start` lies in
    /// `[-45, 315)`.
    pub fn yaw_span(&self, tile: TileId) -> Option<(f64, f64)> {
        let i = self.ring_position(tile)?;
        let w = self.tile_span_deg();
        let start = -45.0 + i as f64 * w;
        Some((start, start + w))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Viewport {
    yaw_deg: f64,
    pitch_deg: f64,
    hfov_deg: f64,
}

impl Viewport {
    pub const DEFAULT_HFOV_DEG: f64 = 90.0;

    pub fn new(yaw_deg: f64, pitch_deg: f64, hfov_deg: f64) -> Result<Self> {
        if !yaw_deg.is_finite() {
            return Err(Error::Invalid(format!("yaw {yaw_deg} is not finite")));
        }
        if !(-90.0..=90.0).contains(&pitch_deg) {
            return Err(Error::Invalid(format!("pitch {pitch_deg} outside [-90, 90]")));
        }
        if !(hfov_deg > 0.0 && hfov_deg.is_finite()) {
            return Err(Error::Invalid(format!("hfov {hfov_deg} must be positive")));
        }
        Ok(Viewport {
            yaw_deg: yaw_deg.rem_euclid(360.0),
            pitch_deg,
            hfov_deg,
        })
    }

    /// Viewport at `yaw_deg` with zero pitch and the default 90 degree FOV.
    pub fn facing(yaw_deg: f64) -> Result<Self> {
        Self::new(yaw_deg, 0.0, Self::DEFAULT_HFOV_DEG)
    }

    pub fn yaw_deg(&self) -> f64 {
        self.yaw_deg
    }

    pub fn pitch_deg(&self) -> f64 {
        self.pitch_deg
    }

    pub fn hfov_deg(&self) -> f64 {
        self.hfov_deg
    }
}

/// Ring tiles whose yaw span meets the open FOV interval, in ring order.
///
/// Top and bottom are never part of the result. Pitch is ignored.
pub fn fov_tiles(layout: &TileLayout, vp: &Viewport) -> Vec<TileId> {
    if vp.hfov_deg >= 360.0 {
        return layout.ring().to_vec();
    }
    let lo = vp.yaw_deg - vp.hfov_deg / 2.0;
    let hi = vp.yaw_deg + vp.hfov_deg / 2.0;
    let w = layout.tile_span_deg();
    layout
        .ring()
        .iter()
        .enumerate()
        .filter(|&(i, _)| {
            let start = -45.0 + i as f64 * w;
            [-360.0, 0.0, 360.0]
                .iter()
                .any(|shift| start + shift < hi && lo < start + shift + w)
        })
        .map(|(_, &t)| t)
        .collect()
}

/// Per-tile priorities for one viewport; 0 is the most important.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PriorityMap {
    priorities: BTreeMap<TileId, u32>,
}

impl PriorityMap {
    pub fn from_map(priorities: BTreeMap<TileId, u32>) -> Result<Self> {
        if !priorities.values().any(|&p| p == 0) {
            return Err(Error::Invalid("priority map has no priority-0 tile".into()));
        }
        Ok(PriorityMap { priorities })
    }

    pub fn get(&self, tile: TileId) -> Option<u32> {
        self.priorities.get(&tile).copied()
    }

    pub fn max_priority(&self) -> u32 {
        self.priorities.values().copied().max().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (TileId, u32)> + '_ {
        self.priorities.iter().map(|(&t, &p)| (t, p))
    }

    pub fn len(&self) -> usize {
        self.priorities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.priorities.is_empty()
    }
}

pub fn assign_priorities(layout: &TileLayout, vp: &Viewport) -> PriorityMap {
    let ring = layout.ring();
    let n = ring.len();
    let fov: Vec<usize> = fov_tiles(layout, vp)
        .into_iter()
        .filter_map(|t| layout.ring_position(t))
        .collect();

    let mut priorities = BTreeMap::new();
    for (i, &tile) in ring.iter().enumerate() {
        let d = fov
            .iter()
            .map(|&f| {
                let d = i.abs_diff(f);
                d.min(n - d)
            })
            .min()
            .expect("fov is nonempty for hfov > 0");
        priorities.insert(tile, d as u32);
    }
    let poles = if fov.len() == n { 0 } else { 1 };
    priorities.insert(TileId::TOP, poles);
    priorities.insert(TileId::BOTTOM, poles);
    PriorityMap { priorities }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> TileId {
        s.parse().unwrap()
    }

    #[test]
    fn layout_sizes_and_areas() {
        let l1 = build_layout("tiled_cubemap_1").unwrap();
        assert_eq!(l1.tiles().len(), 10);
        assert_eq!(l1.area(t("front_0")), 1.0 / 12.0);
        assert_eq!(l1.area(TileId::TOP), 1.0 / 6.0);
        let sum: f64 = l1.tiles().iter().map(|&x| l1.area(x)).sum();
        assert!((sum - 1.0).abs() < 1e-9);

        let l2 = build_layout("tiled_cubemap_2").unwrap();
        assert_eq!(l2.tiles().len(), 18);
        assert_eq!(l2.area(t("left_3")), 1.0 / 24.0);
        let sum: f64 = l2.tiles().iter().map(|&x| l2.area(x)).sum();
        assert!((sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn unknown_layout_is_rejected() {
        assert!(matches!(
            build_layout("tiled_cubemap_3"),
            Err(Error::UnknownLayout(_))
        ));
    }

    #[test]
    fn ring_order() {
        let l1 = TileLayout::new(LayoutName::TiledCubemap1);
        let names: Vec<String> = l1.ring().iter().map(|t| t.to_string()).collect();
        assert_eq!(
            names,
            ["front_0", "front_1", "right_0", "right_1", "back_0", "back_1", "left_0", "left_1"]
        );
    }

    #[test]
    fn tile_names_round_trip() {
        let l2 = TileLayout::new(LayoutName::TiledCubemap2);
        for &tile in l2.tiles() {
            assert_eq!(tile.to_string().parse::<TileId>().unwrap(), tile);
        }
        for bad in ["top_0", "front", "front_x", "front_01", "side_1", ""] {
            assert!(bad.parse::<TileId>().is_err(), "{bad}");
        }
        assert!(TileId::new(Face::Top, 1).is_err());
    }

    #[test]
    fn viewport_normalizes_yaw() {
        assert_eq!(Viewport::facing(-90.0).unwrap().yaw_deg(), 270.0);
        assert_eq!(Viewport::facing(720.0).unwrap().yaw_deg(), 0.0);
        assert!(Viewport::new(0.0, 91.0, 90.0).is_err());
        assert!(Viewport::new(0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn fov_centered_on_front() {
        let l1 = TileLayout::new(LayoutName::TiledCubemap1);
        let vp = Viewport::facing(0.0).unwrap();
        assert_eq!(fov_tiles(&l1, &vp), vec![t("front_0"), t("front_1")]);
    }

    #[test]
    fn fov_on_face_boundary_takes_both_neighbours() {
        let l1 = TileLayout::new(LayoutName::TiledCubemap1);
        let vp = Viewport::facing(45.0).unwrap();
        // (0, 90) meets front_1 = [0, 45) and right_0 = [45, 90) only
        assert_eq!(fov_tiles(&l1, &vp), vec![t("front_1"), t("right_0")]);
    }

    #[test]
    fn fov_full_circle() {
        let l1 = TileLayout::new(LayoutName::TiledCubemap1);
        let vp = Viewport::new(0.0, 0.0, 360.0).unwrap();
        assert_eq!(fov_tiles(&l1, &vp).len(), 8);
    }

    #[test]
    fn fov_wraps_around_zero() {
        let l1 = TileLayout::new(LayoutName::TiledCubemap1);
        let vp = Viewport::facing(315.0).unwrap();
        assert_eq!(fov_tiles(&l1, &vp), vec![t("front_0"), t("left_1")]);
    }

    #[test]
    fn priorities_layout1_front() {
        let l1 = TileLayout::new(LayoutName::TiledCubemap1);
        let p = assign_priorities(&l1, &Viewport::facing(0.0).unwrap());
        let expected = [
            ("front_0", 0),
            ("front_1", 0),
            ("right_0", 1),
            ("left_1", 1),
            ("right_1", 2),
            ("left_0", 2),
            ("back_0", 3),
            ("back_1", 3),
            ("top", 1),
            ("bottom", 1),
        ];
        for (name, prio) in expected {
            assert_eq!(p.get(t(name)), Some(prio), "{name}");
        }
        assert_eq!(p.len(), 10);
    }

    #[test]
    fn priorities_full_fov_are_all_zero() {
        let l1 = TileLayout::new(LayoutName::TiledCubemap1);
        let p = assign_priorities(&l1, &Viewport::new(0.0, 0.0, 360.0).unwrap());
        assert!(p.iter().all(|(_, prio)| prio == 0));
    }

    #[test]
    fn priorities_layout2_depth() {
        let l2 = TileLayout::new(LayoutName::TiledCubemap2);
        // A 90 degree window spans four 22.5 degree slices, so the far side
        // of the 16-tile ring is 6 steps away.
        let p = assign_priorities(&l2, &Viewport::facing(0.0).unwrap());
        assert_eq!(p.max_priority(), 6);
        // With a 45 degree window only front_1 and front_2 are visible.
        let p = assign_priorities(&l2, &Viewport::new(0.0, 0.0, 45.0).unwrap());
        assert_eq!(p.max_priority(), 7);
    }

    #[test]
    fn pitch_does_not_change_priorities() {
        let l1 = TileLayout::new(LayoutName::TiledCubemap1);
        let a = assign_priorities(&l1, &Viewport::new(30.0, 0.0, 90.0).unwrap());
        let b = assign_priorities(&l1, &Viewport::new(30.0, 80.0, 90.0).unwrap());
        assert_eq!(a, b);
    }
}
