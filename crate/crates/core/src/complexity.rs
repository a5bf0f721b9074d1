//! Spatial and temporal information (SI/TI) of 8-bit luma sequences.
//!
//! SI is the median over frames of the standard deviation of the Sobel
//! gradient magnitude; TI is the median over consecutive frame pairs of the
//! standard deviation of `current - previous`. Standard deviations are
//! population deviations, the Sobel plane excludes the 1-pixel border, and
//! the median of an even count is the mean of the two middle values.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{Face, TileId, TileLayout};
use crate::rd_model::{check_header, csv_reader, parse_field, record_line};

/// Row-major 2-D buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T: Copy> Plane<T> {
    pub fn new(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::Invalid(format!(
                "plane of {width}x{height} needs {} samples, got {}",
                width * height,
                data.len()
            )));
        }
        Ok(Plane {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> T {
        self.data[y * self.width + x]
    }

    pub fn crop(&self, rect: Rect) -> Result<Plane<T>> {
        let out_of_bounds = || Error::OutOfBounds {
            x: rect.x,
            y: rect.y,
            w: rect.w,
            h: rect.h,
            width: self.width,
            height: self.height,
        };
        let right = rect.x.checked_add(rect.w).ok_or_else(out_of_bounds)?;
        let bottom = rect.y.checked_add(rect.h).ok_or_else(out_of_bounds)?;
        if rect.w == 0 || rect.h == 0 || right > self.width || bottom > self.height {
            return Err(out_of_bounds());
        }
        let data = (rect.y..bottom)
            .flat_map(|y| self.data[y * self.width + rect.x..y * self.width + right].iter().copied())
            .collect();
        Ok(Plane {
            width: rect.w,
            height: rect.h,
            data,
        })
    }
}

/// An 8-bit luma frame of at least 3x3 pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct LumaFrame(Plane<u8>);

impl LumaFrame {
    pub fn new(width: usize, height: usize, samples: Vec<u8>) -> Result<Self> {
        Self::from_plane(Plane::new(width, height, samples)?)
    }

    pub fn from_plane(plane: Plane<u8>) -> Result<Self> {
        if plane.width < 3 || plane.height < 3 {
            return Err(Error::Invalid(format!(
                "luma frame must be at least 3x3, got {}x{}",
                plane.width, plane.height
            )));
        }
        Ok(LumaFrame(plane))
    }

    pub fn width(&self) -> usize {
        self.0.width
    }

    pub fn height(&self) -> usize {
        self.0.height
    }

    pub fn samples(&self) -> &[u8] {
        &self.0.data
    }

    pub fn plane(&self) -> &Plane<u8> {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LumaSequence {
    frames: Vec<LumaFrame>,
}

impl LumaSequence {
    pub fn new(frames: Vec<LumaFrame>) -> Result<Self> {
        let first = frames
            .first()
            .ok_or_else(|| Error::Invalid("luma sequence has no frames".into()))?;
        let (w, h) = (first.width(), first.height());
        if let Some(f) = frames.iter().find(|f| f.width() != w || f.height() != h) {
            return Err(Error::DimensionMismatch(w, h, f.width(), f.height()));
        }
        Ok(LumaSequence { frames })
    }

    pub fn frames(&self) -> &[LumaFrame] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn width(&self) -> usize {
        self.frames[0].width()
    }

    pub fn height(&self) -> usize {
        self.frames[0].height()
    }

    /// Reads raw planar 8-bit luma. With `frames = Some(n)` the input must be
    /// exactly `n` frames long; with `None` it must be a whole number of
    /// frames.
    pub fn read_raw(
        mut rdr: impl Read,
        width: usize,
        height: usize,
        frames: Option<usize>,
    ) -> Result<Self> {
        let mut buf = Vec::new();
        rdr.read_to_end(&mut buf)
            .map_err(|e| Error::io("<raw luma>", e))?;
        let frame_len = width
            .checked_mul(height)
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::Invalid(format!("bad frame size {width}x{height}")))?;
        let count = match frames {
            Some(n) if n * frame_len == buf.len() && n > 0 => n,
            Some(n) => {
                return Err(Error::Invalid(format!(
                    "raw input has {} bytes, expected {n} frames of {width}x{height} = {} bytes",
                    buf.len(),
                    n * frame_len
                )))
            }
            None if buf.len() % frame_len == 0 && !buf.is_empty() => buf.len() / frame_len,
            None => {
                return Err(Error::Invalid(format!(
                    "raw input has {} bytes, not a whole number of {width}x{height} frames",
                    buf.len()
                )))
            }
        };
        let frames = buf
            .chunks_exact(frame_len)
            .take(count)
            .map(|c| LumaFrame::new(width, height, c.to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(frames)
    }

    pub fn load_raw(path: &Path, width: usize, height: usize, frames: Option<usize>) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_raw(std::io::BufReader::new(file), width, height, frames)
    }

    /// Crops every frame to `rect`.
    pub fn crop(&self, rect: Rect) -> Result<LumaSequence> {
        let frames = self
            .frames
            .iter()
            .map(|f| LumaFrame::from_plane(f.plane().crop(rect)?))
            .collect::<Result<Vec<_>>>()?;
        LumaSequence::new(frames)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiTi {
    pub si: f64,
    pub ti: f64,
}

/// Sobel gradient magnitude over the interior of `frame`; the result is
/// `(width - 2) x (height - 2)`.
pub fn sobel_magnitude(frame: &LumaFrame) -> Plane<f64> {
    let p = frame.plane();
    let (w, h) = (p.width, p.height);
    let px = |x: usize, y: usize| i32::from(p.data[y * w + x]);
    let mut data = Vec::with_capacity((w - 2) * (h - 2));
    for y in 1..h - 1 {
        for x in 1..w - 1 {
            let gx = -px(x - 1, y - 1) + px(x + 1, y - 1) - 2 * px(x - 1, y) + 2 * px(x + 1, y)
                - px(x - 1, y + 1)
                + px(x + 1, y + 1);
            let gy = -px(x - 1, y - 1) - 2 * px(x, y - 1) - px(x + 1, y - 1)
                + px(x - 1, y + 1)
                + 2 * px(x, y + 1)
                + px(x + 1, y + 1);
            data.push(f64::from(gx * gx + gy * gy).sqrt());
        }
    }
    Plane {
        width: w - 2,
        height: h - 2,
        data,
    }
}

/// `current - previous`, elementwise.
pub fn frame_difference(previous: &LumaFrame, current: &LumaFrame) -> Result<Plane<i16>> {
    if previous.width() != current.width() || previous.height() != current.height() {
        return Err(Error::DimensionMismatch(
            previous.width(),
            previous.height(),
            current.width(),
            current.height(),
        ));
    }
    let data = previous
        .samples()
        .iter()
        .zip(current.samples())
        .map(|(&a, &b)| i16::from(b) - i16::from(a))
        .collect();
    Ok(Plane {
        width: current.width(),
        height: current.height(),
        data,
    })
}

/// Population standard deviation; 0 for an empty slice.
pub fn std_dev(values: impl IntoIterator<Item = f64> + Clone) -> f64 {
    let (n, sum) = values
        .clone()
        .into_iter()
        .fold((0usize, 0.0), |(n, s), v| (n + 1, s + v));
    if n == 0 {
        return 0.0;
    }
    let mean = sum / n as f64;
    let ss: f64 = values.into_iter().map(|v| (v - mean) * (v - mean)).sum();
    (ss / n as f64).sqrt()
}

/// Median; the mean of the two middle values for even counts, 0 when empty.
pub fn median(mut values: Vec<f64>) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / 2.0
    }
}

pub fn compute_siti(seq: &LumaSequence) -> SiTi {
    let si = median(
        seq.frames
            .iter()
            .map(|f| std_dev(sobel_magnitude(f).data.iter().copied()))
            .collect(),
    );
    let ti = median(
        seq.frames
            .windows(2)
            .map(|pair| {
                let diff = frame_difference(&pair[0], &pair[1]).expect("uniform dimensions");
                std_dev(diff.data.iter().map(|&d| f64::from(d)))
            })
            .collect(),
    );
    SiTi { si, ti }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

/// Pixel rectangle of every tile inside an unfolded cubemap frame.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TileGeometry {
    rects: BTreeMap<TileId, Rect>,
}

impl TileGeometry {
    pub fn new(rects: BTreeMap<TileId, Rect>) -> Self {
        TileGeometry { rects }
    }

    /// Standard 3x2 unfolding with square faces of `face_px` pixels:
    /// `left front right` on the top row, `bottom back top` below. Side faces
    /// are cut into equal vertical slices, slice 0 leftmost.
    pub fn unfolded_3x2(layout: &TileLayout, face_px: usize) -> Result<Self> {
        let s = usize::from(layout.slices_per_side_face());
        if face_px == 0 || !face_px.is_multiple_of(s) {
            return Err(Error::Invalid(format!(
                "face size {face_px} is not divisible into {s} slices"
            )));
        }
        let origin = |face: Face| match face {
            Face::Left => (0, 0),
            Face::Front => (1, 0),
            Face::Right => (2, 0),
            Face::Bottom => (0, 1),
            Face::Back => (1, 1),
            Face::Top => (2, 1),
        };
        let slice_w = face_px / s;
        let rects = layout
            .tiles()
            .iter()
            .map(|&tile| {
                let (col, row) = origin(tile.face());
                let (x0, y0) = (col * face_px, row * face_px);
                let rect = if tile.face().is_side() {
                    Rect {
                        x: x0 + usize::from(tile.slice_index()) * slice_w,
                        y: y0,
                        w: slice_w,
                        h: face_px,
                    }
                } else {
                    Rect {
                        x: x0,
                        y: y0,
                        w: face_px,
                        h: face_px,
                    }
                };
                (tile, rect)
            })
            .collect();
        Ok(TileGeometry { rects })
    }

    pub fn rect(&self, tile: TileId) -> Option<Rect> {
        self.rects.get(&tile).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (TileId, Rect)> + '_ {
        self.rects.iter().map(|(&t, &r)| (t, r))
    }

    /// Reads a `tile,x,y,w,h` sidecar.
    pub fn from_reader(rdr: impl Read) -> Result<Self> {
        let mut reader = csv_reader(rdr);
        check_header(&mut reader, &["tile", "x", "y", "w", "h"], &[])?;
        let mut rects = BTreeMap::new();
        for record in reader.records() {
            let record = record?;
            let line = record_line(&record);
            let tile: TileId = record
                .get(0)
                .unwrap_or_default()
                .parse()
                .map_err(|e: Error| Error::parse(line, e.to_string()))?;
            let rect = Rect {
                x: parse_field(&record, 1, "x", line)?,
                y: parse_field(&record, 2, "y", line)?,
                w: parse_field(&record, 3, "w", line)?,
                h: parse_field(&record, 4, "h", line)?,
            };
            if rects.insert(tile, rect).is_some() {
                return Err(Error::parse(line, format!("duplicate tile {tile}")));
            }
        }
        Ok(TileGeometry { rects })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(file).map_err(|e| e.with_path(path))
    }
}

/// Crops the pixels of `tile` out of an unfolded cubemap frame.
pub fn tile_crop(frame: &LumaFrame, geometry: &TileGeometry, tile: TileId) -> Result<LumaFrame> {
    let rect = geometry
        .rect(tile)
        .ok_or_else(|| Error::Invalid(format!("geometry has no rectangle for {tile}")))?;
    LumaFrame::from_plane(frame.plane().crop(rect)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::LayoutName;

    fn frame_from(w: usize, h: usize, f: impl Fn(usize, usize) -> u8) -> LumaFrame {
        let data = (0..h).flat_map(|y| (0..w).map(move |x| (x, y))).map(|(x, y)| f(x, y)).collect();
        LumaFrame::new(w, h, data).unwrap()
    }

    #[test]
    fn frame_invariants() {
        assert!(LumaFrame::new(2, 5, vec![0; 10]).is_err());
        assert!(LumaFrame::new(3, 3, vec![0; 8]).is_err());
        let a = frame_from(3, 3, |_, _| 0);
        let b = frame_from(4, 3, |_, _| 0);
        assert!(matches!(
            LumaSequence::new(vec![a, b]),
            Err(Error::DimensionMismatch(3, 3, 4, 3))
        ));
        assert!(LumaSequence::new(vec![]).is_err());
    }

    #[test]
    fn sobel_constant_is_zero() {
        let m = sobel_magnitude(&frame_from(8, 6, |_, _| 128));
        assert_eq!((m.width(), m.height()), (6, 4));
        assert!(m.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sobel_horizontal_ramp() {
        let m = sobel_magnitude(&frame_from(10, 7, |x, _| x as u8));
        assert!(m.data().iter().all(|&v| v == 8.0));
    }

    #[test]
    fn sobel_single_bright_pixel() {
        // 5x5 zeros with 1 at the centre; interior is the 3x3 around it.
        // Hand convolution: corners (gx, gy) = (+-1, +-1), edge-centres 2,
        // centre 0.
        let m = sobel_magnitude(&frame_from(5, 5, |x, y| u8::from(x == 2 && y == 2)));
        let r2 = 2f64.sqrt();
        let expected = [r2, 2.0, r2, 2.0, 0.0, 2.0, r2, 2.0, r2];
        assert_eq!(m.data(), &expected);
    }

    #[test]
    fn difference_is_current_minus_previous() {
        let prev = frame_from(4, 3, |x, _| x as u8 * 10);
        let cur = frame_from(4, 3, |x, _| x as u8 * 10 + 10);
        let d = frame_difference(&prev, &cur).unwrap();
        assert!(d.data().iter().all(|&v| v == 10));
        let d = frame_difference(&cur, &prev).unwrap();
        assert!(d.data().iter().all(|&v| v == -10));
        let same = frame_difference(&prev, &prev).unwrap();
        assert!(same.data().iter().all(|&v| v == 0));
        let other = frame_from(3, 3, |_, _| 0);
        assert!(frame_difference(&prev, &other).is_err());
    }

    #[test]
    fn median_and_std() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 3.0, 2.0]), 2.5);
        assert_eq!(median(vec![]), 0.0);
        assert_eq!(std_dev([2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]), 2.0);
        assert_eq!(std_dev([5.0]), 0.0);
    }

    #[test]
    fn siti_of_constant_sequence() {
        let seq = LumaSequence::new(vec![frame_from(6, 6, |_, _| 77); 10]).unwrap();
        assert_eq!(compute_siti(&seq), SiTi { si: 0.0, ti: 0.0 });
    }

    #[test]
    fn siti_of_static_texture() {
        let f = frame_from(9, 9, |x, y| ((x * 31 + y * 17) % 251) as u8);
        let seq = LumaSequence::new(vec![f; 10]).unwrap();
        let s = compute_siti(&seq);
        assert_eq!(s.ti, 0.0);
        assert!(s.si > 0.0);
    }

    #[test]
    fn single_frame_has_zero_ti() {
        let seq = LumaSequence::new(vec![frame_from(5, 5, |x, y| (x * y) as u8)]).unwrap();
        assert_eq!(compute_siti(&seq).ti, 0.0);
    }

    #[test]
    fn crop_small_plane() {
        let p = Plane::new(4, 4, (0u8..16).collect()).unwrap();
        let c = p.crop(Rect { x: 1, y: 2, w: 2, h: 2 }).unwrap();
        assert_eq!(c.data(), &[9, 10, 13, 14]);
        let full = p.crop(Rect { x: 0, y: 0, w: 4, h: 4 }).unwrap();
        assert_eq!(full, p);
        assert!(matches!(
            p.crop(Rect { x: 3, y: 0, w: 2, h: 1 }),
            Err(Error::OutOfBounds { .. })
        ));
    }

    #[test]
    fn unfolded_sidecar_tiles_the_frame() {
        for name in [LayoutName::TiledCubemap1, LayoutName::TiledCubemap2] {
            let layout = TileLayout::new(name);
            let face = 8;
            let geo = TileGeometry::unfolded_3x2(&layout, face).unwrap();
            let mut hits = vec![0u8; 3 * face * 2 * face];
            for (_, r) in geo.iter() {
                for y in r.y..r.y + r.h {
                    for x in r.x..r.x + r.w {
                        hits[y * 3 * face + x] += 1;
                    }
                }
            }
            assert_eq!(geo.iter().count(), layout.tiles().len());
            assert!(hits.iter().all(|&h| h == 1), "{name}");
        }
        let l2 = TileLayout::new(LayoutName::TiledCubemap2);
        assert!(TileGeometry::unfolded_3x2(&l2, 10).is_err());
    }

    #[test]
    fn sidecar_csv() {
        let text = "tile,x,y,w,h\nfront_0,0,0,4,8\ntop,4,0,8,8\n";
        let geo = TileGeometry::from_reader(text.as_bytes()).unwrap();
        assert_eq!(geo.rect(TileId::TOP), Some(Rect { x: 4, y: 0, w: 8, h: 8 }));
        let frame = frame_from(12, 8, |x, _| x as u8);
        let crop = tile_crop(&frame, &geo, TileId::TOP).unwrap();
        assert_eq!(crop.samples()[0], 4);
        assert!(tile_crop(&frame, &geo, TileId::BOTTOM).is_err());
    }

    #[test]
    fn raw_length_must_match() {
        let bytes = [0u8; 3 * 3 * 4];
        assert_eq!(LumaSequence::read_raw(&bytes[..], 3, 3, None).unwrap().len(), 4);
        assert_eq!(LumaSequence::read_raw(&bytes[..], 3, 3, Some(4)).unwrap().len(), 4);
        assert!(LumaSequence::read_raw(&bytes[..], 3, 3, Some(3)).is_err());
        assert!(LumaSequence::read_raw(&bytes[..35], 3, 3, None).is_err());
    }
}
