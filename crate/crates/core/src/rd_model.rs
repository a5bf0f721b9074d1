//! Quality ladders, rate tables and ladder fitting from R-D sweeps.
//!
//! A [`RateTable`] maps `(chunk, tile, level)` to an average bitrate in bits
//! per second. Tables built from a manifest are checked strictly: every
//! `(chunk, tile)` must carry the full ladder and bitrates must not drop as
//! the level rises. Tables produced by [`fit_ladder`] come from noisy sweeps
//! and are repaired into monotone shape instead.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{TileId, TileLayout};

/// Default chunk duration in seconds.
pub const DEFAULT_CHUNK_DURATION_S: f64 = 4.0;

/// PSNR targets (dB) for levels 0..=5.
pub const DEFAULT_PSNR_TARGETS_DB: [f64; 6] = [38.0, 39.0, 40.0, 42.0, 45.0, 48.0];

#[derive(Debug, Clone, PartialEq)]
pub struct QualityLadder {
    targets_db: Vec<f64>,
}

impl QualityLadder {
    /// `targets_db[level]` is the PSNR target of that level.
    pub fn new(targets_db: Vec<f64>) -> Result<Self> {
        if targets_db.is_empty() {
            return Err(Error::Invalid("quality ladder needs at least one level".into()));
        }
        if targets_db.iter().any(|t| !t.is_finite()) {
            return Err(Error::Invalid("ladder targets must be finite".into()));
        }
        if targets_db.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Invalid(format!(
                "ladder targets must strictly increase with level: {targets_db:?}"
            )));
        }
        Ok(QualityLadder { targets_db })
    }

    pub fn q_max(&self) -> u32 {
        (self.targets_db.len() - 1) as u32
    }

    pub fn target_db(&self, level: u32) -> Option<f64> {
        self.targets_db.get(level as usize).copied()
    }

    pub fn targets_db(&self) -> &[f64] {
        &self.targets_db
    }
}

impl Default for QualityLadder {
    fn default() -> Self {
        QualityLadder {
            targets_db: DEFAULT_PSNR_TARGETS_DB.to_vec(),
        }
    }
}

/// One encoded version of a tile: quantizer, bitrate and resulting PSNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RdPoint {
    pub qp: i32,
    pub bitrate_bps: u64,
    pub psnr_db: f64,
}

impl RdPoint {
    pub fn new(qp: i32, bitrate_bps: u64, psnr_db: f64) -> Result<Self> {
        if bitrate_bps == 0 {
            return Err(Error::Invalid("R-D point bitrate must be positive".into()));
        }
        if !(psnr_db > 0.0 && psnr_db < 100.0) {
            return Err(Error::Invalid(format!("R-D point PSNR {psnr_db} outside (0, 100)")));
        }
        Ok(RdPoint {
            qp,
            bitrate_bps,
            psnr_db,
        })
    }
}

/// Rate-distortion points grouped by `(chunk, tile)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RdSweep {
    points: BTreeMap<(usize, TileId), Vec<RdPoint>>,
}

impl RdSweep {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, chunk: usize, tile: TileId, point: RdPoint) {
        self.points.entry((chunk, tile)).or_default().push(point);
    }

    /// Registers a `(chunk, tile)` key, possibly without points.
    pub fn insert(&mut self, chunk: usize, tile: TileId, points: Vec<RdPoint>) {
        self.points.insert((chunk, tile), points);
    }

    pub fn points(&self, chunk: usize, tile: TileId) -> Option<&[RdPoint]> {
        self.points.get(&(chunk, tile)).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, TileId), &[RdPoint])> + '_ {
        self.points.iter().map(|(&k, v)| (k, v.as_slice()))
    }

    /// Fails with the first `(chunk, tile)` of `layout` that has no points,
    /// for every chunk that appears in the sweep.
    pub fn require_layout(&self, layout: &TileLayout) -> Result<()> {
        let mut chunks: Vec<usize> = self.points.keys().map(|&(c, _)| c).collect();
        chunks.dedup();
        for chunk in chunks {
            for &tile in layout.tiles() {
                if self.points(chunk, tile).is_none_or(|p| p.is_empty()) {
                    return Err(Error::EmptyPoints { chunk, tile });
                }
            }
        }
        Ok(())
    }

    /// Reads a `chunk,tile,qp,bitrate_bps,psnr_db` CSV.
    pub fn from_reader(rdr: impl Read) -> Result<Self> {
        let mut reader = csv_reader(rdr);
        check_header(&mut reader, &["chunk", "tile", "qp", "bitrate_bps", "psnr_db"], &[])?;
        let mut sweep = RdSweep::new();
        for record in reader.records() {
            let record = record?;
            let line = record_line(&record);
            let chunk = parse_field::<usize>(&record, 0, "chunk", line)?;
            let tile = parse_tile(&record, 1, line)?;
            let qp = parse_field::<i32>(&record, 2, "qp", line)?;
            let bitrate = parse_bitrate(&record, 3, line)?;
            let psnr = parse_field::<f64>(&record, 4, "psnr_db", line)?;
            let point = RdPoint::new(qp, bitrate, psnr).map_err(|e| Error::parse(line, e.to_string()))?;
            sweep.push(chunk, tile, point);
        }
        Ok(sweep)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(file).map_err(|e| e.with_path(path))
    }
}

#[derive(Debug, Clone, PartialEq)]
struct TileRates {
    bitrates: Vec<u64>,
    psnr_db: Vec<Option<f64>>,
}

/// One row of a rate manifest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEntry {
    pub chunk: usize,
    pub tile: TileId,
    pub level: u32,
    pub bitrate_bps: u64,
    pub psnr_db: Option<f64>,
}

/// Per `(chunk, tile, level)` bitrate lookup.
#[derive(Debug, Clone, PartialEq)]
pub struct RateTable {
    rates: BTreeMap<(usize, TileId), TileRates>,
    q_max: u32,
    chunk_duration_s: f64,
}

impl RateTable {
    /// Builds a table from manifest rows, rejecting gaps, duplicates and
    /// non-monotone ladders. Rows are numbered from 1 in error messages.
    pub fn from_entries(entries: impl IntoIterator<Item = RateEntry>) -> Result<Self> {
        Self::from_numbered(entries.into_iter().zip(1u64..).map(|(e, i)| (i, e)))
    }

    fn from_numbered(entries: impl IntoIterator<Item = (u64, RateEntry)>) -> Result<Self> {
        // level -> (line, bitrate, psnr)
        type Levels = BTreeMap<u32, (u64, u64, Option<f64>)>;
        let mut grouped: BTreeMap<(usize, TileId), Levels> = BTreeMap::new();
        for (line, e) in entries {
            let slot = grouped.entry((e.chunk, e.tile)).or_default();
            if slot.insert(e.level, (line, e.bitrate_bps, e.psnr_db)).is_some() {
                return Err(Error::parse(
                    line,
                    format!("duplicate entry for chunk {}, tile {}, level {}", e.chunk, e.tile, e.level),
                ));
            }
        }
        let q_max = grouped
            .values()
            .filter_map(|levels| levels.keys().next_back().copied())
            .max()
            .unwrap_or(0);

        let mut rates = BTreeMap::new();
        for ((chunk, tile), levels) in grouped {
            let mut bitrates = Vec::with_capacity(q_max as usize + 1);
            let mut psnr_db = Vec::with_capacity(q_max as usize + 1);
            for level in 0..=q_max {
                let &(line, bitrate, psnr) = levels
                    .get(&level)
                    .ok_or(Error::MissingLevel { chunk, tile, level })?;
                if let Some(&prev) = bitrates.last() {
                    if bitrate < prev {
                        return Err(Error::NonMonotone {
                            line,
                            chunk,
                            tile,
                            level,
                        });
                    }
                }
                bitrates.push(bitrate);
                psnr_db.push(psnr);
            }
            rates.insert((chunk, tile), TileRates { bitrates, psnr_db });
        }
        Ok(RateTable {
            rates,
            q_max,
            chunk_duration_s: DEFAULT_CHUNK_DURATION_S,
        })
    }

    /// Parses a `chunk,tile,level,bitrate_bps[,psnr_db]` manifest.
    pub fn from_reader(rdr: impl Read) -> Result<Self> {
        let mut reader = csv_reader(rdr);
        let has_psnr = check_header(
            &mut reader,
            &["chunk", "tile", "level", "bitrate_bps"],
            &["psnr_db"],
        )? == 5;
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record?;
            let line = record_line(&record);
            let chunk = parse_field::<usize>(&record, 0, "chunk", line)?;
            let tile = parse_tile(&record, 1, line)?;
            let level = parse_field::<u32>(&record, 2, "level", line)?;
            let bitrate_bps = parse_bitrate(&record, 3, line)?;
            let psnr_db = match record.get(4) {
                Some(s) if has_psnr && !s.is_empty() => {
                    let v = parse_field::<f64>(&record, 4, "psnr_db", line)?;
                    if !(v > 0.0 && v < 100.0) {
                        return Err(Error::parse(line, format!("psnr_db {v} outside (0, 100)")));
                    }
                    Some(v)
                }
                _ => None,
            };
            rows.push((
                line,
                RateEntry {
                    chunk,
                    tile,
                    level,
                    bitrate_bps,
                    psnr_db,
                },
            ));
        }
        Self::from_numbered(rows)
    }

    pub fn with_chunk_duration(mut self, seconds: f64) -> Result<Self> {
        if !(seconds > 0.0 && seconds.is_finite()) {
            return Err(Error::Invalid(format!("chunk duration {seconds} must be positive")));
        }
        self.chunk_duration_s = seconds;
        Ok(self)
    }

    pub fn chunk_duration_s(&self) -> f64 {
        self.chunk_duration_s
    }

    /// Highest level present; 0 for an empty table.
    pub fn q_max(&self) -> u32 {
        self.q_max
    }

    pub fn is_empty(&self) -> bool {
        self.rates.is_empty()
    }

    /// Number of `(chunk, tile, level)` entries.
    pub fn len(&self) -> usize {
        self.rates.len() * (self.q_max as usize + 1)
    }

    /// Distinct chunk indices in ascending order.
    pub fn chunks(&self) -> Vec<usize> {
        let mut chunks: Vec<usize> = self.rates.keys().map(|&(c, _)| c).collect();
        chunks.dedup();
        chunks
    }

    pub fn tiles(&self, chunk: usize) -> Vec<TileId> {
        self.rates
            .keys()
            .filter(|&&(c, _)| c == chunk)
            .map(|&(_, t)| t)
            .collect()
    }

    pub fn bitrate(&self, chunk: usize, tile: TileId, level: u32) -> Result<u64> {
        self.rates
            .get(&(chunk, tile))
            .and_then(|r| r.bitrates.get(level as usize).copied())
            .ok_or(Error::MissingLevel { chunk, tile, level })
    }

    pub fn psnr_db(&self, chunk: usize, tile: TileId, level: u32) -> Option<f64> {
        self.rates
            .get(&(chunk, tile))
            .and_then(|r| r.psnr_db.get(level as usize).copied().flatten())
    }

    /// True when every entry carries a PSNR value.
    pub fn has_psnr(&self) -> bool {
        !self.rates.is_empty()
            && self
                .rates
                .values()
                .all(|r| r.psnr_db.iter().all(Option::is_some))
    }

    /// Checks that `chunk` has all levels for every tile of `layout`.
    pub fn require_layout(&self, layout: &TileLayout, chunk: usize) -> Result<()> {
        for &tile in layout.tiles() {
            self.bitrate(chunk, tile, self.q_max)?;
        }
        Ok(())
    }

    /// Entries in `(chunk, tile, level)` order.
    pub fn entries(&self) -> impl Iterator<Item = RateEntry> + '_ {
        self.rates.iter().flat_map(|(&(chunk, tile), r)| {
            r.bitrates
                .iter()
                .zip(&r.psnr_db)
                .zip(0u32..)
                .map(move |((&bitrate_bps, &psnr_db), level)| RateEntry {
                    chunk,
                    tile,
                    level,
                    bitrate_bps,
                    psnr_db,
                })
        })
    }

    /// Writes the manifest CSV; the PSNR column is emitted when every entry
    /// has one.
    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let with_psnr = self.has_psnr();
        let mut out = csv::Writer::from_writer(w);
        if with_psnr {
            out.write_record(["chunk", "tile", "level", "bitrate_bps", "psnr_db"])?;
        } else {
            out.write_record(["chunk", "tile", "level", "bitrate_bps"])?;
        }
        for e in self.entries() {
            let mut row = vec![
                e.chunk.to_string(),
                e.tile.to_string(),
                e.level.to_string(),
                e.bitrate_bps.to_string(),
            ];
            if with_psnr {
                row.push(e.psnr_db.map(|p| p.to_string()).unwrap_or_default());
            }
            out.write_record(&row)?;
        }
        out.flush().map_err(|e| Error::io("<output>", e))?;
        Ok(())
    }
}

/// Reads a rate manifest from disk.
pub fn load_rate_table(path: &Path) -> Result<RateTable> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    RateTable::from_reader(file).map_err(|e| e.with_path(path))
}

/// Picks, for every `(chunk, tile, level)`, the sweep point nearest the
/// level's PSNR target, then repairs the ladder so bitrate never drops as the
/// level rises.
pub fn fit_selection(
    sweep: &RdSweep,
    ladder: &QualityLadder,
) -> Result<BTreeMap<(usize, TileId), Vec<RdPoint>>> {
    let mut out = BTreeMap::new();
    for ((chunk, tile), points) in sweep.iter() {
        if points.is_empty() {
            return Err(Error::EmptyPoints { chunk, tile });
        }
        let mut chosen: Vec<RdPoint> = ladder
            .targets_db()
            .iter()
            .map(|&target| {
                *points
                    .iter()
                    .min_by(|a, b| {
                        (a.psnr_db - target)
                            .abs()
                            .total_cmp(&(b.psnr_db - target).abs())
                            .then(a.bitrate_bps.cmp(&b.bitrate_bps))
                    })
                    .expect("nonempty")
            })
            .collect();
        for level in 1..chosen.len() {
            if chosen[level].bitrate_bps < chosen[level - 1].bitrate_bps {
                chosen[level] = chosen[level - 1];
            }
        }
        out.insert((chunk, tile), chosen);
    }
    Ok(out)
}

pub fn fit_ladder(sweep: &RdSweep, ladder: &QualityLadder) -> Result<RateTable> {
    let selection = fit_selection(sweep, ladder)?;
    let entries = selection.into_iter().flat_map(|((chunk, tile), points)| {
        points.into_iter().zip(0u32..).map(move |(p, level)| RateEntry {
            chunk,
            tile,
            level,
            bitrate_bps: p.bitrate_bps,
            psnr_db: Some(p.psnr_db),
        })
    });
    RateTable::from_entries(entries)
}

/// Sum of the bitrates of `assignment` in `chunk`.
pub fn total_bitrate(
    table: &RateTable,
    assignment: &BTreeMap<TileId, u32>,
    chunk: usize,
) -> Result<u64> {
    assignment
        .iter()
        .map(|(&tile, &level)| table.bitrate(chunk, tile, level))
        .sum()
}

pub(crate) fn csv_reader<R: Read>(rdr: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(rdr)
}

/// Validates the header against required then optional columns and returns
/// the number of columns present.
pub(crate) fn check_header<R: Read>(
    reader: &mut csv::Reader<R>,
    required: &[&str],
    optional: &[&str],
) -> Result<usize> {
    let header = reader.headers()?.clone();
    let names: Vec<&str> = header.iter().collect();
    let expected_max = required.len() + optional.len();
    let ok = names.len() >= required.len()
        && names.len() <= expected_max
        && names
            .iter()
            .zip(required.iter().chain(optional))
            .all(|(got, want)| got == want);
    if !ok {
        let mut want = required.join(",");
        for o in optional {
            want.push_str(&format!("[,{o}]"));
        }
        return Err(Error::parse(1, format!("expected header `{want}`, got `{}`", names.join(","))));
    }
    Ok(names.len())
}

pub(crate) fn record_line(record: &csv::StringRecord) -> u64 {
    record.position().map(|p| p.line()).unwrap_or(0)
}

pub(crate) fn parse_field<T: std::str::FromStr>(
    record: &csv::StringRecord,
    idx: usize,
    name: &str,
    line: u64,
) -> Result<T> {
    let raw = record
        .get(idx)
        .ok_or_else(|| Error::parse(line, format!("missing column `{name}`")))?;
    raw.parse()
        .map_err(|_| Error::parse(line, format!("invalid {name} `{raw}`")))
}

fn parse_tile(record: &csv::StringRecord, idx: usize, line: u64) -> Result<TileId> {
    let raw = record
        .get(idx)
        .ok_or_else(|| Error::parse(line, "missing column `tile`"))?;
    raw.parse()
        .map_err(|e: Error| Error::parse(line, e.to_string()))
}

/// Bitrates are whole bits per second; `2e6` style input is accepted and
/// rounded.
pub(crate) fn parse_bitrate(record: &csv::StringRecord, idx: usize, line: u64) -> Result<u64> {
    let raw = record
        .get(idx)
        .ok_or_else(|| Error::parse(line, "missing column `bitrate_bps`"))?;
    parse_bps(raw).map_err(|msg| Error::parse(line, msg))
}

pub(crate) fn parse_bps(raw: &str) -> std::result::Result<u64, String> {
    if let Ok(v) = raw.parse::<u64>() {
        return Ok(v);
    }
    match raw.parse::<f64>() {
        Ok(v) if (0.0..1.8e19).contains(&v) => Ok(v.round() as u64),
        _ => Err(format!("invalid bitrate `{raw}`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{LayoutName, TileLayout};

    fn tile(s: &str) -> TileId {
        s.parse().unwrap()
    }

    fn manifest(chunks: usize, layout: &TileLayout, levels: u32) -> String {
        let mut s = String::from("chunk,tile,level,bitrate_bps\n");
        for c in 0..chunks {
            for t in layout.tiles() {
                for l in 0..levels {
                    s.push_str(&format!("{c},{t},{l},{}\n", 100_000 * (l + 1)));
                }
            }
        }
        s
    }

    #[test]
    fn ladder_defaults() {
        let ladder = QualityLadder::default();
        assert_eq!(ladder.q_max(), 5);
        assert_eq!(ladder.target_db(0), Some(38.0));
        assert_eq!(ladder.target_db(5), Some(48.0));
        assert!(QualityLadder::new(vec![40.0, 40.0]).is_err());
        assert!(QualityLadder::new(vec![]).is_err());
    }

    #[test]
    fn rd_point_validation() {
        assert!(RdPoint::new(24, 0, 40.0).is_err());
        assert!(RdPoint::new(24, 1, 100.0).is_err());
        assert!(RdPoint::new(24, 1, 0.0).is_err());
    }

    #[test]
    fn well_formed_manifest() {
        let l1 = TileLayout::new(LayoutName::TiledCubemap1);
        let table = RateTable::from_reader(manifest(2, &l1, 6).as_bytes()).unwrap();
        assert_eq!(table.len(), 120);
        assert_eq!(table.q_max(), 5);
        assert_eq!(table.chunks(), vec![0, 1]);
        assert_eq!(table.tiles(1).len(), 10);
        assert_eq!(table.bitrate(1, tile("left_1"), 3).unwrap(), 400_000);
        assert!(!table.has_psnr());
        table.require_layout(&l1, 0).unwrap();
    }

    #[test]
    fn missing_level_is_named() {
        let l1 = TileLayout::new(LayoutName::TiledCubemap1);
        let text: String = manifest(2, &l1, 6)
            .lines()
            .filter(|l| *l != "1,back_0,3,400000")
            .map(|l| format!("{l}\n"))
            .collect();
        match RateTable::from_reader(text.as_bytes()) {
            Err(Error::MissingLevel { chunk, tile: t, level }) => {
                assert_eq!((chunk, t, level), (1, tile("back_0"), 3));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_monotone_reports_row() {
        let text = "chunk,tile,level,bitrate_bps\n\
                    0,top,0,100\n0,top,1,200\n0,top,2,300\n0,top,3,400\n0,top,4,350\n";
        match RateTable::from_reader(text.as_bytes()) {
            Err(Error::NonMonotone { line, level, .. }) => {
                assert_eq!(line, 6);
                assert_eq!(level, 4);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "chunk,tile,level,bitrate_bps\n0,top,0,100\n0,nowhere,1,200\n";
        let err = RateTable::from_reader(text.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");

        let text = "chunk,tile,lvl,bitrate_bps\n";
        assert!(matches!(
            RateTable::from_reader(text.as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));

        let text = "chunk,tile,level,bitrate_bps\n0,top,0,100\n0,top,0,120\n";
        assert!(matches!(
            RateTable::from_reader(text.as_bytes()),
            Err(Error::Parse { line: 3, .. })
        ));
    }

    #[test]
    fn manifest_with_psnr_round_trips() {
        let text = "chunk,tile,level,bitrate_bps,psnr_db\n\
                    0,top,0,1e5,38.1\n0,top,1,200000,41.5\n";
        let table = RateTable::from_reader(text.as_bytes()).unwrap();
        assert!(table.has_psnr());
        assert_eq!(table.bitrate(0, TileId::TOP, 0).unwrap(), 100_000);
        let mut buf = Vec::new();
        table.write_csv(&mut buf).unwrap();
        let again = RateTable::from_reader(buf.as_slice()).unwrap();
        assert_eq!(again, table);
    }

    #[test]
    fn total_bitrate_sums_levels() {
        let l1 = TileLayout::new(LayoutName::TiledCubemap1);
        let entries = l1.tiles().iter().flat_map(|&t| {
            (0..6).map(move |level| RateEntry {
                chunk: 0,
                tile: t,
                level,
                bitrate_bps: 100_000 + 10_000 * u64::from(level),
                psnr_db: None,
            })
        });
        let table = RateTable::from_entries(entries).unwrap();
        let zero: BTreeMap<_, _> = l1.tiles().iter().map(|&t| (t, 0)).collect();
        assert_eq!(total_bitrate(&table, &zero, 0).unwrap(), 1_000_000);

        let empty = RateTable::from_entries([]).unwrap();
        assert_eq!(total_bitrate(&empty, &BTreeMap::new(), 0).unwrap(), 0);

        let mut bad = zero.clone();
        bad.insert(TileId::TOP, 9);
        assert!(matches!(
            total_bitrate(&table, &bad, 0),
            Err(Error::MissingLevel { level: 9, .. })
        ));
    }

    #[test]
    fn fit_picks_nearest_psnr() {
        let mut sweep = RdSweep::new();
        let right_1 = tile("right_1");
        sweep.push(0, right_1, RdPoint::new(36, 1_000_000, 44.91).unwrap());
        sweep.push(0, right_1, RdPoint::new(24, 2_200_000, 50.24).unwrap());
        let ladder = QualityLadder::new(vec![45.0]).unwrap();
        let sel = fit_selection(&sweep, &ladder).unwrap();
        assert_eq!(sel[&(0, right_1)][0].qp, 36);
    }

    #[test]
    fn fit_singleton_fills_every_level() {
        let mut sweep = RdSweep::new();
        sweep.push(3, TileId::TOP, RdPoint::new(30, 500_000, 41.0).unwrap());
        let table = fit_ladder(&sweep, &QualityLadder::default()).unwrap();
        for level in 0..=5 {
            assert_eq!(table.bitrate(3, TileId::TOP, level).unwrap(), 500_000);
            assert_eq!(table.psnr_db(3, TileId::TOP, level), Some(41.0));
        }
    }

    #[test]
    fn fit_ties_prefer_lower_bitrate() {
        let mut sweep = RdSweep::new();
        sweep.push(0, TileId::TOP, RdPoint::new(30, 900, 39.0).unwrap());
        sweep.push(0, TileId::TOP, RdPoint::new(33, 700, 41.0).unwrap());
        let ladder = QualityLadder::new(vec![40.0]).unwrap();
        let sel = fit_selection(&sweep, &ladder).unwrap();
        assert_eq!(sel[&(0, TileId::TOP)][0].bitrate_bps, 700);
    }

    #[test]
    fn fit_repairs_non_monotone_sweeps() {
        // the 42 dB point is cheaper than the 40 dB one
        let mut sweep = RdSweep::new();
        sweep.push(0, TileId::TOP, RdPoint::new(40, 300, 40.0).unwrap());
        sweep.push(0, TileId::TOP, RdPoint::new(38, 200, 42.0).unwrap());
        let ladder = QualityLadder::new(vec![40.0, 42.0]).unwrap();
        let table = fit_ladder(&sweep, &ladder).unwrap();
        assert_eq!(table.bitrate(0, TileId::TOP, 1).unwrap(), 300);
    }

    #[test]
    fn fit_rejects_empty_key() {
        let mut sweep = RdSweep::new();
        sweep.insert(2, TileId::BOTTOM, vec![]);
        assert!(matches!(
            fit_ladder(&sweep, &QualityLadder::default()),
            Err(Error::EmptyPoints { chunk: 2, .. })
        ));

        let l1 = TileLayout::new(LayoutName::TiledCubemap1);
        let mut sweep = RdSweep::new();
        sweep.push(0, TileId::TOP, RdPoint::new(30, 500, 41.0).unwrap());
        assert!(matches!(sweep.require_layout(&l1), Err(Error::EmptyPoints { chunk: 0, .. })));
    }

    #[test]
    fn sweep_csv() {
        let text = "chunk,tile,qp,bitrate_bps,psnr_db\n0,front_0,24,2000000,45.43\n0,front_0,36,400000,38.51\n";
        let sweep = RdSweep::from_reader(text.as_bytes()).unwrap();
        assert_eq!(sweep.points(0, tile("front_0")).unwrap().len(), 2);

        let text = "chunk,tile,qp,bitrate_bps,psnr_db\n0,front_0,24,2000000,140\n";
        assert!(matches!(
            RdSweep::from_reader(text.as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
    }
}
