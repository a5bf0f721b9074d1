//! Trace-driven streaming sessions.
//!
//! A session adapts every chunk of a rate table independently, using one
//! viewport and one bandwidth sample per chunk, then aggregates the per-chunk
//! assignments into a [`SessionReport`].

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use crate::adaptation::{adapt_session_with, AdaptationConfig, ChunkAssignment, Optimizer};
use crate::error::{Error, Result};
use crate::geometry::{Face, TileLayout, Viewport};
use crate::rd_model::{check_header, csv_reader, parse_bps, parse_field, record_line, RateTable};

/// One viewport per chunk, chunks numbered from 0 without gaps.
#[derive(Debug, Clone, PartialEq)]
pub struct ViewportTrace {
    viewports: Vec<Viewport>,
}

impl ViewportTrace {
    pub fn new(entries: Vec<(usize, Viewport)>) -> Result<Self> {
        for (i, &(chunk, _)) in entries.iter().enumerate() {
            if chunk != i {
                return Err(Error::TraceMismatch(format!(
                    "viewport trace entry {i} has chunk {chunk}; chunks must run 0, 1, 2, .. without gaps"
                )));
            }
        }
        Ok(ViewportTrace {
            viewports: entries.into_iter().map(|(_, vp)| vp).collect(),
        })
    }

    /// The same viewport for `chunks` chunks.
    pub fn constant(vp: Viewport, chunks: usize) -> Self {
        ViewportTrace {
            viewports: vec![vp; chunks],
        }
    }

    pub fn viewports(&self) -> &[Viewport] {
        &self.viewports
    }

    pub fn len(&self) -> usize {
        self.viewports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.viewports.is_empty()
    }

    /// Reads a `chunk,yaw_deg,pitch_deg` CSV; every viewport gets `hfov_deg`.
    pub fn from_reader(rdr: impl Read, hfov_deg: f64) -> Result<Self> {
        let mut reader = csv_reader(rdr);
        check_header(&mut reader, &["chunk", "yaw_deg", "pitch_deg"], &[])?;
        let mut entries = Vec::new();
        for record in reader.records() {
            let record = record?;
            let line = record_line(&record);
            let chunk = parse_field::<usize>(&record, 0, "chunk", line)?;
            let yaw = parse_field::<f64>(&record, 1, "yaw_deg", line)?;
            let pitch = parse_field::<f64>(&record, 2, "pitch_deg", line)?;
            let vp = Viewport::new(yaw, pitch, hfov_deg).map_err(|e| Error::parse(line, e.to_string()))?;
            entries.push((chunk, vp));
        }
        Self::new(entries)
    }

    pub fn load(path: &Path, hfov_deg: f64) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(file, hfov_deg).map_err(|e| e.with_path(path))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandwidthTrace {
    entries: Vec<(usize, f64)>,
}

impl BandwidthTrace {
    pub fn new(entries: Vec<(usize, f64)>) -> Result<Self> {
        if entries.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::TraceMismatch(
                "bandwidth trace chunk indices must strictly increase".into(),
            ));
        }
        if let Some(&(chunk, b)) = entries.iter().find(|(_, b)| !(*b > 0.0 && b.is_finite())) {
            return Err(Error::Invalid(format!("bandwidth {b} for chunk {chunk} must be positive")));
        }
        Ok(BandwidthTrace { entries })
    }

    /// `bps` for chunks `0..chunks`.
    pub fn constant(bps: f64, chunks: usize) -> Result<Self> {
        Self::new((0..chunks).map(|c| (c, bps)).collect())
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    /// Reads a `chunk,bandwidth_bps` CSV.
    pub fn from_reader(rdr: impl Read) -> Result<Self> {
        let mut reader = csv_reader(rdr);
        check_header(&mut reader, &["chunk", "bandwidth_bps"], &[])?;
        let mut entries = Vec::new();
        for record in reader.records() {
            let record = record?;
            let line = record_line(&record);
            let chunk = parse_field::<usize>(&record, 0, "chunk", line)?;
            let raw = record.get(1).unwrap_or_default();
            let bps: f64 = raw
                .parse()
                .map_err(|_| Error::parse(line, format!("invalid bandwidth_bps `{raw}`")))?;
            entries.push((chunk, bps));
        }
        Self::new(entries)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(file).map_err(|e| e.with_path(path))
    }

    /// Accepts either a bandwidth trace path or a single bits-per-second
    /// value applied to `chunks` chunks.
    pub fn from_arg(arg: &str, chunks: usize) -> Result<Self> {
        match parse_bps(arg) {
            Ok(bps) => Self::constant(bps as f64, chunks),
            Err(_) => Self::load(Path::new(arg)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionReport {
    pub assignments: Vec<ChunkAssignment>,
    pub mean_utility: f64,
    /// Mean assigned level of all tiles with a given priority, over all chunks.
    pub mean_level_by_priority: BTreeMap<u32, f64>,
    /// Area-weighted PSNR of the streamed tiles averaged over chunks, when
    /// the rate table carries PSNR.
    pub mean_weighted_psnr_db: Option<f64>,
    /// Area-weighted PSNR per cube face averaged over chunks.
    pub face_psnr_db: Option<BTreeMap<Face, f64>>,
}

impl SessionReport {
    pub fn from_assignments(
        layout: &TileLayout,
        table: &RateTable,
        assignments: Vec<ChunkAssignment>,
    ) -> Self {
        let n = assignments.len();
        let mean_utility = if n == 0 {
            0.0
        } else {
            assignments.iter().map(|a| a.utility).sum::<f64>() / n as f64
        };

        let mut by_priority: BTreeMap<u32, (u64, u64)> = BTreeMap::new();
        for a in &assignments {
            for (&tile, &level) in &a.levels {
                let p = a.priorities.get(tile).expect("assignment priorities cover its tiles");
                let slot = by_priority.entry(p).or_default();
                slot.0 += u64::from(level);
                slot.1 += 1;
            }
        }
        let mean_level_by_priority = by_priority
            .into_iter()
            .map(|(p, (sum, count))| (p, sum as f64 / count as f64))
            .collect();

        let (mean_weighted_psnr_db, face_psnr_db) = if table.has_psnr() && n > 0 {
            let mut total = 0.0;
            let mut faces: BTreeMap<Face, f64> = BTreeMap::new();
            for a in &assignments {
                let mut weighted = 0.0;
                let mut area = 0.0;
                let mut per_face: BTreeMap<Face, (f64, f64)> = BTreeMap::new();
                for (&tile, &level) in &a.levels {
                    let psnr = table
                        .psnr_db(a.chunk_index, tile, level)
                        .expect("table has psnr for every entry");
                    let w = layout.area(tile);
                    weighted += w * psnr;
                    area += w;
                    let f = per_face.entry(tile.face()).or_default();
                    f.0 += w * psnr;
                    f.1 += w;
                }
                total += weighted / area;
                for (face, (wp, wa)) in per_face {
                    *faces.entry(face).or_default() += wp / wa;
                }
            }
            for v in faces.values_mut() {
                *v /= n as f64;
            }
            (Some(total / n as f64), Some(faces))
        } else {
            (None, None)
        };

        SessionReport {
            assignments,
            mean_utility,
            mean_level_by_priority,
            mean_weighted_psnr_db,
            face_psnr_db,
        }
    }

    pub fn feasible_chunks(&self) -> usize {
        self.assignments.iter().filter(|a| a.feasible).count()
    }

    /// Writes `priority,mean_level` rows followed by `metric,value` rows.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        let mut out = String::from("priority,mean_level\n");
        for (p, level) in &self.mean_level_by_priority {
            out.push_str(&format!("{p},{level}\n"));
        }
        out.push_str("metric,value\n");
        out.push_str(&format!("chunks,{}\n", self.assignments.len()));
        out.push_str(&format!("feasible_chunks,{}\n", self.feasible_chunks()));
        out.push_str(&format!("mean_utility,{}\n", self.mean_utility));
        for a in &self.assignments {
            out.push_str(&format!(
                "total_bitrate_bps_chunk_{},{}\n",
                a.chunk_index, a.total_bitrate_bps
            ));
        }
        if let Some(psnr) = self.mean_weighted_psnr_db {
            out.push_str(&format!("mean_weighted_psnr_db,{psnr}\n"));
        }
        if let Some(faces) = &self.face_psnr_db {
            for (face, psnr) in faces {
                out.push_str(&format!("face_psnr_db_{face},{psnr}\n"));
            }
        }
        w.write_all(out.as_bytes())
            .map_err(|e| Error::io("<report>", e))
    }
}

/// Writes one `chunk,tile,priority,level,bitrate_bps,sigma_max,q_max_used,utility,feasible`
/// row per tile and chunk.
pub fn write_assignments_csv(
    table: &RateTable,
    assignments: &[ChunkAssignment],
    w: impl Write,
) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "chunk",
        "tile",
        "priority",
        "level",
        "bitrate_bps",
        "sigma_max",
        "q_max_used",
        "utility",
        "feasible",
    ])?;
    for a in assignments {
        for (&tile, &level) in &a.levels {
            let priority = a.priorities.get(tile).unwrap_or_default();
            let bitrate = table.bitrate(a.chunk_index, tile, level)?;
            out.write_record([
                a.chunk_index.to_string(),
                tile.to_string(),
                priority.to_string(),
                level.to_string(),
                bitrate.to_string(),
                a.sigma_max.to_string(),
                a.q_max_used.to_string(),
                a.utility.to_string(),
                a.feasible.to_string(),
            ])?;
        }
    }
    out.flush().map_err(|e| Error::io("<assignments>", e))?;
    Ok(())
}

fn check_traces(table: &RateTable, vtrace: &ViewportTrace, btrace: &BandwidthTrace) -> Result<()> {
    let chunks = table.chunks();
    let vchunks: Vec<usize> = (0..vtrace.len()).collect();
    let bchunks: Vec<usize> = btrace.entries.iter().map(|&(c, _)| c).collect();
    if vchunks != chunks {
        return Err(Error::TraceMismatch(format!(
            "viewport trace covers chunks {vchunks:?}, rate table covers {chunks:?}"
        )));
    }
    if bchunks != chunks {
        return Err(Error::TraceMismatch(format!(
            "bandwidth trace covers chunks {bchunks:?}, rate table covers {chunks:?}"
        )));
    }
    Ok(())
}

pub fn run_session(
    layout: &TileLayout,
    rates: &RateTable,
    vtrace: &ViewportTrace,
    btrace: &BandwidthTrace,
    cfg: &AdaptationConfig,
) -> Result<SessionReport> {
    run_session_with(layout, rates, vtrace, btrace, cfg, Optimizer::Scan)
}

pub fn run_session_with(
    layout: &TileLayout,
    rates: &RateTable,
    vtrace: &ViewportTrace,
    btrace: &BandwidthTrace,
    cfg: &AdaptationConfig,
    optimizer: Optimizer,
) -> Result<SessionReport> {
    check_traces(rates, vtrace, btrace)?;
    let bandwidth: Vec<f64> = btrace.entries.iter().map(|&(_, b)| b).collect();
    let assignments = adapt_session_with(layout, vtrace.viewports(), rates, &bandwidth, cfg, optimizer)?;
    Ok(SessionReport::from_assignments(layout, rates, assignments))
}

/// Sessions under a PSNR-targeted ladder and a QP-targeted ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyComparison {
    pub psnr_ladder: SessionReport,
    pub qp_ladder: SessionReport,
    /// `psnr_ladder - qp_ladder` face PSNR in dB.
    pub face_psnr_gain_db: BTreeMap<Face, f64>,
}

pub fn compare_policies(
    layout: &TileLayout,
    rates_psnr_ladder: &RateTable,
    rates_qp_ladder: &RateTable,
    vtrace: &ViewportTrace,
    btrace: &BandwidthTrace,
    cfg: &AdaptationConfig,
) -> Result<PolicyComparison> {
    let keys = |t: &RateTable| -> Vec<_> {
        t.chunks()
            .into_iter()
            .flat_map(|c| t.tiles(c).into_iter().map(move |tile| (c, tile)))
            .collect()
    };
    if keys(rates_psnr_ladder) != keys(rates_qp_ladder) {
        return Err(Error::TraceMismatch(
            "PSNR and QP ladders cover different (chunk, tile) sets".into(),
        ));
    }
    if !rates_psnr_ladder.has_psnr() || !rates_qp_ladder.has_psnr() {
        return Err(Error::Invalid("both ladders must carry psnr_db".into()));
    }
    let psnr_ladder = run_session(layout, rates_psnr_ladder, vtrace, btrace, cfg)?;
    let qp_ladder = run_session(layout, rates_qp_ladder, vtrace, btrace, cfg)?;
    let a = psnr_ladder.face_psnr_db.as_ref().expect("psnr present");
    let b = qp_ladder.face_psnr_db.as_ref().expect("psnr present");
    let face_psnr_gain_db = a.iter().map(|(&face, &p)| (face, p - b[&face])).collect();
    Ok(PolicyComparison {
        psnr_ladder,
        qp_ladder,
        face_psnr_gain_db,
    })
}
