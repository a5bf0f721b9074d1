//! Command line front end.
//!
//! Exit status is 0 on success, 1 for usage errors and 2 when input data
//! fails to load or violates an invariant. Data goes to files or stdout,
//! diagnostics to stderr.
//!
//! Defaults come from built-ins, then an optional `key=value` config file
//! (`--config`, or the `TILED_CUBEMAP_CONFIG` environment variable), then
//! flags.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::adaptation::{adapt_session_with, AdaptationConfig, Optimizer};
use crate::complexity::{compute_siti, LumaSequence, TileGeometry};
use crate::error::{Error, Result};
use crate::geometry::{assign_priorities, LayoutName, TileLayout, Viewport};
use crate::rd_model::{fit_ladder, load_rate_table, QualityLadder, RdSweep, DEFAULT_PSNR_TARGETS_DB};
use crate::session::{run_session_with, write_assignments_csv, BandwidthTrace, ViewportTrace};
use crate::storage::{
    mb_per_min, storage_offset_cubemap, storage_savings_percent, storage_tiled_cubemap,
    StorageScenario,
};

pub const CONFIG_ENV: &str = "TILED_CUBEMAP_CONFIG";

/// Experiment defaults shared by the subcommands.
#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub layout: LayoutName,
    pub ladder_targets_db: Vec<f64>,
    pub sigma_step: f64,
    pub q_max: u32,
    pub bandwidth_profiles_bps: Vec<f64>,
}

impl Default for CliConfig {
    fn default() -> Self {
        CliConfig {
            layout: LayoutName::TiledCubemap1,
            ladder_targets_db: DEFAULT_PSNR_TARGETS_DB.to_vec(),
            sigma_step: AdaptationConfig::default().sigma_step,
            q_max: AdaptationConfig::default().q_max_initial,
            bandwidth_profiles_bps: vec![2e6, 4e6, 10e6],
        }
    }
}

impl CliConfig {
    /// Applies `key=value` lines over the current values. Blank lines and
    /// lines starting with `#` are skipped.
    pub fn apply_file_contents(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line_no = i as u64 + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(line_no, format!("expected key=value, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| Error::parse(line_no, format!("invalid {what} `{value}`"));
            match key {
                "layout" => self.layout = value.parse()?,
                "ladder_targets" => {
                    self.ladder_targets_db = parse_list(value).map_err(|_| bad("ladder_targets"))?;
                    QualityLadder::new(self.ladder_targets_db.clone())?;
                }
                "sigma_step" => self.sigma_step = value.parse().map_err(|_| bad("sigma_step"))?,
                "q_max" => self.q_max = value.parse().map_err(|_| bad("q_max"))?,
                "bandwidth_profiles" => {
                    self.bandwidth_profiles_bps =
                        parse_list(value).map_err(|_| bad("bandwidth_profiles"))?
                }
                other => return Err(Error::parse(line_no, format!("unknown config key `{other}`"))),
            }
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = CliConfig::default();
        cfg.apply_file_contents(&text).map_err(|e| e.with_path(path))?;
        Ok(cfg)
    }
}

fn parse_list(s: &str) -> std::result::Result<Vec<f64>, std::num::ParseFloatError> {
    s.split(',').map(|v| v.trim().parse::<f64>()).collect()
}

#[derive(Debug, Parser)]
#[command(name = "tiled-cubemap", version, about = "Tiled cubemap rate adaptation toolkit", propagate_version = true)]
struct Cli {
    /// key=value file with defaults (overrides TILED_CUBEMAP_CONFIG)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print tile priorities for one viewport as CSV
    Priorities(PrioritiesArgs),
    /// Fit a quality ladder from an R-D sweep and write a rate manifest
    Ladder(LadderArgs),
    /// Adapt every chunk of a rate manifest and write the assignments
    Adapt(AdaptArgs),
    /// Run a trace-driven session and write report and assignments
    Simulate(SimulateArgs),
    /// Spatial/temporal information of a raw 8-bit luma file
    Siti(SitiArgs),
    /// Storage of tiled cubemap versus offset cubemap
    Storage(StorageArgs),
}

#[derive(Debug, Args)]
struct PrioritiesArgs {
    #[arg(long)]
    layout: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    yaw: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pitch: f64,
    #[arg(long, default_value_t = Viewport::DEFAULT_HFOV_DEG)]
    hfov: f64,
}

#[derive(Debug, Args)]
struct LadderArgs {
    /// CSV with chunk,tile,qp,bitrate_bps,psnr_db
    #[arg(long)]
    sweep: PathBuf,
    /// Require every tile of this layout in every chunk
    #[arg(long)]
    layout: Option<String>,
    /// Comma-separated PSNR targets, level 0 first
    #[arg(long)]
    targets: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AdaptationArgs {
    #[arg(long)]
    layout: Option<String>,
    /// Rate manifest CSV
    #[arg(long)]
    rates: PathBuf,
    /// Viewport trace CSV (chunk,yaw_deg,pitch_deg)
    #[arg(long)]
    viewports: PathBuf,
    /// Bandwidth trace CSV or a single bits-per-second value
    #[arg(long)]
    bandwidth: String,
    #[arg(long)]
    sigma_step: Option<f64>,
    #[arg(long)]
    q_max: Option<u32>,
    #[arg(long, default_value_t = Viewport::DEFAULT_HFOV_DEG)]
    hfov: f64,
    /// Chunk duration of the manifest in seconds
    #[arg(long, default_value_t = crate::rd_model::DEFAULT_CHUNK_DURATION_S)]
    chunk_duration: f64,
    /// Use the exhaustive search instead of the sigma scan
    #[arg(long)]
    oracle: bool,
}

#[derive(Debug, Args)]
struct AdaptArgs {
    #[command(flatten)]
    common: AdaptationArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: AdaptationArgs,
    #[arg(long)]
    out_report: Option<PathBuf>,
    #[arg(long)]
    out_assignments: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SitiArgs {
    /// Raw planar 8-bit luma file
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    width: usize,
    #[arg(long)]
    height: usize,
    /// Frame count, or `all`
    #[arg(long, default_value = "all")]
    frames: String,
    /// Tile geometry sidecar CSV (tile,x,y,w,h)
    #[arg(long)]
    tiles: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct StorageArgs {
    #[arg(long)]
    rates: PathBuf,
    /// Comma-separated offset-cubemap bitrates, one per bandwidth profile
    #[arg(long)]
    offset_bitrates: Option<String>,
    #[arg(long, default_value_t = 30)]
    viewports: u32,
    /// Seconds of video to size for
    #[arg(long, default_value_t = 60.0)]
    duration: f64,
    #[arg(long, default_value_t = crate::rd_model::DEFAULT_CHUNK_DURATION_S)]
    chunk_duration: f64,
}

/// Entry point used by the binary.
pub fn main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let env_config = std::env::var_os(CONFIG_ENV).map(PathBuf::from);
    run(args, env_config, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs one invocation with explicit streams. `env_config` stands in for the
/// config environment variable.
pub fn run<I, T>(
    args: I,
    env_config: Option<PathBuf>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    1
                }
            };
        }
    };
    match dispatch(cli, env_config, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            2
        }
    }
}

fn dispatch(cli: Cli, env_config: Option<PathBuf>, stdout: &mut dyn Write) -> Result<()> {
    let config = match cli.config.or(env_config) {
        Some(path) => CliConfig::load(&path)?,
        None => CliConfig::default(),
    };
    match cli.command {
        Command::Priorities(a) => priorities(&config, a, stdout),
        Command::Ladder(a) => ladder(&config, a, stdout),
        Command::Adapt(a) => adapt(&config, a, stdout),
        Command::Simulate(a) => simulate(&config, a, stdout),
        Command::Siti(a) => siti(a, stdout),
        Command::Storage(a) => storage(&config, a, stdout),
    }
}

fn layout_for(config: &CliConfig, flag: Option<&str>) -> Result<TileLayout> {
    let name = match flag {
        Some(name) => name.parse()?,
        None => config.layout,
    };
    Ok(TileLayout::new(name))
}

/// Writes to `path`, or to stdout when no path is given.
fn with_output(
    path: Option<&Path>,
    stdout: &mut dyn Write,
    f: impl FnOnce(&mut dyn Write) -> Result<()>,
) -> Result<()> {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| Error::io(p, e))?;
            let mut w = BufWriter::new(file);
            f(&mut w)?;
            w.flush().map_err(|e| Error::io(p, e))
        }
        None => {
            f(stdout)?;
            stdout.flush().map_err(|e| Error::io("<stdout>", e))
        }
    }
}

fn priorities(config: &CliConfig, a: PrioritiesArgs, stdout: &mut dyn Write) -> Result<()> {
    let layout = layout_for(config, a.layout.as_deref())?;
    let vp = Viewport::new(a.yaw, a.pitch, a.hfov)?;
    let map = assign_priorities(&layout, &vp);
    let mut out = String::from("tile_id,priority\n");
    for &tile in layout.tiles() {
        out.push_str(&format!("{tile},{}\n", map.get(tile).unwrap_or_default()));
    }
    stdout
        .write_all(out.as_bytes())
        .map_err(|e| Error::io("<stdout>", e))
}

fn ladder(config: &CliConfig, a: LadderArgs, stdout: &mut dyn Write) -> Result<()> {
    let targets = match &a.targets {
        Some(t) => parse_list(t).map_err(|_| Error::Invalid(format!("bad targets `{t}`")))?,
        None => config.ladder_targets_db.clone(),
    };
    let ladder = QualityLadder::new(targets)?;
    let sweep = RdSweep::load(&a.sweep)?;
    if let Some(name) = a.layout.as_deref() {
        sweep.require_layout(&TileLayout::new(name.parse()?))?;
    }
    let table = fit_ladder(&sweep, &ladder)?;
    with_output(a.out.as_deref(), stdout, |w| table.write_csv(w))
}

struct Loaded {
    layout: TileLayout,
    table: crate::rd_model::RateTable,
    vtrace: ViewportTrace,
    btrace: BandwidthTrace,
    cfg: AdaptationConfig,
    optimizer: Optimizer,
}

fn load_adaptation(config: &CliConfig, a: &AdaptationArgs) -> Result<Loaded> {
    let layout = layout_for(config, a.layout.as_deref())?;
    let table = load_rate_table(&a.rates)?.with_chunk_duration(a.chunk_duration)?;
    let vtrace = ViewportTrace::load(&a.viewports, a.hfov)?;
    let btrace = BandwidthTrace::from_arg(&a.bandwidth, table.chunks().len())?;
    let cfg = AdaptationConfig {
        q_max_initial: a.q_max.unwrap_or(config.q_max),
        sigma_step: a.sigma_step.unwrap_or(config.sigma_step),
        ..AdaptationConfig::default()
    };
    cfg.validate()?;
    Ok(Loaded {
        layout,
        table,
        vtrace,
        btrace,
        cfg,
        optimizer: if a.oracle {
            Optimizer::Exhaustive
        } else {
            Optimizer::Scan
        },
    })
}

fn adapt(config: &CliConfig, a: AdaptArgs, stdout: &mut dyn Write) -> Result<()> {
    let l = load_adaptation(config, &a.common)?;
    let chunks = l.table.chunks();
    if l.vtrace.len() != chunks.len() {
        return Err(Error::TraceMismatch(format!(
            "{} viewports for {} chunks",
            l.vtrace.len(),
            chunks.len()
        )));
    }
    let bw: Vec<f64> = l.btrace.entries().iter().map(|&(_, b)| b).collect();
    let assignments = adapt_session_with(&l.layout, l.vtrace.viewports(), &l.table, &bw, &l.cfg, l.optimizer)?;
    with_output(a.out.as_deref(), stdout, |w| {
        write_assignments_csv(&l.table, &assignments, w)
    })
}

fn simulate(config: &CliConfig, a: SimulateArgs, stdout: &mut dyn Write) -> Result<()> {
    let l = load_adaptation(config, &a.common)?;
    let report = run_session_with(&l.layout, &l.table, &l.vtrace, &l.btrace, &l.cfg, l.optimizer)?;
    if let Some(path) = &a.out_assignments {
        with_output(Some(path), stdout, |w| {
            write_assignments_csv(&l.table, &report.assignments, w)
        })?;
    }
    with_output(a.out_report.as_deref(), stdout, |w| report.write_csv(w))
}

fn siti(a: SitiArgs, stdout: &mut dyn Write) -> Result<()> {
    let frames = match a.frames.as_str() {
        "all" => None,
        n => Some(
            n.parse::<usize>()
                .map_err(|_| Error::Invalid(format!("--frames must be a count or `all`, got `{n}`")))?,
        ),
    };
    let seq = LumaSequence::load_raw(&a.input, a.width, a.height, frames)?;
    let mut rows = Vec::new();
    match &a.tiles {
        None => rows.push(("full".to_string(), compute_siti(&seq))),
        Some(path) => {
            let geometry = TileGeometry::load(path)?;
            for (tile, rect) in geometry.iter() {
                rows.push((tile.to_string(), compute_siti(&seq.crop(rect)?)));
            }
        }
    }
    with_output(a.out.as_deref(), stdout, |w| {
        let mut out = String::from("tile,si,ti\n");
        for (name, s) in &rows {
            out.push_str(&format!("{name},{},{}\n", s.si, s.ti));
        }
        w.write_all(out.as_bytes()).map_err(|e| Error::io("<siti>", e))
    })
}

fn storage(config: &CliConfig, a: StorageArgs, stdout: &mut dyn Write) -> Result<()> {
    let bitrates = match &a.offset_bitrates {
        Some(list) => parse_list(list)
            .map_err(|_| Error::Invalid(format!("bad --offset-bitrates `{list}`")))?,
        None => config.bandwidth_profiles_bps.clone(),
    };
    let scenario = StorageScenario::new(a.viewports, bitrates, a.duration)?;
    let table = load_rate_table(&a.rates)?.with_chunk_duration(a.chunk_duration)?;
    let offset = storage_offset_cubemap(&scenario);
    let tiled = storage_tiled_cubemap(&table, a.duration);
    let savings = storage_savings_percent(offset, tiled)?;
    let out = format!(
        "scheme,bytes,mb_per_min\n\
         offset_cubemap,{offset},{}\n\
         tiled_cubemap,{tiled},{}\n\
         # offset_versions={}\n\
         # savings_percent={savings} (100 * (offset - tiled) / tiled)\n",
        mb_per_min(offset, a.duration),
        mb_per_min(tiled, a.duration),
        scenario.offset_versions(),
    );
    stdout
        .write_all(out.as_bytes())
        .map_err(|e| Error::io("<stdout>", e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_overrides_defaults() {
        let mut cfg = CliConfig::default();
        cfg.apply_file_contents(
            "# experiment\nlayout = tiled_cubemap_2\nsigma_step=0.05\n\nq_max=4\nbandwidth_profiles=1e6,3e6\n",
        )
        .unwrap();
        assert_eq!(cfg.layout, LayoutName::TiledCubemap2);
        assert_eq!(cfg.sigma_step, 0.05);
        assert_eq!(cfg.q_max, 4);
        assert_eq!(cfg.bandwidth_profiles_bps, vec![1e6, 3e6]);
    }

    #[test]
    fn config_file_errors() {
        let mut cfg = CliConfig::default();
        assert!(matches!(
            cfg.apply_file_contents("colour=blue"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(cfg.apply_file_contents("\nladder_targets=40,39").is_err());
        assert!(cfg.apply_file_contents("no equals sign").is_err());
    }

    #[test]
    fn defaults_match_evaluation_setup() {
        let cfg = CliConfig::default();
        assert_eq!(cfg.bandwidth_profiles_bps, vec![2e6, 4e6, 10e6]);
        assert_eq!(cfg.ladder_targets_db, vec![38.0, 39.0, 40.0, 42.0, 45.0, 48.0]);
        assert_eq!(cfg.q_max, 5);
    }
}
