//! Viewport-adaptive rate adaptation for tiled cubemap 360-degree video.
//!
//! The crate covers the whole pipeline from tile geometry to a trace-driven
//! session simulator:
//!
//! - [`geometry`]: the two tiled cubemap layouts and viewport priorities
//! - [`rd_model`]: quality ladders, rate tables and ladder fitting
//! - [`adaptation`]: the sigma-scan optimizer and its exhaustive reference
//! - [`complexity`]: spatial and temporal information of luma sequences
//! - [`storage`]: server storage versus per-viewport offset cubemaps
//! - [`session`]: per-chunk simulation and report aggregation
//! - [`cli`]: the `tiled-cubemap` command line front end

pub mod adaptation;
pub mod cli;
pub mod complexity;
pub mod error;
pub mod geometry;
pub mod rd_model;
pub mod session;
pub mod storage;

pub use adaptation::{
    adapt_chunk, adapt_session, optimize_exhaustive, quality_curve, AdaptationConfig,
    ChunkAssignment, Optimizer,
};
pub use error::{Error, Result};
pub use geometry::{
    assign_priorities, build_layout, fov_tiles, Face, LayoutName, PriorityMap, TileId, TileLayout,
    Viewport,
};
pub use rd_model::{
    fit_ladder, load_rate_table, total_bitrate, QualityLadder, RateEntry, RateTable, RdPoint,
    RdSweep,
};
