//! Per-chunk quality assignment under a bandwidth budget.
//!
//! Tile quality follows a Gaussian fall-off over priority,
//! `Q(P) = round(q_max * exp(-P^2 / (2 sigma^2)))`, so a single steepness
//! parameter `sigma` decides how fast quality degrades away from the field
//! of view. [`adapt_chunk`] first finds the highest `q_max` at which the
//! steepest curve fits the budget, then flattens the curve step by step
//! while it still fits. [`optimize_exhaustive`] searches the same family on
//! a finer grid and serves as a reference for the scan.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geometry::{assign_priorities, PriorityMap, TileId, TileLayout, Viewport};
use crate::rd_model::{QualityLadder, RateTable};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptationConfig {
    pub q_max_initial: u32,
    pub sigma_init: f64,
    pub sigma_step: f64,
    /// Upper bound on the sigma scan. The scan always reaches full quality
    /// well before this; hitting it is reported as an error.
    pub sigma_cap: f64,
}

impl Default for AdaptationConfig {
    fn default() -> Self {
        AdaptationConfig {
            q_max_initial: 5,
            sigma_init: 0.1,
            sigma_step: 0.1,
            sigma_cap: 1000.0,
        }
    }
}

impl AdaptationConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.sigma_init) {
            return Err(Error::Invalid(format!("sigma_init {} must be positive", self.sigma_init)));
        }
        if !positive(self.sigma_step) {
            return Err(Error::Invalid(format!("sigma_step {} must be positive", self.sigma_step)));
        }
        if self.sigma_cap.partial_cmp(&self.sigma_init).is_none_or(|o| o.is_lt()) {
            return Err(Error::Invalid(format!(
                "sigma_cap {} is below sigma_init {}",
                self.sigma_cap, self.sigma_init
            )));
        }
        Ok(())
    }
}

/// Quality levels chosen for one chunk.
#[derive(Debug, Clone, PartialEq)]
pub struct ChunkAssignment {
    pub chunk_index: usize,
    pub levels: BTreeMap<TileId, u32>,
    pub priorities: PriorityMap,
    /// Steepness the levels were computed with; 0 when infeasible.
    pub sigma_max: f64,
    pub q_max_used: u32,
    /// Area-weighted mean level.
    pub utility: f64,
    pub total_bitrate_bps: u64,
    /// False when even all tiles at level 0 exceed the budget.
    pub feasible: bool,
}

impl ChunkAssignment {
    pub fn level(&self, tile: TileId) -> Option<u32> {
        self.levels.get(&tile).copied()
    }
}

/// Rounded Gaussian quality for a tile of the given priority.
///
/// `sigma == 0` is the limit: full quality at priority 0, nothing elsewhere.
/// `sigma == inf` gives `q_max` everywhere.
pub fn quality_curve(q_max: u32, priority: u32, sigma: f64) -> u32 {
    if priority == 0 {
        return q_max;
    }
    if sigma <= 0.0 {
        return 0;
    }
    let p = f64::from(priority);
    let v = f64::from(q_max) * (-(p * p) / (2.0 * sigma * sigma)).exp();
    // round half up; v is never negative
    ((v + 0.5).floor() as u32).min(q_max)
}

/// Flattened view of one chunk: per tile area, priority and ladder bitrates.
struct ChunkProblem {
    chunk: usize,
    tiles: Vec<TileId>,
    areas: Vec<f64>,
    priorities: Vec<u32>,
    rates: Vec<Vec<u64>>,
    total_area: f64,
    budget: f64,
}

impl ChunkProblem {
    fn new(
        layout: &TileLayout,
        priorities: &PriorityMap,
        table: &RateTable,
        chunk: usize,
        bandwidth_bps: f64,
        q_max: u32,
    ) -> Result<Self> {
        if bandwidth_bps.is_nan() || bandwidth_bps < 0.0 {
            return Err(Error::Invalid(format!("bandwidth {bandwidth_bps} must be non-negative")));
        }
        let n = layout.tiles().len();
        let mut p = ChunkProblem {
            chunk,
            tiles: Vec::with_capacity(n),
            areas: Vec::with_capacity(n),
            priorities: Vec::with_capacity(n),
            rates: Vec::with_capacity(n),
            total_area: 0.0,
            budget: bandwidth_bps,
        };
        for &tile in layout.tiles() {
            let prio = priorities
                .get(tile)
                .ok_or_else(|| Error::Invalid(format!("no priority for tile {tile}")))?;
            let rates = (0..=q_max)
                .map(|level| table.bitrate(chunk, tile, level))
                .collect::<Result<Vec<_>>>()?;
            p.tiles.push(tile);
            p.areas.push(layout.area(tile));
            p.priorities.push(prio);
            p.rates.push(rates);
        }
        p.total_area = p.areas.iter().sum();
        Ok(p)
    }

    fn levels_at(&self, q_max: u32, sigma: f64) -> Vec<u32> {
        self.priorities
            .iter()
            .map(|&p| quality_curve(q_max, p, sigma))
            .collect()
    }

    fn cost(&self, levels: &[u32]) -> u64 {
        levels
            .iter()
            .zip(&self.rates)
            .map(|(&l, r)| r[l as usize])
            .sum()
    }

    fn fits(&self, cost: u64) -> bool {
        cost as f64 <= self.budget
    }

    fn utility(&self, levels: &[u32]) -> f64 {
        if self.total_area == 0.0 {
            return 0.0;
        }
        let weighted: f64 = levels
            .iter()
            .zip(&self.areas)
            .map(|(&l, &a)| a * f64::from(l))
            .sum();
        weighted / self.total_area
    }

    fn assignment(
        &self,
        priorities: &PriorityMap,
        levels: Vec<u32>,
        sigma_max: f64,
        q_max_used: u32,
        feasible: bool,
    ) -> ChunkAssignment {
        ChunkAssignment {
            chunk_index: self.chunk,
            utility: self.utility(&levels),
            total_bitrate_bps: self.cost(&levels),
            levels: self.tiles.iter().copied().zip(levels).collect(),
            priorities: priorities.clone(),
            sigma_max,
            q_max_used,
            feasible,
        }
    }

    fn infeasible(&self, priorities: &PriorityMap) -> ChunkAssignment {
        self.assignment(priorities, vec![0; self.tiles.len()], 0.0, 0, false)
    }
}

/// Scans sigma upward from `sigma_init` and keeps the flattest curve that
/// fits `bandwidth_bps`. If not even the steepest curve fits, `q_max` is
/// lowered one level and the scan restarts.
pub fn adapt_chunk(
    layout: &TileLayout,
    priorities: &PriorityMap,
    table: &RateTable,
    chunk: usize,
    bandwidth_bps: f64,
    cfg: &AdaptationConfig,
) -> Result<ChunkAssignment> {
    cfg.validate()?;
    let problem = ChunkProblem::new(layout, priorities, table, chunk, bandwidth_bps, cfg.q_max_initial)?;

    let mut q_max = cfg.q_max_initial;
    let mut steps = 0u32;
    let mut sigma_max = 0.0;
    loop {
        let sigma = cfg.sigma_init + f64::from(steps) * cfg.sigma_step;
        if sigma > cfg.sigma_cap {
            return Err(Error::SigmaCapExceeded { cap: cfg.sigma_cap });
        }
        let levels = problem.levels_at(q_max, sigma);
        if problem.fits(problem.cost(&levels)) {
            sigma_max = sigma;
            if levels.iter().all(|&l| l == q_max) {
                // utility has reached its ceiling for this q_max
                break;
            }
            steps += 1;
        } else if sigma_max == 0.0 && q_max > 0 {
            steps = 0;
            q_max -= 1;
        } else {
            break;
        }
    }

    if sigma_max == 0.0 {
        return Ok(problem.infeasible(priorities));
    }
    let levels = problem.levels_at(q_max, sigma_max);
    Ok(problem.assignment(priorities, levels, sigma_max, q_max, true))
}

/// Reference search over the same curve family.
///
/// For each `q_max` from the ladder top down, evaluates every sigma on a grid
/// ten times finer than `cfg.sigma_step` (up to `cfg.sigma_cap`) plus the
/// flat `sigma -> inf` limit, and returns the first assignment that
/// maximizes `(q_max, utility)` lexicographically among those that fit.
pub fn optimize_exhaustive(
    layout: &TileLayout,
    priorities: &PriorityMap,
    table: &RateTable,
    chunk: usize,
    bandwidth_bps: f64,
    ladder: &QualityLadder,
    cfg: &AdaptationConfig,
) -> Result<ChunkAssignment> {
    cfg.validate()?;
    let top = ladder.q_max();
    let problem = ChunkProblem::new(layout, priorities, table, chunk, bandwidth_bps, top)?;
    let fine = cfg.sigma_step / 10.0;

    for q_max in (0..=top).rev() {
        let mut best: Option<(f64, f64, Vec<u32>)> = None;
        let mut consider = |sigma: f64, levels: Vec<u32>| {
            if !problem.fits(problem.cost(&levels)) {
                return;
            }
            let u = problem.utility(&levels);
            if best.as_ref().is_none_or(|(bu, _, _)| u > *bu) {
                best = Some((u, sigma, levels));
            }
        };
        let mut k = 1u64;
        loop {
            let sigma = k as f64 * fine;
            if sigma > cfg.sigma_cap {
                break;
            }
            let levels = problem.levels_at(q_max, sigma);
            let saturated = levels.iter().all(|&l| l == q_max);
            consider(sigma, levels);
            if saturated {
                // every larger sigma yields the same levels
                break;
            }
            k += 1;
        }
        consider(f64::INFINITY, problem.levels_at(q_max, f64::INFINITY));

        if let Some((_, sigma, levels)) = best {
            return Ok(problem.assignment(priorities, levels, sigma, q_max, true));
        }
    }
    Ok(problem.infeasible(priorities))
}

/// Which per-chunk optimizer a session uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Optimizer {
    #[default]
    Scan,
    Exhaustive,
}

/// Adapts every chunk of `table` independently, using the viewport and
/// bandwidth at the same position in the trace slices. Results are in chunk
/// order.
pub fn adapt_session(
    layout: &TileLayout,
    viewports: &[Viewport],
    table: &RateTable,
    bandwidth_bps: &[f64],
    cfg: &AdaptationConfig,
) -> Result<Vec<ChunkAssignment>> {
    adapt_session_with(layout, viewports, table, bandwidth_bps, cfg, Optimizer::Scan)
}

pub fn adapt_session_with(
    layout: &TileLayout,
    viewports: &[Viewport],
    table: &RateTable,
    bandwidth_bps: &[f64],
    cfg: &AdaptationConfig,
    optimizer: Optimizer,
) -> Result<Vec<ChunkAssignment>> {
    let chunks = table.chunks();
    if viewports.len() != chunks.len() || bandwidth_bps.len() != chunks.len() {
        return Err(Error::TraceMismatch(format!(
            "rate table has {} chunks but {} viewports and {} bandwidth samples",
            chunks.len(),
            viewports.len(),
            bandwidth_bps.len()
        )));
    }
    // ladder used by the exhaustive search only needs its height
    let ladder = QualityLadder::new((0..=cfg.q_max_initial).map(f64::from).collect())?;
    chunks
        .iter()
        .zip(viewports)
        .zip(bandwidth_bps)
        .map(|((&chunk, vp), &bw)| {
            let priorities = assign_priorities(layout, vp);
            match optimizer {
                Optimizer::Scan => adapt_chunk(layout, &priorities, table, chunk, bw, cfg),
                Optimizer::Exhaustive => {
                    optimize_exhaustive(layout, &priorities, table, chunk, bw, &ladder, cfg)
                }
            }
        })
        .collect()
}
