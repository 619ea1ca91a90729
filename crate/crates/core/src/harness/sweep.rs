//! Monte Carlo BLER points, CNR sweeps and required-CNR search.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::SimConfig;
use super::sim::{LinkSimulator, TrialOutcome};
use crate::channel::CnrSpec;
use crate::error::{Error, Result};

/// Trials per scheduling batch. The stop rule is checked between batches,
/// so the block count never depends on how trials are spread over workers.
pub const BATCH: u64 = 200;
const WILSON_Z: f64 = 1.959_963_984_540_054;

/// Seed of trial `trial` at grid point `point`.
pub fn trial_seed(master: u64, point: u64, trial: u64) -> u64 {
    splitmix(master ^ splitmix(point.wrapping_add(0x6A09_E667_F3BC_C909)) ^ splitmix(trial).rotate_left(17))
}

fn splitmix(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Half-width of the 95% Wilson score interval for `k` successes in `n`.
pub fn wilson_halfwidth(k: u64, n: u64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let (n, p) = (n as f64, k as f64 / n as f64);
    let z2 = WILSON_Z * WILSON_Z;
    WILSON_Z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlerPoint {
    pub cnr_db: f64,
    pub blocks: u64,
    pub block_errors: u64,
    pub bit_errors: u64,
    pub bler: f64,
    pub ber: f64,
    pub wilson_halfwidth: f64,
    /// Seed of the grid point, i.e. of its first trial.
    pub seed: u64,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlerCurve {
    pub points: Vec<BlerPoint>,
}

/// How many workers to run; `None` uses the `PDCCHLAB_WORKERS` variable or
/// all cores.
pub fn resolve_workers(workers: Option<usize>) -> usize {
    workers
        .or_else(|| std::env::var("PDCCHLAB_WORKERS").ok()?.parse().ok())
        .filter(|&w| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Runs trials until the stop rule fires. `point` selects the seed stream.
pub fn run_bler_point_at(cfg: &SimConfig, cnr: CnrSpec, point: u64, workers: usize) -> Result<BlerPoint> {
    let sim = LinkSimulator::new(cfg)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Parameter(format!("worker pool: {e}")))?;
    let start = Instant::now();
    let (mut blocks, mut block_errors, mut bit_errors) = (0u64, 0u64, 0u64);
    while blocks < cfg.stop.max_blocks && block_errors < cfg.stop.min_block_errors {
        let end = (blocks + BATCH).min(cfg.stop.max_blocks);
        let batch: Vec<TrialOutcome> = pool.install(|| {
            (blocks..end)
                .into_par_iter()
                .map_init(
                    || sim.clone(),
                    |s, i| s.run_trial(cnr, trial_seed(cfg.master_seed, point, i)),
                )
                .collect::<Result<_>>()
        })?;
        for t in batch {
            block_errors += u64::from(t.block_error);
            bit_errors += u64::from(t.bit_errors);
        }
        blocks = end;
    }
    let bits = blocks * cfg.payload_bits as u64;
    Ok(BlerPoint {
        cnr_db: cnr.cnr_db,
        blocks,
        block_errors,
        bit_errors,
        bler: block_errors as f64 / blocks as f64,
        ber: bit_errors as f64 / bits as f64,
        wilson_halfwidth: wilson_halfwidth(block_errors, blocks),
        seed: trial_seed(cfg.master_seed, point, 0),
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// One BLER point on the seed stream of grid index 0.
pub fn run_bler_point(cfg: &SimConfig, cnr_db: f64, workers: usize) -> Result<BlerPoint> {
    run_bler_point_at(cfg, CnrSpec::db(cnr_db), 0, workers)
}

/// Evaluates the config's CNR grid in ascending order.
pub fn sweep(cfg: &SimConfig, workers: usize) -> Result<BlerCurve> {
    if cfg.cnr_db.len() < 2 {
        return Err(Error::Config("a sweep needs at least 2 CNR values".into()));
    }
    let mut grid = cfg.cnr_db.clone();
    grid.sort_by(f64::total_cmp);
    let mut points = Vec::with_capacity(grid.len());
    for (i, &c) in grid.iter().enumerate() {
        let p = run_bler_point_at(cfg, CnrSpec::db(c), i as u64, workers)?;
        let done = cfg.early_exit && p.bler < cfg.target_bler / 10.0;
        points.push(p);
        if done {
            break;
        }
    }
    Ok(BlerCurve { points })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RequiredCnr {
    Reached {
        cnr_db: f64,
    },
    /// Every point is above the target: the link never becomes reliable
    /// over the simulated range.
    Unreliable {
        max_cnr_db: f64,
    },
    /// Every point is already below the target.
    BelowGrid {
        min_cnr_db: f64,
    },
}

impl RequiredCnr {
    pub fn value(&self) -> Option<f64> {
        match self {
            RequiredCnr::Reached { cnr_db } => Some(*cnr_db),
            _ => None,
        }
    }
}

impl std::fmt::Display for RequiredCnr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RequiredCnr::Reached { cnr_db } => write!(f, "{cnr_db:.2} dB"),
            RequiredCnr::Unreliable { max_cnr_db } => {
                write!(f, "unreliable link (target not met up to {max_cnr_db} dB)")
            }
            RequiredCnr::BelowGrid { min_cnr_db } => write!(f, "below grid (target already met at {min_cnr_db} dB)"),
        }
    }
}

/// BLER used on the log axis; an error-free point counts as half an error.
fn log_bler(p: &BlerPoint) -> f64 {
    if p.block_errors == 0 {
        (0.5 / p.blocks as f64).log10()
    } else {
        p.bler.log10()
    }
}

/// Interpolates the target crossing linearly in (CNR, log10 BLER) between
/// the first pair of points that brackets it.
pub fn required_cnr(curve: &BlerCurve, target: f64) -> RequiredCnr {
    let mut pts: Vec<&BlerPoint> = curve.points.iter().collect();
    pts.sort_by(|a, b| a.cnr_db.total_cmp(&b.cnr_db));
    if pts.is_empty() {
        return RequiredCnr::Unreliable { max_cnr_db: f64::NAN };
    }
    if pts[0].bler < target {
        return RequiredCnr::BelowGrid {
            min_cnr_db: pts[0].cnr_db,
        };
    }
    let lt = target.log10();
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a.bler >= target && b.bler < target {
            let (la, lb) = (log_bler(a), log_bler(b));
            let t = if la == lb { 0.0 } else { (la - lt) / (la - lb) };
            return RequiredCnr::Reached {
                cnr_db: a.cnr_db + t.clamp(0.0, 1.0) * (b.cnr_db - a.cnr_db),
            };
        }
    }
    RequiredCnr::Unreliable {
        max_cnr_db: pts[pts.len() - 1].cnr_db,
    }
}

/// Stepwise search for the target crossing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchPlan {
    pub start_db: f64,
    pub step_db: f64,
    pub max_db: f64,
    /// Lowest CNR tried when the start point already meets the target.
    pub min_db: f64,
}

/// Walks the CNR axis from `start_db` in steps until the target is
/// bracketed, then interpolates. Points are seeded by their position on the
/// step lattice, so repeated searches reuse the same trials.
pub fn search_required_cnr(cfg: &SimConfig, plan: SearchPlan, workers: usize) -> Result<(RequiredCnr, BlerCurve)> {
    if !(plan.step_db > 0.0) {
        return Err(Error::Parameter("search step must be positive".into()));
    }
    let target = cfg.target_bler;
    let eval = |i: i64| {
        let c = plan.start_db + i as f64 * plan.step_db;
        run_bler_point_at(cfg, CnrSpec::db(c), i.rem_euclid(1 << 32) as u64, workers)
    };
    let mut points = vec![eval(0)?];
    if points[0].bler < target {
        let mut i = 0;
        while points[0].bler < target {
            i -= 1;
            if plan.start_db + i as f64 * plan.step_db < plan.min_db {
                let curve = BlerCurve { points };
                return Ok((required_cnr(&curve, target), curve));
            }
            points.insert(0, eval(i)?);
        }
    } else {
        let mut i = 0;
        while points[points.len() - 1].bler >= target {
            i += 1;
            if plan.start_db + i as f64 * plan.step_db > plan.max_db + 1e-9 {
                break;
            }
            points.push(eval(i)?);
        }
    }
    let curve = BlerCurve { points };
    Ok((required_cnr(&curve, target), curve))
}
