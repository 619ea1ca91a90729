//! Batch execution of named experiments with CSV and JSON output.

use std::path::{Path, PathBuf};
use std::process::Command;

use serde::Serialize;

use super::config::{Campaign, SimConfig};
use super::sweep::{required_cnr, sweep, BlerCurve, BlerPoint, RequiredCnr};
use crate::channel::ChannelModel;
use crate::error::{Error, Result};

/// One CSV line; field order is the column order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CsvRow {
    pub experiment: String,
    pub cnr_db: f64,
    pub blocks: u64,
    pub block_errors: u64,
    pub bit_errors: u64,
    pub bler: f64,
    pub ber: f64,
    pub wilson_halfwidth: f64,
    pub seed: u64,
    pub wall_ms: f64,
}

impl CsvRow {
    pub fn new(experiment: &str, p: &BlerPoint) -> Self {
        Self {
            experiment: experiment.to_string(),
            cnr_db: p.cnr_db,
            blocks: p.blocks,
            block_errors: p.block_errors,
            bit_errors: p.bit_errors,
            bler: p.bler,
            ber: p.ber,
            wilson_halfwidth: p.wilson_halfwidth,
            seed: p.seed,
            wall_ms: p.wall_ms,
        }
    }
}

pub fn write_csv(path: &Path, rows: &[CsvRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|cause| Error::Io {
        path: path.to_path_buf(),
        cause,
    })
}

/// Rows of a curve, in CNR order.
pub fn curve_rows(experiment: &str, curve: &BlerCurve) -> Vec<CsvRow> {
    curve.points.iter().map(|p| CsvRow::new(experiment, p)).collect()
}

#[derive(Debug, Clone, Default)]
pub struct CampaignOptions {
    pub workers: usize,
    /// Replaces every experiment's master seed.
    pub seed: Option<u64>,
    /// Output stem; `.csv` and `.json` are appended. Defaults to the config
    /// path without extension.
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DelayRounding {
    pub requested_us: f64,
    pub realized_us: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentResult {
    pub name: String,
    pub config: SimConfig,
    pub master_seed: u64,
    pub required_cnr: RequiredCnr,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub echo_delay: Option<DelayRounding>,
    pub points: Vec<BlerPoint>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CampaignSummary {
    pub git_describe: String,
    pub config_path: PathBuf,
    pub config: Campaign,
    pub workers: usize,
    pub experiments: Vec<ExperimentResult>,
    #[serde(skip)]
    pub csv_path: PathBuf,
    #[serde(skip)]
    pub json_path: PathBuf,
}

/// Output of `git describe`, or `unknown` outside a work tree.
pub fn git_describe() -> String {
    Command::new("git")
        .args(["describe", "--always", "--dirty", "--tags"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .and_then(|o| String::from_utf8(o.stdout).ok())
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| "unknown".into())
}

fn echo_delay(cfg: &SimConfig) -> Result<Option<DelayRounding>> {
    if let ChannelModel::Echo { alpha, t_cp_ref_us } = &cfg.channel {
        let ofdm = cfg.ofdm_config()?;
        let requested = alpha * t_cp_ref_us.unwrap_or_else(|| ofdm.t_cp_us());
        let realized = ofdm.delay_samples(requested) as f64 / ofdm.sample_rate_hz() * 1e6;
        return Ok(Some(DelayRounding {
            requested_us: requested,
            realized_us: realized,
        }));
    }
    Ok(None)
}

/// Runs every experiment of the campaign at `path` and writes the results.
pub fn run_campaign(path: &Path, opts: &CampaignOptions) -> Result<CampaignSummary> {
    let campaign = Campaign::load(path)?;
    let workers = opts.workers.max(1);
    let mut results = Vec::new();
    let mut rows = Vec::new();
    for exp in &campaign.experiments {
        for (name, mut cfg) in exp.expand()? {
            if let Some(s) = opts.seed {
                cfg.master_seed = s;
            }
            let curve = sweep(&cfg, workers)?;
            rows.extend(curve_rows(&name, &curve));
            results.push(ExperimentResult {
                required_cnr: required_cnr(&curve, cfg.target_bler),
                echo_delay: echo_delay(&cfg)?,
                master_seed: cfg.master_seed,
                name,
                config: cfg,
                points: curve.points,
            });
        }
    }
    let stem = opts.out.clone().unwrap_or_else(|| path.with_extension(""));
    let csv_path = stem.with_extension("csv");
    let json_path = stem.with_extension("json");
    if let Some(dir) = stem.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|cause| Error::Io {
            path: dir.to_path_buf(),
            cause,
        })?;
    }
    write_csv(&csv_path, &rows)?;
    let summary = CampaignSummary {
        git_describe: git_describe(),
        config_path: path.to_path_buf(),
        config: campaign,
        workers,
        experiments: results,
        csv_path,
        json_path,
    };
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    std::fs::write(&summary.json_path, json).map_err(|cause| Error::Io {
        path: summary.json_path.clone(),
        cause,
    })?;
    Ok(summary)
}
