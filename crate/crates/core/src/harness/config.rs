//! Simulation and campaign configuration files.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::ChannelModel;
use crate::coding::crc::{CRC_LEN, MAX_PAYLOAD_BITS};
use crate::coding::{PolarCodeConfig, DEFAULT_LIST_SIZE, MAX_LIST_SIZE};
use crate::error::{Error, Result};
use crate::estimation::{default_window_taps, EstimatorKind, NoiseMode};
use crate::framing::{CoresetConfig, CpMode, OfdmConfig};

pub const DEFAULT_PAYLOAD_BITS: usize = 40;
pub const DEFAULT_TARGET_BLER: f64 = 1e-3;

/// Numerology part of a config; the occupied width follows the CORESET.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OfdmSection {
    #[serde(default)]
    pub mu: u32,
    pub cp: CpMode,
    #[serde(default = "default_fft")]
    pub fft_size: usize,
}

fn default_fft() -> usize {
    crate::framing::numerology::DEFAULT_FFT_SIZE
}

/// CORESET part of a config. Width and duration default to the smallest
/// CORESET carrying the aggregation level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoresetSection {
    pub aggregation_level: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_rb: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_sym: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StopRule {
    #[serde(default = "default_min_errors")]
    pub min_block_errors: u64,
    #[serde(default = "default_max_blocks")]
    pub max_blocks: u64,
}

fn default_min_errors() -> u64 {
    100
}

fn default_max_blocks() -> u64 {
    1_000_000
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            min_block_errors: default_min_errors(),
            max_blocks: default_max_blocks(),
        }
    }
}

/// One link-level experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub ofdm: OfdmSection,
    pub coreset: CoresetSection,
    #[serde(default = "default_payload")]
    pub payload_bits: usize,
    pub channel: ChannelModel,
    pub estimator: EstimatorKind,
    /// Delay bins kept by the DFT estimator; the CP length when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_taps: Option<usize>,
    #[serde(default)]
    pub noise_mode: NoiseMode,
    #[serde(default = "default_list")]
    pub list_size: usize,
    #[serde(default)]
    pub cnr_db: Vec<f64>,
    #[serde(default)]
    pub stop: StopRule,
    #[serde(default = "default_seed")]
    pub master_seed: u64,
    #[serde(default = "default_target")]
    pub target_bler: f64,
    /// Stop a sweep once BLER falls below a tenth of the target.
    #[serde(default = "default_true")]
    pub early_exit: bool,
}

fn default_payload() -> usize {
    DEFAULT_PAYLOAD_BITS
}

fn default_list() -> usize {
    DEFAULT_LIST_SIZE
}

fn default_seed() -> u64 {
    1
}

fn default_target() -> f64 {
    DEFAULT_TARGET_BLER
}

fn default_true() -> bool {
    true
}

impl SimConfig {
    /// AWGN, perfect CE, normal CP at µ = 0.
    pub fn baseline(aggregation_level: usize) -> Self {
        Self {
            ofdm: OfdmSection {
                mu: 0,
                cp: CpMode::Normal,
                fft_size: default_fft(),
            },
            coreset: CoresetSection {
                aggregation_level,
                n_rb: None,
                n_sym: None,
            },
            payload_bits: DEFAULT_PAYLOAD_BITS,
            channel: ChannelModel::Awgn,
            estimator: EstimatorKind::Perfect,
            window_taps: None,
            noise_mode: NoiseMode::Genie,
            list_size: DEFAULT_LIST_SIZE,
            cnr_db: Vec::new(),
            stop: StopRule::default(),
            master_seed: default_seed(),
            target_bler: DEFAULT_TARGET_BLER,
            early_exit: true,
        }
    }

    pub fn coreset_config(&self) -> Result<CoresetConfig> {
        let d = CoresetConfig::for_level(self.coreset.aggregation_level).map_err(to_config)?;
        CoresetConfig::new(
            self.coreset.n_rb.unwrap_or(d.n_rb),
            self.coreset.n_sym.unwrap_or(d.n_sym),
            self.coreset.aggregation_level,
        )
        .map_err(to_config)
    }

    pub fn ofdm_config(&self) -> Result<OfdmConfig> {
        let n_occ = self.coreset_config()?.n_subcarriers();
        OfdmConfig::new(self.ofdm.mu, self.ofdm.cp, self.ofdm.fft_size, n_occ).map_err(to_config)
    }

    pub fn code_config(&self) -> Result<PolarCodeConfig> {
        let e = self.coreset_config()?.coded_bits();
        PolarCodeConfig::new(self.payload_bits + CRC_LEN, e).map_err(to_config)
    }

    /// Window of the DFT estimator, explicit or CP-derived.
    pub fn dft_window(&self) -> Result<usize> {
        match self.window_taps {
            Some(w) => Ok(w),
            None => Ok(default_window_taps(&self.coreset_config()?, &self.ofdm_config()?)),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.payload_bits == 0 || self.payload_bits > MAX_PAYLOAD_BITS {
            return Err(Error::Config(format!(
                "payload_bits {} must be in 1..={MAX_PAYLOAD_BITS}",
                self.payload_bits
            )));
        }
        let coreset = self.coreset_config()?;
        self.ofdm_config()?;
        self.code_config()?;
        self.channel.validate().map_err(to_config)?;
        if !self.list_size.is_power_of_two() || self.list_size > MAX_LIST_SIZE {
            return Err(Error::Config(format!(
                "list_size {} must be a power of two <= {MAX_LIST_SIZE}",
                self.list_size
            )));
        }
        if self.estimator == EstimatorKind::LsDft {
            let w = self.dft_window()?;
            let p = coreset.pilots_per_symbol();
            if w == 0 || w > p {
                return Err(Error::Config(format!("window_taps {w} must be in 1..={p}")));
            }
        }
        if self.estimator != EstimatorKind::Perfect && coreset.pilots_per_symbol() < 2 {
            return Err(Error::Config("pilot-based estimation needs at least 2 pilots".into()));
        }
        if let Some(c) = self.cnr_db.iter().find(|c| !c.is_finite()) {
            return Err(Error::Config(format!("CNR grid value {c} is not finite")));
        }
        if self.stop.min_block_errors == 0 || self.stop.max_blocks == 0 {
            return Err(Error::Config("stop rule limits must be positive".into()));
        }
        if !(self.target_bler > 0.0 && self.target_bler < 1.0) {
            return Err(Error::Config(format!(
                "target_bler {} must be in (0, 1)",
                self.target_bler
            )));
        }
        Ok(())
    }

    pub fn from_json(text: &str, path: &Path) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|cause| Error::Parse {
            path: path.to_path_buf(),
            cause,
        })?;
        cfg.validate()
            .map_err(|e| Error::Config(format!("{}: {}", path.display(), strip(e))))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&read(path)?, path)
    }
}

fn to_config(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

fn strip(e: Error) -> String {
    match e {
        Error::Config(m) => m,
        other => other.to_string(),
    }
}

pub(crate) fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|cause| Error::Io {
        path: path.to_path_buf(),
        cause,
    })
}

/// Parameter an experiment is repeated over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Vary {
    /// Echo delay factors.
    Alpha(Vec<f64>),
    /// TDL Doppler shifts.
    DopplerHz(Vec<f64>),
    /// TDL speeds, with the carrier from the channel section.
    SpeedKmh(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Experiment {
    pub name: String,
    pub config: SimConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vary: Option<Vary>,
}

impl Experiment {
    /// Expands `vary` into one named config per value.
    pub fn expand(&self) -> Result<Vec<(String, SimConfig)>> {
        let Some(vary) = &self.vary else {
            return Ok(vec![(self.name.clone(), self.config.clone())]);
        };
        let (key, values) = match vary {
            Vary::Alpha(v) => ("alpha", v),
            Vary::DopplerHz(v) => ("doppler_hz", v),
            Vary::SpeedKmh(v) => ("speed_kmh", v),
        };
        values
            .iter()
            .map(|&x| {
                let mut cfg = self.config.clone();
                match (&mut cfg.channel, vary) {
                    (ChannelModel::Echo { alpha, .. }, Vary::Alpha(_)) => *alpha = x,
                    (
                        ChannelModel::Tdl {
                            doppler_hz, speed_kmh, ..
                        },
                        Vary::DopplerHz(_),
                    ) => {
                        *doppler_hz = Some(x);
                        *speed_kmh = None;
                    }
                    (ChannelModel::Tdl { speed_kmh, .. }, Vary::SpeedKmh(_)) => *speed_kmh = Some(x),
                    _ => return Err(Error::Config(format!("cannot vary {key} on this channel"))),
                }
                Ok((format!("{}/{key}={x}", self.name), cfg))
            })
            .collect()
    }
}

/// A set of named experiments run and stored together.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Campaign {
    pub experiments: Vec<Experiment>,
}

impl Campaign {
    pub fn from_json(text: &str, path: &Path) -> Result<Self> {
        let campaign: Self = serde_json::from_str(text).map_err(|cause| Error::Parse {
            path: path.to_path_buf(),
            cause,
        })?;
        for exp in &campaign.experiments {
            let located = |msg: String| {
                let line = find_line(text, &format!("\"{}\"", exp.name));
                match line {
                    Some(l) => Error::Config(format!("{}:{l}: experiment `{}`: {msg}", path.display(), exp.name)),
                    None => Error::Config(format!("{}: experiment `{}`: {msg}", path.display(), exp.name)),
                }
            };
            for (_, cfg) in exp.expand().map_err(|e| located(strip(e)))? {
                cfg.validate().map_err(|e| located(strip(e)))?;
            }
        }
        if campaign.experiments.is_empty() {
            return Err(Error::Config(format!("{}: no experiments", path.display())));
        }
        Ok(campaign)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&read(path)?, path)
    }
}

/// 1-based line of the first occurrence of `needle`.
fn find_line(text: &str, needle: &str) -> Option<usize> {
    text.find(needle).map(|pos| text[..pos].lines().count().max(1))
}
