//! Propagation models: AWGN, the static two-path echo and TDL fading.

pub mod awgn;
pub mod echo;
pub mod tdl;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use awgn::{add_noise, apply_awgn, CnrSpec};
pub use echo::{apply_echo, EchoChannel};
pub use tdl::{apply_tdl, speed_to_doppler, TdlChannel, TdlProfile};

use crate::error::{Error, Result};
use crate::framing::OfdmConfig;

/// Channel description as it appears in a simulation config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelModel {
    Awgn,
    Echo {
        alpha: f64,
        /// CP the delay factor refers to; defaults to the simulated CP.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        t_cp_ref_us: Option<f64>,
    },
    Tdl {
        profile: TdlProfile,
        #[serde(default = "default_delay_spread")]
        delay_spread_ns: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        doppler_hz: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        speed_kmh: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        carrier_hz: Option<f64>,
    },
}

fn default_delay_spread() -> f64 {
    tdl::DEFAULT_DELAY_SPREAD_NS
}

impl ChannelModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            ChannelModel::Awgn => Ok(()),
            ChannelModel::Echo { alpha, t_cp_ref_us } => {
                EchoChannel::new(*alpha, t_cp_ref_us.unwrap_or(1.0)).map(|_| ())
            }
            ChannelModel::Tdl { delay_spread_ns, .. } => {
                if !(*delay_spread_ns >= 0.0 && delay_spread_ns.is_finite()) {
                    return Err(Error::Config(format!("delay_spread_ns {delay_spread_ns} must be >= 0")));
                }
                self.doppler_hz().map(|_| ())
            }
        }
    }

    /// Maximum Doppler shift, either given directly or from speed and carrier.
    pub fn doppler_hz(&self) -> Result<f64> {
        match self {
            ChannelModel::Tdl {
                doppler_hz,
                speed_kmh,
                carrier_hz,
                ..
            } => match (doppler_hz, speed_kmh, carrier_hz) {
                (Some(f), None, None) if *f >= 0.0 && f.is_finite() => Ok(*f),
                (None, Some(v), Some(fc)) if *v >= 0.0 && *fc > 0.0 => Ok(speed_to_doppler(*v, *fc)),
                _ => Err(Error::Config(
                    "tdl channel needs either doppler_hz or both speed_kmh and carrier_hz".into(),
                )),
            },
            _ => Ok(0.0),
        }
    }

    /// Instantiates the channel for one trial.
    pub fn realize(&self, ofdm: &OfdmConfig, seed: u64) -> Result<Channel> {
        match self {
            ChannelModel::Awgn => Ok(Channel::Identity),
            ChannelModel::Echo { alpha, t_cp_ref_us } => {
                let ch = EchoChannel::new(*alpha, t_cp_ref_us.unwrap_or_else(|| ofdm.t_cp_us()))?;
                Ok(Channel::Echo(ch))
            }
            ChannelModel::Tdl {
                profile,
                delay_spread_ns,
                ..
            } => Ok(Channel::Tdl(TdlChannel::new(
                *profile,
                *delay_spread_ns,
                self.doppler_hz()?,
                seed,
            )?)),
        }
    }
}

/// A realized channel, ready to filter samples.
#[derive(Debug, Clone)]
pub enum Channel {
    Identity,
    Echo(EchoChannel),
    Tdl(TdlChannel),
}

impl Channel {
    /// Filters `samples` starting at absolute time `t0` seconds.
    pub fn apply(&self, samples: &[Complex64], sample_rate_hz: f64, t0: f64) -> Vec<Complex64> {
        match self {
            Channel::Identity => samples.to_vec(),
            Channel::Echo(ch) => apply_echo(samples, ch, sample_rate_hz),
            Channel::Tdl(ch) => ch.apply(samples, sample_rate_hz, t0),
        }
    }

    /// Sample-domain taps (delay, gain) at time `t`.
    pub fn impulse_response(&self, sample_rate_hz: f64, t: f64) -> Vec<(usize, Complex64)> {
        match self {
            Channel::Identity => vec![(0, Complex64::new(1.0, 0.0))],
            Channel::Echo(ch) => {
                let g = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                let d = ch.delay_samples(sample_rate_hz);
                if d == 0 {
                    vec![(0, g * 2.0)]
                } else {
                    vec![(0, g), (d, g)]
                }
            }
            Channel::Tdl(ch) => ch.impulse_response(sample_rate_hz, t),
        }
    }
}

/// Response of the discretized channel on each occupied subcarrier at
/// time `t`.
pub fn channel_frequency_response(ch: &Channel, cfg: &OfdmConfig, t: f64) -> Vec<Complex64> {
    let n = cfg.fft_size as f64;
    let fs = cfg.sample_rate_hz();
    match ch {
        Channel::Identity => vec![Complex64::new(1.0, 0.0); cfg.n_occupied],
        Channel::Echo(e) => {
            let d = e.delay_samples(fs);
            (0..cfg.n_occupied)
                .map(|k| EchoChannel::response(cfg.bin_offset(k), d, cfg.fft_size))
                .collect()
        }
        Channel::Tdl(_) => {
            let taps = ch.impulse_response(fs, t);
            (0..cfg.n_occupied)
                .map(|k| {
                    let bin = cfg.bin_offset(k) as f64;
                    taps.iter()
                        .map(|&(d, g)| g * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * bin * d as f64 / n))
                        .sum()
                })
                .collect()
        }
    }
}
