//! Tapped-delay-line Rayleigh fading with a Clarke Doppler spectrum.
//!
//! Each tap is a sum of `SINUSOIDS` equal-power complex exponentials. The
//! arrival angles are evenly spread around the circle with a random common
//! offset and every sinusoid gets a random phase, so the time autocorrelation
//! of a tap follows `J0(2 pi f_d tau)` closely even for a single realization.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SINUSOIDS: usize = 32;
/// Largest phase advance of any sinusoid between exact gain evaluations.
pub const MAX_STEP_PHASE: f64 = 0.05;
const MAX_GAIN_STEP: usize = 4096;
pub const DEFAULT_DELAY_SPREAD_NS: f64 = 100.0;

// Normalized delays (in units of the RMS delay spread) and powers in dB of
// the NLOS tapped-delay-line profiles in 3GPP TR 38.901, tables 7.7.2-1/-3.
const TDL_A: [(f64, f64); 23] = [
    (0.0000, -13.4),
    (0.3819, 0.0),
    (0.4025, -2.2),
    (0.5868, -4.0),
    (0.4610, -6.0),
    (0.5375, -8.2),
    (0.6708, -9.9),
    (0.5750, -10.5),
    (0.7618, -7.5),
    (1.5375, -15.9),
    (1.8978, -6.6),
    (2.2242, -16.7),
    (2.1718, -12.4),
    (2.4942, -15.2),
    (2.5119, -10.8),
    (3.0582, -11.3),
    (4.0810, -12.7),
    (4.4579, -16.2),
    (4.5695, -18.3),
    (4.7966, -18.9),
    (5.0066, -16.6),
    (5.3043, -19.9),
    (9.6586, -29.7),
];

#[allow(clippy::approx_constant)]
const TDL_C: [(f64, f64); 24] = [
    (0.0000, -4.4),
    (0.2099, -1.2),
    (0.2219, -3.5),
    (0.2329, -5.2),
    (0.2176, -2.5),
    (0.6366, 0.0),
    (0.6448, -2.2),
    (0.6560, -3.9),
    (0.6584, -7.4),
    (0.7935, -7.1),
    (0.8213, -10.7),
    (0.9336, -11.1),
    (1.2285, -5.1),
    (1.3083, -6.8),
    (2.1704, -8.7),
    (2.7105, -13.2),
    (4.2589, -13.9),
    (4.6003, -13.9),
    (5.4902, -15.8),
    (5.6077, -17.1),
    (6.3065, -16.0),
    (6.6374, -15.7),
    (7.0427, -21.6),
    (8.6523, -22.8),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TdlProfile {
    #[serde(rename = "A")]
    A,
    #[serde(rename = "C")]
    C,
}

impl TdlProfile {
    /// Power delay profile as (delay us, power dB) for an RMS delay spread.
    pub fn pdp(self, delay_spread_ns: f64) -> Vec<(f64, f64)> {
        let table: &[(f64, f64)] = match self {
            TdlProfile::A => &TDL_A,
            TdlProfile::C => &TDL_C,
        };
        table.iter().map(|&(d, p)| (d * delay_spread_ns * 1e-3, p)).collect()
    }
}

#[derive(Debug, Clone)]
struct FadingTap {
    delay_us: f64,
    amplitude: f64,
    /// Angular Doppler frequencies, rad/s.
    omega: [f64; SINUSOIDS],
    phase: [f64; SINUSOIDS],
}

impl FadingTap {
    fn gain(&self, t: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (w, p) in self.omega.iter().zip(&self.phase) {
            acc += Complex64::from_polar(1.0, w * t + p);
        }
        acc * self.amplitude
    }
}

/// Rayleigh-faded tapped delay line; gains are a deterministic function of
/// absolute time for a given seed.
#[derive(Debug, Clone)]
pub struct TdlChannel {
    taps: Vec<FadingTap>,
    doppler_hz: f64,
    seed: u64,
}

impl TdlChannel {
    pub fn new(profile: TdlProfile, delay_spread_ns: f64, doppler_hz: f64, seed: u64) -> Result<Self> {
        if !(delay_spread_ns >= 0.0) {
            return Err(Error::Parameter(format!(
                "delay spread {delay_spread_ns} ns must be >= 0"
            )));
        }
        Self::from_pdp(&profile.pdp(delay_spread_ns), doppler_hz, seed)
    }

    /// Builds the channel from (delay us, mean power dB) pairs; powers are
    /// normalized to sum to one.
    pub fn from_pdp(pdp: &[(f64, f64)], doppler_hz: f64, seed: u64) -> Result<Self> {
        if pdp.is_empty() {
            return Err(Error::Parameter("empty power delay profile".into()));
        }
        if !(doppler_hz >= 0.0 && doppler_hz.is_finite()) {
            return Err(Error::Parameter(format!("Doppler {doppler_hz} Hz must be >= 0")));
        }
        let total: f64 = pdp.iter().map(|&(_, p)| 10f64.powf(p / 10.0)).sum();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let taps = pdp
            .iter()
            .map(|&(delay_us, p_db)| {
                let power = 10f64.powf(p_db / 10.0) / total;
                let offset: f64 = rng.gen();
                let mut omega = [0.0; SINUSOIDS];
                let mut phase = [0.0; SINUSOIDS];
                for m in 0..SINUSOIDS {
                    let theta = 2.0 * PI * (m as f64 + offset) / SINUSOIDS as f64;
                    omega[m] = 2.0 * PI * doppler_hz * theta.cos();
                    phase[m] = rng.gen_range(0.0..2.0 * PI);
                }
                FadingTap {
                    delay_us,
                    amplitude: (power / SINUSOIDS as f64).sqrt(),
                    omega,
                    phase,
                }
            })
            .collect();
        Ok(Self { taps, doppler_hz, seed })
    }

    pub fn doppler_hz(&self) -> f64 {
        self.doppler_hz
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n_taps(&self) -> usize {
        self.taps.len()
    }

    /// Mean tap powers (linear, summing to one).
    pub fn tap_powers(&self) -> Vec<f64> {
        self.taps
            .iter()
            .map(|t| t.amplitude * t.amplitude * SINUSOIDS as f64)
            .collect()
    }

    /// Complex gain of tap `i` at absolute time `t` seconds.
    pub fn tap_gain(&self, i: usize, t: f64) -> Complex64 {
        self.taps[i].gain(t)
    }

    /// Discrete impulse response at time `t`: (delay in samples, gain),
    /// taps sharing a rounded delay merged.
    pub fn impulse_response(&self, sample_rate_hz: f64, t: f64) -> Vec<(usize, Complex64)> {
        let mut out: Vec<(usize, Complex64)> = Vec::new();
        for tap in &self.taps {
            let d = (tap.delay_us * 1e-6 * sample_rate_hz).round() as usize;
            let g = tap.gain(t);
            match out.iter_mut().find(|(dd, _)| *dd == d) {
                Some((_, acc)) => *acc += g,
                None => out.push((d, g)),
            }
        }
        out.sort_by_key(|&(d, _)| d);
        out
    }

    fn delay_bins(&self, sample_rate_hz: f64) -> (Vec<usize>, Vec<usize>) {
        let mut bins: Vec<usize> = Vec::new();
        let mut tap_bin = Vec::with_capacity(self.taps.len());
        for tap in &self.taps {
            let d = (tap.delay_us * 1e-6 * sample_rate_hz).round() as usize;
            let b = match bins.iter().position(|&x| x == d) {
                Some(b) => b,
                None => {
                    bins.push(d);
                    bins.len() - 1
                }
            };
            tap_bin.push(b);
        }
        (bins, tap_bin)
    }

    /// Samples between exact gain evaluations: the largest step over which
    /// no sinusoid turns by more than `MAX_STEP_PHASE` radians.
    fn gain_step(&self, sample_rate_hz: f64) -> usize {
        if self.doppler_hz == 0.0 {
            return MAX_GAIN_STEP;
        }
        let step = MAX_STEP_PHASE * sample_rate_hz / (2.0 * PI * self.doppler_hz);
        (step.floor() as usize).clamp(1, MAX_GAIN_STEP)
    }

    /// Passes `samples` through the channel; sample `n` is at time
    /// `t0 + n / sample_rate_hz`. Samples before the block are taken as zero.
    ///
    /// Gains are evaluated exactly on a coarse time grid and interpolated
    /// linearly in between.
    pub fn apply(&self, samples: &[Complex64], sample_rate_hz: f64, t0: f64) -> Vec<Complex64> {
        let len = samples.len();
        let (bins, tap_bin) = self.delay_bins(sample_rate_hz);
        let step = self.gain_step(sample_rate_hz);
        let n_grid = len / step + 2;
        let dt = step as f64 / sample_rate_hz;
        // merged gain per delay bin on the coarse grid
        let mut grid = vec![Complex64::new(0.0, 0.0); bins.len() * n_grid];
        for (tap, &b) in self.taps.iter().zip(&tap_bin) {
            let row = &mut grid[b * n_grid..(b + 1) * n_grid];
            if self.doppler_hz == 0.0 {
                let g = tap.gain(t0);
                row.iter_mut().for_each(|v| *v += g);
                continue;
            }
            for (w, p) in tap.omega.iter().zip(&tap.phase) {
                let mut phasor = Complex64::from_polar(tap.amplitude, w * t0 + p);
                let rot = Complex64::from_polar(1.0, w * dt);
                for v in row.iter_mut() {
                    *v += phasor;
                    phasor *= rot;
                }
            }
        }
        let mut out = vec![Complex64::new(0.0, 0.0); len];
        let inv = 1.0 / step as f64;
        for (b, &d) in bins.iter().enumerate() {
            let row = &grid[b * n_grid..(b + 1) * n_grid];
            let mut t = d;
            while t < len {
                let m = t / step;
                let seg_end = ((m + 1) * step).min(len);
                let slope = (row[m + 1] - row[m]) * inv;
                let mut g = row[m] + slope * (t - m * step) as f64;
                for (o, x) in out[t..seg_end].iter_mut().zip(&samples[t - d..seg_end - d]) {
                    *o += g * x;
                    g += slope;
                }
                t = seg_end;
            }
        }
        out
    }
}

pub fn apply_tdl(samples: &[Complex64], ch: &TdlChannel, sample_rate_hz: f64, t0: f64) -> Vec<Complex64> {
    ch.apply(samples, sample_rate_hz, t0)
}

/// Doppler shift for a terminal moving at `speed_kmh` on carrier `carrier_hz`.
pub fn speed_to_doppler(speed_kmh: f64, carrier_hz: f64) -> f64 {
    speed_kmh / 3.6 * carrier_hz / crate::analysis::SPEED_OF_LIGHT
}
