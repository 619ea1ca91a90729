//! Static two-path channel with equal path powers: an SFN receiver seeing a
//! second transmitter `alpha * T_cp` later.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EchoChannel {
    pub alpha: f64,
    /// CP duration the echo delay is expressed in, microseconds.
    pub t_cp_ref_us: f64,
}

impl EchoChannel {
    pub fn new(alpha: f64, t_cp_ref_us: f64) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::Parameter(format!("echo factor {alpha} must be >= 0")));
        }
        if !(t_cp_ref_us > 0.0 && t_cp_ref_us.is_finite()) {
            return Err(Error::Parameter(format!("reference CP {t_cp_ref_us} us must be > 0")));
        }
        Ok(Self { alpha, t_cp_ref_us })
    }

    pub fn delay_us(&self) -> f64 {
        self.alpha * self.t_cp_ref_us
    }

    /// Delay rounded to whole samples.
    pub fn delay_samples(&self, sample_rate_hz: f64) -> usize {
        (self.delay_us() * 1e-6 * sample_rate_hz).round() as usize
    }

    /// Response on a signed FFT bin for a delay of `d` samples.
    pub fn response(bin: isize, d: usize, fft_size: usize) -> Complex64 {
        let phase = -2.0 * PI * (bin as f64) * (d as f64) / fft_size as f64;
        (Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, phase)) * FRAC_1_SQRT_2
    }
}

/// `y[t] = (x[t] + x[t - d]) / sqrt(2)`, with `x[t < 0] = 0`.
pub fn apply_echo(samples: &[Complex64], ch: &EchoChannel, sample_rate_hz: f64) -> Vec<Complex64> {
    let d = ch.delay_samples(sample_rate_hz);
    samples
        .iter()
        .enumerate()
        .map(|(t, &x)| {
            let late = if t >= d {
                samples[t - d]
            } else {
                Complex64::new(0.0, 0.0)
            };
            (x + late) * FRAC_1_SQRT_2
        })
        .collect()
}
