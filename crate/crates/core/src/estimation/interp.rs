//! Frequency-direction interpolation of pilot estimates.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::framing::grid::DMRS_FREQ_SPACING;
use crate::framing::{CoresetConfig, OfdmConfig};

/// Piecewise-linear interpolation between pilots at `positions` (ascending),
/// holding the nearest pilot value beyond the outermost pilots.
pub fn interp_linear(gains: &[Complex64], positions: &[usize], n_subcarriers: usize) -> Result<Vec<Complex64>> {
    if gains.len() != positions.len() {
        return Err(Error::length("pilot gains", gains.len(), positions.len()));
    }
    if gains.len() < 2 {
        return Err(Error::Parameter(format!(
            "linear interpolation needs at least 2 pilots, got {}",
            gains.len()
        )));
    }
    let mut out = vec![Complex64::new(0.0, 0.0); n_subcarriers];
    interp_linear_into(gains, positions, &mut out);
    Ok(out)
}

pub(crate) fn interp_linear_into(gains: &[Complex64], positions: &[usize], out: &mut [Complex64]) {
    let last = positions.len() - 1;
    let mut seg = 0;
    for (k, v) in out.iter_mut().enumerate() {
        if k <= positions[0] {
            *v = gains[0];
        } else if k >= positions[last] {
            *v = gains[last];
        } else {
            while positions[seg + 1] < k {
                seg += 1;
            }
            let (a, b) = (positions[seg], positions[seg + 1]);
            let t = (k - a) as f64 / (b - a) as f64;
            *v = gains[seg] + (gains[seg + 1] - gains[seg]) * t;
        }
    }
}

/// Number of delay bins covering the cyclic prefix on the pilot delay grid,
/// `round(P * D_x * T_cp / T_U)`, clamped to `2..=P`.
pub fn default_window_taps(coreset: &CoresetConfig, cfg: &OfdmConfig) -> usize {
    let p = coreset.pilots_per_symbol();
    let w = (p as f64 * DMRS_FREQ_SPACING as f64 * cfg.t_cp_us() / cfg.t_u_us()).round() as usize;
    w.clamp(2.min(p), p)
}

/// DFT-based interpolator for `P` pilots spaced `D_x` subcarriers apart.
///
/// The pilot estimates are taken to the delay domain with a `P`-point
/// inverse DFT, where bin `m` covers delays around `m T_U / (D_x P)`. Only the
/// first `window` bins are kept; the estimate on every subcarrier is then the
/// `D_x P`-point DFT of the truncated response.
#[derive(Clone)]
pub struct DftInterpolator {
    n_pilots: usize,
    window: usize,
    first_pilot: usize,
    inverse: Arc<dyn Fft<f64>>,
    forward: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for DftInterpolator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DftInterpolator")
            .field("n_pilots", &self.n_pilots)
            .field("window", &self.window)
            .finish()
    }
}

impl DftInterpolator {
    /// `first_pilot` is the subcarrier of pilot 0; pilot `p` sits at
    /// `first_pilot + D_x p`.
    pub fn new(n_pilots: usize, first_pilot: usize, window: usize) -> Result<Self> {
        if n_pilots == 0 {
            return Err(Error::Parameter("DFT interpolation needs pilots".into()));
        }
        if window == 0 || window > n_pilots {
            return Err(Error::Parameter(format!(
                "window of {window} taps must be in 1..={n_pilots}"
            )));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            n_pilots,
            window,
            first_pilot,
            inverse: planner.plan_fft_inverse(n_pilots),
            forward: planner.plan_fft_forward(n_pilots * DMRS_FREQ_SPACING),
        })
    }

    pub fn for_coreset(coreset: &CoresetConfig, window: usize) -> Result<Self> {
        let pilots = coreset.pilot_subcarriers();
        Self::new(pilots.len(), pilots[0], window)
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn n_pilots(&self) -> usize {
        self.n_pilots
    }

    /// Delay-domain response kept by the window (length `window`).
    pub fn delay_response(&self, gains: &[Complex64]) -> Result<Vec<Complex64>> {
        if gains.len() != self.n_pilots {
            return Err(Error::length("pilot gains", gains.len(), self.n_pilots));
        }
        let mut buf = gains.to_vec();
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.n_pilots as f64;
        buf.truncate(self.window);
        buf.iter_mut().for_each(|v| *v *= scale);
        Ok(buf)
    }

    /// Writes the estimate for subcarriers `0..out.len()`.
    pub fn interpolate_into(&self, gains: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        let taps = self.delay_response(gains)?;
        let size = self.n_pilots * DMRS_FREQ_SPACING;
        let mut spectrum = vec![Complex64::new(0.0, 0.0); size];
        spectrum[..self.window].copy_from_slice(&taps);
        self.forward.process(&mut spectrum);
        for (k, v) in out.iter_mut().enumerate() {
            let idx = (k as isize - self.first_pilot as isize).rem_euclid(size as isize) as usize;
            *v = spectrum[idx];
        }
        Ok(())
    }

    pub fn interpolate(&self, gains: &[Complex64], n_subcarriers: usize) -> Result<Vec<Complex64>> {
        let mut out = vec![Complex64::new(0.0, 0.0); n_subcarriers];
        self.interpolate_into(gains, &mut out)?;
        Ok(out)
    }
}

/// One-symbol DFT interpolation over a CORESET.
pub fn interp_dft(gains: &[Complex64], coreset: &CoresetConfig, window_taps: usize) -> Result<Vec<Complex64>> {
    DftInterpolator::for_coreset(coreset, window_taps)?.interpolate(gains, coreset.n_subcarriers())
}
