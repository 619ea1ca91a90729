//! CP-OFDM modulation with unitary transforms.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::ResourceGrid;
use super::numerology::OfdmConfig;
use crate::error::{Error, Result};

/// Modulator/demodulator holding FFT plans for one configuration.
#[derive(Clone)]
pub struct Ofdm {
    cfg: OfdmConfig,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scale: f64,
}

impl std::fmt::Debug for Ofdm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Ofdm").field("cfg", &self.cfg).finish()
    }
}

impl Ofdm {
    pub fn new(cfg: OfdmConfig) -> Result<Self> {
        cfg.validate()?;
        let mut planner = FftPlanner::new();
        Ok(Self {
            cfg,
            forward: planner.plan_fft_forward(cfg.fft_size),
            inverse: planner.plan_fft_inverse(cfg.fft_size),
            scale: 1.0 / (cfg.fft_size as f64).sqrt(),
        })
    }

    pub fn config(&self) -> &OfdmConfig {
        &self.cfg
    }

    /// Time-domain samples for every symbol of `grid`, CP first.
    pub fn modulate(&self, grid: &ResourceGrid) -> Result<Vec<Complex64>> {
        let mut out = Vec::with_capacity(grid.n_symbols() * self.cfg.symbol_samples());
        self.modulate_into(grid, &mut out)?;
        Ok(out)
    }

    /// Appends the waveform of `grid` to `out`.
    pub fn modulate_into(&self, grid: &ResourceGrid, out: &mut Vec<Complex64>) -> Result<()> {
        let c = &self.cfg;
        if grid.n_subcarriers() != c.n_occupied {
            return Err(Error::length("grid height", grid.n_subcarriers(), c.n_occupied));
        }
        let n = c.fft_size;
        let cp = c.cp_samples();
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for sym in 0..grid.n_symbols() {
            buf.fill(Complex64::new(0.0, 0.0));
            for (k, &v) in grid.symbol(sym).iter().enumerate() {
                buf[c.fft_index(k)] = v;
            }
            self.inverse.process(&mut buf);
            for v in buf.iter_mut() {
                *v *= self.scale;
            }
            out.extend_from_slice(&buf[n - cp..]);
            out.extend_from_slice(&buf);
        }
        Ok(())
    }

    /// Strips the CP of each of `n_sym` symbols and returns the occupied
    /// subcarriers after a unitary forward transform.
    pub fn demodulate(&self, samples: &[Complex64], n_sym: usize) -> Result<ResourceGrid> {
        let c = &self.cfg;
        let len = c.symbol_samples();
        if samples.len() != n_sym * len {
            return Err(Error::length("samples", samples.len(), n_sym * len));
        }
        let n = c.fft_size;
        let cp = c.cp_samples();
        let mut values = Vec::with_capacity(c.n_occupied * n_sym);
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for sym in 0..n_sym {
            let start = sym * len + cp;
            buf.copy_from_slice(&samples[start..start + n]);
            self.forward.process(&mut buf);
            values.extend((0..c.n_occupied).map(|k| buf[c.fft_index(k)] * self.scale));
        }
        ResourceGrid::from_values(c.n_occupied, n_sym, values)
    }
}

pub fn ofdm_modulate(grid: &ResourceGrid, cfg: &OfdmConfig) -> Result<Vec<Complex64>> {
    Ofdm::new(*cfg)?.modulate(grid)
}

pub fn ofdm_demodulate(samples: &[Complex64], cfg: &OfdmConfig) -> Result<ResourceGrid> {
    let len = cfg.symbol_samples();
    if samples.len() % len != 0 {
        return Err(Error::length("samples", samples.len(), format!("a multiple of {len}")));
    }
    Ofdm::new(*cfg)?.demodulate(samples, samples.len() / len)
}
