use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cyclic prefix flavour, expressed as a fraction of the useful symbol time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CpMode {
    /// 7% of the FFT length.
    Normal,
    /// 25% of the FFT length.
    Extended,
}

impl CpMode {
    pub fn fraction(self) -> f64 {
        match self {
            CpMode::Normal => 0.07,
            CpMode::Extended => 0.25,
        }
    }
}

impl std::str::FromStr for CpMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "normal" => Ok(CpMode::Normal),
            "extended" => Ok(CpMode::Extended),
            other => Err(Error::Parameter(format!("unknown CP mode `{other}`"))),
        }
    }
}

pub const DEFAULT_FFT_SIZE: usize = 1024;

/// OFDM timing derived from the numerology index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OfdmConfig {
    pub mu: u32,
    pub cp: CpMode,
    #[serde(default = "default_fft_size")]
    pub fft_size: usize,
    /// Occupied subcarriers, centred on DC. Filled in from the CORESET width
    /// when zero.
    #[serde(default)]
    pub n_occupied: usize,
}

fn default_fft_size() -> usize {
    DEFAULT_FFT_SIZE
}

impl OfdmConfig {
    pub fn new(mu: u32, cp: CpMode, fft_size: usize, n_occupied: usize) -> Result<Self> {
        let cfg = Self {
            mu,
            cp,
            fft_size,
            n_occupied,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.mu > 6 {
            return Err(Error::Parameter(format!("numerology {} out of range", self.mu)));
        }
        if !self.fft_size.is_power_of_two() || self.fft_size < 64 {
            return Err(Error::Parameter(format!(
                "FFT size {} must be a power of two >= 64",
                self.fft_size
            )));
        }
        if self.n_occupied == 0 || self.n_occupied > self.fft_size {
            return Err(Error::Parameter(format!(
                "occupied subcarriers {} must be in 1..={}",
                self.n_occupied, self.fft_size
            )));
        }
        Ok(())
    }

    /// Subcarrier spacing in Hz.
    pub fn delta_f_hz(&self) -> f64 {
        15e3 * f64::from(1u32 << self.mu)
    }

    /// Useful symbol duration in microseconds.
    pub fn t_u_us(&self) -> f64 {
        1e6 / self.delta_f_hz()
    }

    /// Cyclic prefix duration in microseconds (exact, not sample-rounded).
    pub fn t_cp_us(&self) -> f64 {
        self.cp.fraction() * self.t_u_us()
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.fft_size as f64 * self.delta_f_hz()
    }

    pub fn cp_samples(&self) -> usize {
        (self.t_cp_us() * 1e-6 * self.sample_rate_hz()).round() as usize
    }

    pub fn symbol_samples(&self) -> usize {
        self.fft_size + self.cp_samples()
    }

    /// Signed FFT bin of occupied subcarrier `k`.
    pub fn bin_offset(&self, k: usize) -> isize {
        k as isize - (self.n_occupied / 2) as isize
    }

    /// FFT array index of occupied subcarrier `k`.
    pub fn fft_index(&self, k: usize) -> usize {
        self.bin_offset(k).rem_euclid(self.fft_size as isize) as usize
    }

    /// Rounds a delay in microseconds to whole samples.
    pub fn delay_samples(&self, delay_us: f64) -> usize {
        (delay_us * 1e-6 * self.sample_rate_hz()).round().max(0.0) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mu0_timing() {
        let c = OfdmConfig::new(0, CpMode::Normal, 1024, 72).unwrap();
        assert!((c.t_u_us() - 66.666_666).abs() < 1e-5);
        assert!((c.t_cp_us() - 0.07 * c.t_u_us()).abs() < 1e-12);
        assert_eq!(c.sample_rate_hz(), 15.36e6);
        assert_eq!(c.cp_samples(), 72);
        let e = OfdmConfig::new(0, CpMode::Extended, 1024, 72).unwrap();
        assert_eq!(e.cp_samples(), 256);
    }

    #[test]
    fn mu1_halves_symbol_time() {
        let a = OfdmConfig::new(0, CpMode::Normal, 1024, 72).unwrap();
        let b = OfdmConfig::new(1, CpMode::Normal, 1024, 72).unwrap();
        assert!((a.t_u_us() - 2.0 * b.t_u_us()).abs() < 1e-12);
        assert_eq!(b.delta_f_hz(), 30e3);
    }

    #[test]
    fn subcarrier_mapping_is_centred() {
        let c = OfdmConfig::new(0, CpMode::Normal, 1024, 72).unwrap();
        assert_eq!(c.bin_offset(0), -36);
        assert_eq!(c.fft_index(0), 1024 - 36);
        assert_eq!(c.fft_index(36), 0);
        assert_eq!(c.fft_index(71), 35);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(OfdmConfig::new(0, CpMode::Normal, 1000, 72).is_err());
        assert!(OfdmConfig::new(0, CpMode::Normal, 64, 72).is_err());
        assert!("weird".parse::<CpMode>().is_err());
    }
}
