//! Closed-form pilot-lattice limits and spectral-efficiency curves.
//!
//! Times are in microseconds, frequencies in Hz.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::framing::{CpMode, DMRS_FREQ_SPACING, DMRS_TIME_SPACING};

pub const SPEED_OF_LIGHT: f64 = 2.998e8;
pub const DEFAULT_SE_DRAWS: usize = 100_000;
const SE_SEED: u64 = 0x5EED_B1C3;

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} = {v} must be positive")))
    }
}

/// Largest pilot spacing in time, in OFDM symbols.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeSpacing {
    pub real: f64,
    /// `None` when the spacing is unbounded (no Doppler).
    pub floor: Option<u64>,
}

impl TimeSpacing {
    pub fn is_unbounded(&self) -> bool {
        self.floor.is_none()
    }
}

/// `n_max = 1 / (2 (T_U + T_cp) d_max)`.
pub fn max_time_pilot_spacing(t_u_us: f64, t_cp_us: f64, d_max_hz: f64) -> Result<TimeSpacing> {
    positive("T_U", t_u_us)?;
    if !(t_cp_us >= 0.0 && t_cp_us.is_finite()) {
        return Err(Error::Parameter(format!("T_cp = {t_cp_us} must be >= 0")));
    }
    if !(d_max_hz >= 0.0) {
        return Err(Error::Parameter(format!("Doppler {d_max_hz} must be >= 0")));
    }
    let real = 1.0 / (2.0 * (t_u_us + t_cp_us) * 1e-6 * d_max_hz);
    let floor = (real.is_finite() && real < 2f64.powi(63)).then(|| real.floor() as u64);
    Ok(TimeSpacing { real, floor })
}

/// Highest Doppler shift a pilot every `d_y` symbols can track,
/// `f_p = 1 / (2 D_y (T_U + T_cp))`.
pub fn max_doppler(d_y: usize, t_u_us: f64, t_cp_us: f64) -> Result<f64> {
    if d_y == 0 {
        return Err(Error::Parameter("D_y must be >= 1".into()));
    }
    positive("T_U", t_u_us)?;
    positive("T_cp", t_cp_us)?;
    Ok(1.0 / (2.0 * d_y as f64 * (t_u_us + t_cp_us) * 1e-6))
}

/// Terminal speed in km/h that produces Doppler `f_hz` on `carrier_hz`.
pub fn doppler_to_speed(f_hz: f64, carrier_hz: f64) -> Result<f64> {
    positive("carrier", carrier_hz)?;
    Ok(f_hz * SPEED_OF_LIGHT / carrier_hz * 3.6)
}

/// Longest delay spread a pilot every `d_x` subcarriers resolves, `T_U / D_x`.
pub fn max_delay_spread(t_u_us: f64, d_x: usize) -> Result<f64> {
    if d_x == 0 {
        return Err(Error::Parameter("D_x must be >= 1".into()));
    }
    positive("T_U", t_u_us)?;
    Ok(t_u_us / d_x as f64)
}

/// Energy spent on the cyclic prefix, in dB.
pub fn cnr_loss_db(t_cp_us: f64, t_u_us: f64) -> Result<f64> {
    positive("T_U", t_u_us)?;
    if !(t_cp_us >= 0.0 && t_cp_us.is_finite()) {
        return Err(Error::Parameter(format!("T_cp = {t_cp_us} must be >= 0")));
    }
    Ok(-10.0 * (1.0 - t_cp_us / (t_u_us + t_cp_us)).log10())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DopplerLimit {
    pub f_p: f64,
    pub n_max: TimeSpacing,
    /// (carrier Hz, km/h)
    pub speeds: Vec<(f64, f64)>,
}

impl DopplerLimit {
    /// Limit for the pilot lattice, with the time spacing evaluated at `d_max_hz`.
    pub fn new(d_y: usize, t_u_us: f64, t_cp_us: f64, d_max_hz: f64, carriers_hz: &[f64]) -> Result<Self> {
        let f_p = max_doppler(d_y, t_u_us, t_cp_us)?;
        let speeds = carriers_hz
            .iter()
            .map(|&fc| Ok((fc, doppler_to_speed(f_p, fc)?)))
            .collect::<Result<_>>()?;
        Ok(Self {
            f_p,
            n_max: max_time_pilot_spacing(t_u_us, t_cp_us, d_max_hz)?,
            speeds,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DelayLimit {
    pub m_max: usize,
    pub tau_max_us: f64,
}

impl DelayLimit {
    pub fn new(t_u_us: f64, d_x: usize) -> Result<Self> {
        Ok(Self {
            m_max: d_x,
            tau_max_us: max_delay_spread(t_u_us, d_x)?,
        })
    }
}

/// Everything the closed forms say about one numerology.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitsReport {
    pub mu: u32,
    pub t_u_us: f64,
    pub t_cp_us: f64,
    pub doppler: DopplerLimit,
    pub delay: DelayLimit,
    pub cnr_loss_db: f64,
}

impl LimitsReport {
    /// `t_cp_us` overrides the CP implied by `cp`; `d_max_hz` defaults to `f_p`.
    pub fn new(mu: u32, cp: CpMode, t_cp_us: Option<f64>, carriers_hz: &[f64], d_max_hz: Option<f64>) -> Result<Self> {
        if mu > 6 {
            return Err(Error::Parameter(format!("numerology {mu} out of range")));
        }
        let t_u_us = 1e3 / (15.0 * f64::from(1u32 << mu));
        let t_cp_us = t_cp_us.unwrap_or(cp.fraction() * t_u_us);
        let f_p = max_doppler(DMRS_TIME_SPACING, t_u_us, t_cp_us)?;
        Ok(Self {
            mu,
            t_u_us,
            t_cp_us,
            doppler: DopplerLimit::new(DMRS_TIME_SPACING, t_u_us, t_cp_us, d_max_hz.unwrap_or(f_p), carriers_hz)?,
            delay: DelayLimit::new(t_u_us, DMRS_FREQ_SPACING)?,
            cnr_loss_db: cnr_loss_db(t_cp_us, t_u_us)?,
        })
    }
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

pub fn shannon_capacity(cnr_db: f64) -> f64 {
    (1.0 + 10f64.powf(cnr_db / 10.0)).log2()
}

/// `log2(1 + exp(-l))` without overflow.
fn log2_1p_exp_neg(l: f64) -> f64 {
    let v = if l > 0.0 {
        (-l).exp().ln_1p()
    } else {
        -l + l.exp().ln_1p()
    };
    v / std::f64::consts::LN_2
}

/// Mutual information of Gray-labelled QPSK with bitwise decoding on AWGN.
///
/// Both bits see a BPSK channel with SNR equal to the symbol CNR, where the
/// true-bit LLR is `N(2 snr, 4 snr)`; the result is twice the BPSK capacity.
pub fn bicm_se_qpsk(cnr_db: f64) -> Estimate {
    bicm_se_qpsk_with(cnr_db, DEFAULT_SE_DRAWS, SE_SEED)
}

pub fn bicm_se_qpsk_with(cnr_db: f64, draws: usize, seed: u64) -> Estimate {
    let snr = 10f64.powf(cnr_db / 10.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..draws {
        let z: f64 = StandardNormal.sample(&mut rng);
        let loss = log2_1p_exp_neg(2.0 * snr + 2.0 * snr.sqrt() * z);
        sum += loss;
        sum_sq += loss * loss;
    }
    let n = draws as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    Estimate {
        value: 2.0 * (1.0 - mean),
        std_error: 2.0 * (var / n).sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Gauss-Hermite nodes and weights for weight exp(-x^2), by Newton
    /// iteration on the orthonormal Hermite recurrence.
    fn gauss_hermite(n: usize) -> Vec<(f64, f64)> {
        let mut out = vec![(0.0, 0.0); n];
        let m = n.div_ceil(2);
        let pim4 = PI.powf(-0.25);
        let mut z = 0.0f64;
        for i in 0..m {
            z = match i {
                0 => (2.0 * n as f64 + 1.0).sqrt() - 1.85575 * (2.0 * n as f64 + 1.0).powf(-1.0 / 6.0),
                1 => z - 1.14 * (n as f64).powf(0.426) / z,
                2 => 1.86 * z - 0.86 * out[0].0,
                3 => 1.91 * z - 0.91 * out[1].0,
                _ => 2.0 * z - out[i - 2].0,
            };
            let mut pp = 0.0;
            for _ in 0..100 {
                let (mut p1, mut p2) = (pim4, 0.0);
                for j in 1..=n {
                    let p3 = p2;
                    p2 = p1;
                    p1 = z * (2.0 / j as f64).sqrt() * p2 - ((j - 1) as f64 / j as f64).sqrt() * p3;
                }
                pp = (2.0 * n as f64).sqrt() * p2;
                let dz = p1 / pp;
                z -= dz;
                if dz.abs() < 1e-14 {
                    break;
                }
            }
            out[i] = (z, 2.0 / (pp * pp));
            out[n - 1 - i] = (-z, 2.0 / (pp * pp));
        }
        out
    }

    fn bicm_quadrature(cnr_db: f64) -> f64 {
        let snr = 10f64.powf(cnr_db / 10.0);
        let e: f64 = gauss_hermite(80)
            .iter()
            .map(|&(x, w)| w * log2_1p_exp_neg(2.0 * snr + 2.0 * snr.sqrt() * 2f64.sqrt() * x))
            .sum::<f64>()
            / PI.sqrt();
        2.0 * (1.0 - e)
    }

    #[test]
    fn quadrature_rule_integrates_moments() {
        let rule = gauss_hermite(80);
        let w: f64 = rule.iter().map(|r| r.1).sum();
        let m2: f64 = rule.iter().map(|r| r.1 * r.0 * r.0).sum();
        assert!((w - PI.sqrt()).abs() < 1e-12);
        assert!((m2 - PI.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn bicm_matches_quadrature() {
        for db in [-10.0, 0.0, 5.0] {
            let mc = bicm_se_qpsk(db);
            assert!((mc.value - bicm_quadrature(db)).abs() < 0.02, "{db} dB");
            assert!(mc.std_error < 0.01);
        }
        // independent numpy reference at 0 dB
        assert!((bicm_quadrature(0.0) - 0.971_888_308).abs() < 1e-8);
    }

    #[test]
    fn bicm_saturates_at_two_bits() {
        assert!((bicm_se_qpsk(30.0).value - 2.0).abs() < 0.01);
    }

    #[test]
    fn shannon_at_zero_db() {
        assert!((shannon_capacity(0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn doppler_limits() {
        let f = max_doppler(1, 66.67, 5.2).unwrap();
        assert!((f - 6957.0057).abs() < 1e-3);
        assert_eq!(max_doppler(2, 66.67, 5.2).unwrap(), f / 2.0);
        let f1 = max_doppler(1, 33.333, 0.07 * 33.333).unwrap();
        let f0 = max_doppler(1, 66.667, 0.07 * 66.667).unwrap();
        assert!((f1 / f0 - 2.0).abs() < 1e-4);
        assert!(max_doppler(0, 66.67, 5.2).is_err());
        assert!(max_doppler(1, -1.0, 5.2).is_err());
    }

    #[test]
    fn time_spacing() {
        let s = max_time_pilot_spacing(66.67, 5.2, 6963.6).unwrap();
        assert!((s.real - 1.0).abs() < 1e-3);
        assert_eq!(s.floor, Some(0));
        let exact = max_time_pilot_spacing(66.67, 5.2, 6957.0057).unwrap();
        assert!((exact.real - 1.0).abs() < 1e-6);
        let half = max_time_pilot_spacing(66.67, 5.2, 2.0 * 6957.0057).unwrap();
        assert!((half.real - exact.real / 2.0).abs() < 1e-12);
        assert!(max_time_pilot_spacing(66.67, 5.2, 0.0).unwrap().is_unbounded());
        assert!(max_time_pilot_spacing(66.67, 5.2, -1.0).is_err());
    }

    #[test]
    fn speeds() {
        assert_eq!(doppler_to_speed(0.0, 7e8).unwrap(), 0.0);
        assert!((doppler_to_speed(100.0, 1e9).unwrap() - 107.928).abs() < 1e-9);
        assert!(doppler_to_speed(100.0, 0.0).is_err());
    }

    #[test]
    fn delay_and_cp_loss() {
        assert_eq!(max_delay_spread(66.0, 1).unwrap(), 66.0);
        assert_eq!(
            max_delay_spread(33.3, 4).unwrap() * 2.0,
            max_delay_spread(66.6, 4).unwrap()
        );
        assert!((cnr_loss_db(0.25, 1.0).unwrap() - 0.969_100_130).abs() < 1e-9);
        assert!((cnr_loss_db(0.07, 1.0).unwrap() - 0.293_837_777).abs() < 1e-9);
        assert_eq!(cnr_loss_db(0.0, 1.0).unwrap(), 0.0);
        assert!(cnr_loss_db(0.3, 1.0).unwrap() > cnr_loss_db(0.25, 1.0).unwrap());
    }

    #[test]
    fn report_for_mu0() {
        let r = LimitsReport::new(0, CpMode::Normal, Some(5.2), &[7e8, 4e9], None).unwrap();
        assert!((r.t_u_us - 66.6667).abs() < 1e-3);
        assert!((r.delay.tau_max_us - 16.6667).abs() < 1e-3);
        assert_eq!(r.doppler.speeds.len(), 2);
        assert!((r.doppler.n_max.real - 1.0).abs() < 1e-12);
    }
}
