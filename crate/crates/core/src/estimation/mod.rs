//! Channel estimation from the CORESET DMRS and soft demapping.
//!
//! Pilots occupy every symbol, so each symbol is estimated on its own: least
//! squares at the pilot REs, then interpolation across frequency.

pub mod interp;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use interp::{default_window_taps, interp_dft, interp_linear, DftInterpolator};

use crate::coding::Llr;
use crate::error::{Error, Result};
use crate::framing::qpsk::qpsk_llr_unchecked;
use crate::framing::{CoresetConfig, CoresetLayout, ResourceGrid, DMRS_FREQ_SPACING};

pub const NOISE_FLOOR: f64 = 1e-6;
pub const MIN_NOISE_PILOTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    /// Receiver knows the discretized channel response.
    Perfect,
    LsLinear,
    LsDft,
}

/// Noise variance handed to the demapper.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseMode {
    /// The true noise variance.
    #[default]
    Genie,
    /// Estimated from the pilots.
    Blind,
}

/// Per-RE channel gains over the CORESET, symbol-major like `ResourceGrid`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelEstimate {
    pub n_subcarriers: usize,
    pub n_symbols: usize,
    pub gains: Vec<Complex64>,
    pub method: EstimatorKind,
}

impl ChannelEstimate {
    /// Estimate from known per-symbol responses.
    pub fn perfect(per_symbol: &[Vec<Complex64>]) -> Result<Self> {
        let n_sc = per_symbol.first().map_or(0, Vec::len);
        if let Some(bad) = per_symbol.iter().find(|s| s.len() != n_sc) {
            return Err(Error::length("channel response", bad.len(), n_sc));
        }
        Ok(Self {
            n_subcarriers: n_sc,
            n_symbols: per_symbol.len(),
            gains: per_symbol.concat(),
            method: EstimatorKind::Perfect,
        })
    }

    pub fn get(&self, sc: usize, sym: usize) -> Complex64 {
        self.gains[sym * self.n_subcarriers + sc]
    }

    pub fn symbol(&self, sym: usize) -> &[Complex64] {
        &self.gains[sym * self.n_subcarriers..(sym + 1) * self.n_subcarriers]
    }
}

/// Least-squares estimates `y_p / x_p` at every pilot, symbol-major.
pub fn ls_at_pilots(rx: &ResourceGrid, layout: &CoresetLayout) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(layout.pilot_subcarriers().len() * rx.n_symbols());
    for sym in 0..rx.n_symbols() {
        for (&sc, &x) in layout.pilot_subcarriers().iter().zip(layout.dmrs(sym)) {
            // unit-modulus pilots: 1/x = conj(x)
            out.push(rx.get(sc, sym) * x.conj());
        }
    }
    out
}

/// Pilot-based estimator for one CORESET geometry.
#[derive(Debug, Clone)]
pub struct Estimator {
    kind: EstimatorKind,
    coreset: CoresetConfig,
    pilots: Vec<usize>,
    dft: Option<DftInterpolator>,
}

impl Estimator {
    /// `window_taps` is only used by the DFT estimator.
    pub fn new(kind: EstimatorKind, coreset: CoresetConfig, window_taps: usize) -> Result<Self> {
        if kind == EstimatorKind::Perfect {
            return Err(Error::Parameter(
                "perfect estimates come from the channel, not the pilots".into(),
            ));
        }
        let dft = match kind {
            EstimatorKind::LsDft => Some(DftInterpolator::for_coreset(&coreset, window_taps)?),
            _ => None,
        };
        Ok(Self {
            kind,
            pilots: coreset.pilot_subcarriers(),
            coreset,
            dft,
        })
    }

    pub fn kind(&self) -> EstimatorKind {
        self.kind
    }

    pub fn estimate(&self, rx: &ResourceGrid, layout: &CoresetLayout) -> Result<ChannelEstimate> {
        let n_sc = self.coreset.n_subcarriers();
        if rx.n_subcarriers() != n_sc || rx.n_symbols() != self.coreset.n_sym {
            return Err(Error::length(
                "received grid REs",
                rx.values().len(),
                n_sc * self.coreset.n_sym,
            ));
        }
        let ls = ls_at_pilots(rx, layout);
        let p = self.pilots.len();
        let mut gains = vec![Complex64::new(0.0, 0.0); n_sc * rx.n_symbols()];
        for (sym, out) in gains.chunks_exact_mut(n_sc).enumerate() {
            let g = &ls[sym * p..(sym + 1) * p];
            match &self.dft {
                Some(dft) => dft.interpolate_into(g, out)?,
                None => interp::interp_linear_into(g, &self.pilots, out),
            }
        }
        Ok(ChannelEstimate {
            n_subcarriers: n_sc,
            n_symbols: rx.n_symbols(),
            gains,
            method: self.kind,
        })
    }
}

/// Noise variance per RE from the pilot residuals.
///
/// With a perfect estimate the residual `y_p - H_p x_p` is pure noise. For
/// pilot-based estimates, which pass through the pilots, the LS values are
/// smoothed by keeping half of the delay bins and the residual power is
/// scaled by `P / (P - W)` to undo the noise the smoother retains.
pub fn estimate_noise_variance(rx: &ResourceGrid, est: &ChannelEstimate, layout: &CoresetLayout) -> Result<f64> {
    let pilots = layout.pilot_subcarriers();
    let p = pilots.len();
    if p * rx.n_symbols() < MIN_NOISE_PILOTS {
        return Err(Error::Parameter(format!(
            "noise estimation needs at least {MIN_NOISE_PILOTS} pilots"
        )));
    }
    let mut acc = 0.0;
    let mut count = 0usize;
    if est.method == EstimatorKind::Perfect {
        for sym in 0..rx.n_symbols() {
            for (&sc, &x) in pilots.iter().zip(layout.dmrs(sym)) {
                acc += (rx.get(sc, sym) - est.get(sc, sym) * x).norm_sqr();
                count += 1;
            }
        }
        return Ok((acc / count as f64).max(NOISE_FLOOR));
    }
    let window = (p / 2).max(1);
    let smoother = DftInterpolator::new(p, 0, window)?;
    let ls = ls_at_pilots(rx, layout);
    let mut smooth = vec![Complex64::new(0.0, 0.0); p * DMRS_FREQ_SPACING];
    for g in ls.chunks_exact(p) {
        smoother.interpolate_into(g, &mut smooth)?;
        for (i, &v) in g.iter().enumerate() {
            acc += (v - smooth[i * DMRS_FREQ_SPACING]).norm_sqr();
            count += 1;
        }
    }
    let bias = p as f64 / (p - window) as f64;
    Ok((acc / count as f64 * bias).max(NOISE_FLOOR))
}

/// LLRs of the data REs in fill order, two per RE.
pub fn equalize_and_demap(
    rx: &ResourceGrid,
    est: &ChannelEstimate,
    layout: &CoresetLayout,
    sigma2: f64,
) -> Result<Vec<Llr>> {
    let mut out = Vec::with_capacity(2 * layout.data_indices().len());
    equalize_and_demap_into(rx, est, layout, sigma2, &mut out)?;
    Ok(out)
}

pub fn equalize_and_demap_into(
    rx: &ResourceGrid,
    est: &ChannelEstimate,
    layout: &CoresetLayout,
    sigma2: f64,
    out: &mut Vec<Llr>,
) -> Result<()> {
    if !(sigma2 > 0.0) {
        return Err(Error::Parameter(format!("noise variance {sigma2} must be positive")));
    }
    if est.gains.len() != rx.values().len() {
        return Err(Error::length("channel estimate", est.gains.len(), rx.values().len()));
    }
    out.clear();
    let y = rx.values();
    for &i in layout.data_indices() {
        out.extend_from_slice(&qpsk_llr_unchecked(y[i], est.gains[i], sigma2));
    }
    Ok(())
}
