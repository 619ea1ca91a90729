//! Polar code construction and encoding for DCI-sized blocks.

use super::rate_match::{output_sources, untransmitted_positions, RateMatchMode};
use super::reliability::reliability_order;
use crate::error::{Error, Result};

pub const MIN_LOG_N: usize = 5;
pub const MAX_LOG_N: usize = 9;

/// Mother code parameters with frozen set and rate-matching plan.
#[derive(Debug, Clone)]
pub struct PolarCodeConfig {
    log_n: usize,
    k: usize,
    e: usize,
    mode: RateMatchMode,
    /// Information sub-channels, ascending.
    info: Vec<usize>,
    frozen: Vec<bool>,
    sources: Vec<usize>,
    untransmitted: Vec<usize>,
}

fn ceil_log2(x: usize) -> usize {
    x.next_power_of_two().trailing_zeros() as usize
}

impl PolarCodeConfig {
    /// Downlink control configuration for `k` bits (payload + CRC) carried
    /// on `e` coded bits, with the mother length chosen as in NR
    /// (`N <= 512`, rate no lower than 1/8).
    pub fn new(k: usize, e: usize) -> Result<Self> {
        if k == 0 || e == 0 {
            return Err(Error::CodeConfig(format!("K={k} and E={e} must be positive")));
        }
        let ce = ceil_log2(e);
        let n1 = if ce > 0 && 8 * e <= 9 * (1 << (ce - 1)) && 16 * k < 9 * e {
            ce - 1
        } else {
            ce
        };
        let n2 = ceil_log2(8 * k);
        let log_n = n1.min(n2).clamp(MIN_LOG_N, MAX_LOG_N);
        Self::with_mother_length(log_n, k, e)
    }

    /// Configuration with an explicit mother length `2^log_n`.
    pub fn with_mother_length(log_n: usize, k: usize, e: usize) -> Result<Self> {
        if !(MIN_LOG_N..=MAX_LOG_N).contains(&log_n) {
            return Err(Error::CodeConfig(format!(
                "log2(N)={log_n} outside {MIN_LOG_N}..={MAX_LOG_N}"
            )));
        }
        let n = 1 << log_n;
        if k == 0 || k >= n {
            return Err(Error::CodeConfig(format!("K={k} must satisfy 0 < K < N={n}")));
        }
        if e < k {
            return Err(Error::CodeConfig(format!("E={e} smaller than K={k}")));
        }
        let mode = RateMatchMode::select(n, k, e);
        let untransmitted = untransmitted_positions(n, e, mode);

        let mut pre_frozen = vec![false; n];
        for &p in &untransmitted {
            pre_frozen[p] = true;
        }
        if mode == RateMatchMode::Puncturing {
            // (ceil of a/b for the two thresholds, in sixteenths of N)
            let extra = if 4 * e >= 3 * n {
                (3 * n - 2 * e).div_ceil(4)
            } else {
                (9 * n - 4 * e).div_ceil(16)
            };
            for p in pre_frozen.iter_mut().take(extra) {
                *p = true;
            }
        }

        let order: Vec<usize> = reliability_order(n).collect();
        let mut info: Vec<usize> = order
            .iter()
            .rev()
            .copied()
            .filter(|&i| !pre_frozen[i])
            .take(k)
            .collect();
        if info.len() < k {
            return Err(Error::CodeConfig(format!(
                "only {} usable sub-channels for K={k}",
                info.len()
            )));
        }
        info.sort_unstable();
        let mut frozen = vec![true; n];
        for &i in &info {
            frozen[i] = false;
        }

        Ok(Self {
            log_n,
            k,
            e,
            mode,
            info,
            frozen,
            sources: output_sources(n, e, mode),
            untransmitted,
        })
    }

    pub fn n(&self) -> usize {
        1 << self.log_n
    }

    pub fn log_n(&self) -> usize {
        self.log_n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn e(&self) -> usize {
        self.e
    }

    pub fn mode(&self) -> RateMatchMode {
        self.mode
    }

    /// Information sub-channel indices in ascending order.
    pub fn info_positions(&self) -> &[usize] {
        &self.info
    }

    pub fn frozen_positions(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.frozen[i]).collect()
    }

    pub fn is_frozen(&self, i: usize) -> bool {
        self.frozen[i]
    }

    pub(crate) fn frozen_mask(&self) -> &[bool] {
        &self.frozen
    }

    /// Mother-code index of every rate-matched output bit.
    pub fn output_sources(&self) -> &[usize] {
        &self.sources
    }

    /// Mother-code positions removed by puncturing or shortening.
    pub fn untransmitted(&self) -> &[usize] {
        &self.untransmitted
    }
}

/// In-place multiplication by the `n`-fold Kronecker power of `[1 0; 1 1]`.
///
/// Works on any power-of-two length.
pub fn polar_transform(bits: &mut [u8]) {
    let n = bits.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for block in bits.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter()) {
                *a ^= *b;
            }
        }
        h *= 2;
    }
}

/// Places `payload` on the information sub-channels (ascending index order),
/// zeros elsewhere, and applies the polar transform.
pub fn polar_encode(payload: &[u8], cfg: &PolarCodeConfig) -> Result<Vec<u8>> {
    if payload.len() != cfg.k() {
        return Err(Error::length("payload", payload.len(), cfg.k()));
    }
    let mut u = vec![0u8; cfg.n()];
    for (&pos, &b) in cfg.info_positions().iter().zip(payload) {
        u[pos] = b & 1;
    }
    polar_transform(&mut u);
    Ok(u)
}
