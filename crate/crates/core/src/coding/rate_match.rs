//! Rate matching between the polar mother code and the `E` bits carried on
//! the CORESET: sub-block interleaving, circular-buffer bit collection and
//! the triangular channel interleaver.

use super::polar::PolarCodeConfig;
use super::{saturate, Llr, LLR_MAX};
use crate::error::{Error, Result};

/// Sub-block interleaver pattern over 32 blocks.
pub const SUBBLOCK_PATTERN: [usize; 32] = [
    0, 1, 2, 4, 3, 5, 6, 7, 8, 16, 9, 17, 10, 18, 11, 19, 12, 20, 13, 21, 14, 22, 15, 23, 24, 25, 26, 28, 27, 29, 30,
    31,
];

/// How the circular buffer is read when `E` differs from `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateMatchMode {
    /// `E >= N`: the buffer is read cyclically.
    Repetition,
    /// `E < N`, low rate: the first `N - E` interleaved bits are dropped.
    Puncturing,
    /// `E < N`, high rate: the last `N - E` interleaved bits are dropped.
    Shortening,
}

impl RateMatchMode {
    pub fn select(n: usize, k: usize, e: usize) -> Self {
        if e >= n {
            RateMatchMode::Repetition
        } else if 16 * k <= 7 * e {
            RateMatchMode::Puncturing
        } else {
            RateMatchMode::Shortening
        }
    }
}

/// Source index `J(m)` of interleaved position `m` for a length-`n` buffer.
///
/// `n` must be a multiple of 32.
pub fn subblock_source(m: usize, n: usize) -> usize {
    let block = n / 32;
    let i = 32 * m / n;
    SUBBLOCK_PATTERN[i] * block + m % block
}

/// Sub-block interleaving: `y[m] = d[J(m)]`.
pub fn subblock_interleave<T: Copy>(d: &[T]) -> Vec<T> {
    (0..d.len()).map(|m| d[subblock_source(m, d.len())]).collect()
}

/// Circular-buffer bit collection from the interleaved buffer `y`.
///
/// Returns, for each output position, the buffer index it is read from.
pub fn bit_selection_indices(n: usize, e: usize, mode: RateMatchMode) -> Vec<usize> {
    match mode {
        RateMatchMode::Repetition => (0..e).map(|k| k % n).collect(),
        RateMatchMode::Puncturing => (0..e).map(|k| k + n - e).collect(),
        RateMatchMode::Shortening => (0..e).collect(),
    }
}

/// Side of the smallest triangle holding `e` bits.
fn triangle_side(e: usize) -> usize {
    let mut t = 0;
    while t * (t + 1) / 2 < e {
        t += 1;
    }
    t
}

/// Triangular channel interleaver, as a gather table: `out[k] = in[idx[k]]`.
///
/// Bits are written row by row into an isosceles right triangle of side `T`
/// (row `i` holds `T - i` cells) and read column by column, skipping unused
/// cells.
pub fn channel_interleaver_indices(e: usize) -> Vec<usize> {
    let t = triangle_side(e);
    let mut row_start = Vec::with_capacity(t);
    let mut acc = 0;
    for i in 0..t {
        row_start.push(acc);
        acc += t - i;
    }
    let mut out = Vec::with_capacity(e);
    for j in 0..t {
        for &start in row_start.iter().take(t - j) {
            let idx = start + j;
            if idx < e {
                out.push(idx);
            }
        }
    }
    out
}

/// Mother-code index feeding every rate-matched output position.
pub fn output_sources(n: usize, e: usize, mode: RateMatchMode) -> Vec<usize> {
    let select = bit_selection_indices(n, e, mode);
    channel_interleaver_indices(e)
        .into_iter()
        .map(|k| subblock_source(select[k], n))
        .collect()
}

/// Mother-code positions that are never transmitted.
pub fn untransmitted_positions(n: usize, e: usize, mode: RateMatchMode) -> Vec<usize> {
    match mode {
        RateMatchMode::Repetition => Vec::new(),
        RateMatchMode::Puncturing => (0..n - e).map(|m| subblock_source(m, n)).collect(),
        RateMatchMode::Shortening => (e..n).map(|m| subblock_source(m, n)).collect(),
    }
}

/// Maps `N` coded bits onto the `E` transmitted bits.
pub fn rate_match(coded: &[u8], cfg: &PolarCodeConfig) -> Result<Vec<u8>> {
    if coded.len() != cfg.n() {
        return Err(Error::length("coded", coded.len(), cfg.n()));
    }
    Ok(cfg.output_sources().iter().map(|&s| coded[s]).collect())
}

/// Receive-side inverse of [`rate_match`]: folds `E` LLRs back onto the
/// mother code. Repeated copies add, punctured positions stay at 0 and
/// shortened positions (known zeros) get `+LLR_MAX`.
pub fn rate_recover(llrs: &[Llr], cfg: &PolarCodeConfig) -> Result<Vec<Llr>> {
    let mut out = vec![0.0; cfg.n()];
    rate_recover_into(llrs, cfg, &mut out)?;
    Ok(out)
}

pub fn rate_recover_into(llrs: &[Llr], cfg: &PolarCodeConfig, out: &mut [Llr]) -> Result<()> {
    if llrs.len() != cfg.e() {
        return Err(Error::length("llrs", llrs.len(), cfg.e()));
    }
    if out.len() != cfg.n() {
        return Err(Error::length("output", out.len(), cfg.n()));
    }
    out.fill(0.0);
    for (&src, &l) in cfg.output_sources().iter().zip(llrs) {
        out[src] += l;
    }
    if cfg.mode() == RateMatchMode::Shortening {
        for &p in cfg.untransmitted() {
            out[p] = LLR_MAX;
        }
    } else {
        for v in out.iter_mut() {
            *v = saturate(*v);
        }
    }
    Ok(())
}
