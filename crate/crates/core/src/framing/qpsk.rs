//! Gray-mapped unit-energy QPSK and its max-log soft demapper.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::coding::{saturate, Llr};
use crate::error::{Error, Result};

const LLR_SCALE: f64 = 2.0 * std::f64::consts::SQRT_2;

#[inline]
pub fn qpsk_symbol(b0: u8, b1: u8) -> Complex64 {
    let re = if b0 & 1 == 0 { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 };
    let im = if b1 & 1 == 0 { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 };
    Complex64::new(re, im)
}

/// Maps bit pairs `(b0, b1)` to `((1 - 2 b0) + j (1 - 2 b1)) / sqrt(2)`.
pub fn qpsk_map(bits: &[u8]) -> Result<Vec<Complex64>> {
    if bits.len() % 2 != 0 {
        return Err(Error::length("bits", bits.len(), "an even count"));
    }
    Ok(bits.chunks_exact(2).map(|p| qpsk_symbol(p[0], p[1])).collect())
}

/// Max-log LLRs of both bits of `y` received through scalar channel `h`.
///
/// Caller guarantees `sigma2 > 0`.
#[inline]
pub fn qpsk_llr_unchecked(y: Complex64, h: Complex64, sigma2: f64) -> [Llr; 2] {
    let z = y * h.conj() * (LLR_SCALE / sigma2);
    [saturate(z.re as Llr), saturate(z.im as Llr)]
}

pub fn qpsk_llr(y: Complex64, h: Complex64, sigma2: f64) -> Result<[Llr; 2]> {
    if !(sigma2 > 0.0) {
        return Err(Error::Parameter(format!("noise variance {sigma2} must be positive")));
    }
    Ok(qpsk_llr_unchecked(y, h, sigma2))
}
