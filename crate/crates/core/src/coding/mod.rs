//! Bit-level control channel chain: CRC24C attachment, polar encoding, rate
//! matching, and the receive-side inverse (LLR rate recovery and CRC-aided
//! list decoding).

pub mod crc;
pub mod decoder;
pub mod polar;
pub mod rate_match;
pub mod reliability;

pub use crc::{attach_crc, check_crc, crc24c, DciPayload, CRC_LEN};
pub use decoder::{decode, DecodeOutcome, ListDecoder, DEFAULT_LIST_SIZE, MAX_LIST_SIZE};
pub use polar::{polar_encode, polar_transform, PolarCodeConfig};
pub use rate_match::{rate_match, rate_recover, rate_recover_into, RateMatchMode};

/// Log-likelihood ratio, positive when bit 0 is more likely.
pub type Llr = f32;

/// Saturation magnitude for all LLRs handed around the receiver.
pub const LLR_MAX: Llr = 60.0;

#[inline]
pub fn saturate(l: Llr) -> Llr {
    if l.is_nan() {
        0.0
    } else {
        l.clamp(-LLR_MAX, LLR_MAX)
    }
}

/// Coded bits `E` carried by aggregation level `level` (one CCE holds
/// 6 REGs x 9 data REs x 2 bits).
pub const fn coded_bits_for_level(level: usize) -> usize {
    108 * level
}
