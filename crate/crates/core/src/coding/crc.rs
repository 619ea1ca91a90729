//! CRC24C attachment for DCI payloads.
//!
//! The shift register of the plain long-division circuit starts from all
//! ones, i.e. the parity is the remainder of `[1; 24] ++ payload ++ [0; 24]`
//! divided by the generator. No RNTI mask is applied to the parity bits.

use crate::error::{Error, Result};

/// Generator polynomial D^24 + D^23 + D^21 + D^20 + D^17 + D^15 + D^13 + D^12
/// + D^8 + D^4 + D^2 + D + 1, without the leading term.
pub const CRC24C_POLY: u32 = 0xB2_B117;
pub const CRC_LEN: usize = 24;
/// Longest DCI payload accepted by [`attach_crc`].
pub const MAX_PAYLOAD_BITS: usize = 140;

const MASK: u32 = 0xFF_FFFF;

const fn step(reg: u32, bit: u32) -> u32 {
    let feedback = ((reg >> 23) & 1) ^ bit;
    let next = (reg << 1) & MASK;
    if feedback != 0 {
        next ^ CRC24C_POLY
    } else {
        next
    }
}

/// Register value of the direct (non-augmented) form after the 24 leading ones.
const INIT: u32 = {
    let mut reg = 0;
    let mut i = 0;
    while i < 24 {
        reg = step(reg, 1);
        i += 1;
    }
    reg
};

/// Information bits of a control message together with their parity bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DciPayload {
    pub info_bits: Vec<u8>,
    pub crc_bits: Vec<u8>,
}

impl DciPayload {
    /// Payload length `A`.
    pub fn a(&self) -> usize {
        self.info_bits.len()
    }

    /// Length `K = A + 24` of the sequence handed to the polar encoder.
    pub fn k(&self) -> usize {
        self.info_bits.len() + self.crc_bits.len()
    }

    /// Info bits followed by the parity bits.
    pub fn to_bits(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.k());
        out.extend_from_slice(&self.info_bits);
        out.extend_from_slice(&self.crc_bits);
        out
    }

    /// Splits a `K`-bit sequence into payload and parity without checking it.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        if bits.len() <= CRC_LEN {
            return Err(Error::length("candidate", bits.len(), "at least 25"));
        }
        let split = bits.len() - CRC_LEN;
        Ok(Self {
            info_bits: bits[..split].to_vec(),
            crc_bits: bits[split..].to_vec(),
        })
    }
}

/// CRC24C remainder of `bits` (MSB-first) with the all-ones preset.
pub fn crc24c(bits: &[u8]) -> u32 {
    bits.iter().fold(INIT, |reg, &b| step(reg, u32::from(b & 1)))
}

/// Appends 24 CRC24C parity bits to `info_bits`.
pub fn attach_crc(info_bits: &[u8]) -> Result<DciPayload> {
    if info_bits.is_empty() || info_bits.len() > MAX_PAYLOAD_BITS {
        return Err(Error::length(
            "info_bits",
            info_bits.len(),
            format!("1..={MAX_PAYLOAD_BITS}"),
        ));
    }
    let reg = crc24c(info_bits);
    let crc_bits = (0..CRC_LEN).map(|i| ((reg >> (CRC_LEN - 1 - i)) & 1) as u8).collect();
    Ok(DciPayload {
        info_bits: info_bits.to_vec(),
        crc_bits,
    })
}

/// True iff the trailing 24 bits of `candidate` are the CRC of the rest.
///
/// Candidates shorter than 25 bits never pass.
pub fn check_crc(candidate: &[u8]) -> bool {
    if candidate.len() <= CRC_LEN {
        return false;
    }
    let split = candidate.len() - CRC_LEN;
    let expected = crc24c(&candidate[..split]);
    candidate[split..]
        .iter()
        .enumerate()
        .all(|(i, &b)| u32::from(b & 1) == (expected >> (CRC_LEN - 1 - i)) & 1)
}
