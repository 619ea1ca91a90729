//! Link-level simulator for the NR downlink control channel in
//! single-frequency-network (point-to-multipoint) deployments.
//!
//! The crate is split the same way as a receiver chain is usually drawn:
//!
//! * [`coding`]: CRC24C, polar code, rate matching, list decoding.
//! * [`framing`]: numerology, QPSK, CORESET resource grid, OFDM.
//! * [`channel`]: AWGN, the two-path 0 dB echo and TDL fading.
//! * [`estimation`]: pilot LS estimation, linear and DFT interpolation.
//! * [`analysis`]: closed-form Doppler/delay limits, CP loss, QPSK BICM rate.
//! * [`harness`]: configs, Monte Carlo BLER runs, sweeps and campaigns.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod channel;
pub mod coding;
pub mod error;
pub mod estimation;
pub mod framing;
pub mod harness;

pub use error::{Error, Result};
pub use num_complex::Complex64;
