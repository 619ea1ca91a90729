//! Numerology, QPSK mapping, CORESET resource grid and CP-OFDM.

pub mod grid;
pub mod numerology;
pub mod ofdm;
pub mod qpsk;

pub use grid::{build_grid, CoresetConfig, CoresetLayout, ReRole, ResourceGrid, DMRS_FREQ_SPACING, DMRS_TIME_SPACING};
pub use numerology::{CpMode, OfdmConfig};
pub use ofdm::{ofdm_demodulate, ofdm_modulate, Ofdm};
pub use qpsk::{qpsk_llr, qpsk_llr_unchecked, qpsk_map, qpsk_symbol};
