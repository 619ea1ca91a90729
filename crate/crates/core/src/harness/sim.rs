//! One transmitted block end to end: encode, map, modulate, propagate,
//! estimate, demap and decode.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::SimConfig;
use crate::channel::{add_noise, channel_frequency_response, ChannelModel, CnrSpec};
use crate::coding::{attach_crc, polar_encode, rate_match, rate_recover_into, ListDecoder, Llr, PolarCodeConfig};
use crate::error::Result;
use crate::estimation::{
    equalize_and_demap_into, estimate_noise_variance, ChannelEstimate, Estimator, EstimatorKind, NoiseMode,
};
use crate::framing::{qpsk_symbol, CoresetLayout, Ofdm, OfdmConfig, ResourceGrid};

/// Per-RE energy of data and DMRS.
pub const SIGNAL_REF_ENERGY: f64 = 1.0;
/// Demapper noise variance used when the noise is switched off.
const NOISELESS_SIGMA2: f64 = 1e-3;
const DMRS_SEED: u64 = 0x0D3B_5EED;

/// Outcome of one block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TrialOutcome {
    pub block_error: bool,
    pub bit_errors: u32,
}

/// Everything needed to simulate blocks of one config. Holds mutable
/// decoder state, so each worker owns its own copy.
pub struct LinkSimulator {
    payload_bits: usize,
    code: PolarCodeConfig,
    decoder: ListDecoder,
    layout: CoresetLayout,
    ofdm: Ofdm,
    channel: ChannelModel,
    estimator: Option<Estimator>,
    noise_mode: NoiseMode,
    llrs: Vec<Llr>,
    mother_llrs: Vec<Llr>,
}

impl Clone for LinkSimulator {
    fn clone(&self) -> Self {
        Self {
            payload_bits: self.payload_bits,
            code: self.code.clone(),
            decoder: ListDecoder::new(self.code.clone(), self.decoder.list_size()).expect("validated list size"),
            layout: self.layout.clone(),
            ofdm: self.ofdm.clone(),
            channel: self.channel.clone(),
            estimator: self.estimator.clone(),
            noise_mode: self.noise_mode,
            llrs: Vec::new(),
            mother_llrs: vec![0.0; self.code.n()],
        }
    }
}

impl LinkSimulator {
    pub fn new(cfg: &SimConfig) -> Result<Self> {
        cfg.validate()?;
        let coreset = cfg.coreset_config()?;
        let code = cfg.code_config()?;
        let estimator = match cfg.estimator {
            EstimatorKind::Perfect => None,
            kind => Some(Estimator::new(kind, coreset, cfg.dft_window()?)?),
        };
        Ok(Self {
            payload_bits: cfg.payload_bits,
            decoder: ListDecoder::new(code.clone(), cfg.list_size)?,
            mother_llrs: vec![0.0; code.n()],
            code,
            layout: CoresetLayout::new(coreset, DMRS_SEED)?,
            ofdm: Ofdm::new(cfg.ofdm_config()?)?,
            channel: cfg.channel.clone(),
            estimator,
            noise_mode: cfg.noise_mode,
            llrs: Vec::new(),
        })
    }

    pub fn ofdm_config(&self) -> &OfdmConfig {
        self.ofdm.config()
    }

    pub fn payload_bits(&self) -> usize {
        self.payload_bits
    }

    /// Simulates one block; everything random is drawn from `seed`.
    pub fn run_trial(&mut self, cnr: CnrSpec, seed: u64) -> Result<TrialOutcome> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let info: Vec<u8> = (0..self.payload_bits).map(|_| rng.gen_range(0..2)).collect();
        let payload = attach_crc(&info)?;
        let coded = polar_encode(&payload.to_bits(), &self.code)?;
        let tx_bits = rate_match(&coded, &self.code)?;
        let data: Vec<Complex64> = tx_bits.chunks_exact(2).map(|b| qpsk_symbol(b[0], b[1])).collect();
        let grid = self.layout.build(&data)?;

        // A random preceding symbol gives delayed paths something to smear
        // into the CORESET when they exceed the CP.
        let cfg = *self.ofdm.config();
        let filler: Vec<Complex64> = (0..cfg.n_occupied)
            .map(|_| qpsk_symbol(rng.gen_range(0..2), rng.gen_range(0..2)))
            .collect();
        let filler = ResourceGrid::from_values(cfg.n_occupied, 1, filler)?;
        let mut tx = Vec::with_capacity((grid.n_symbols() + 1) * cfg.symbol_samples());
        self.ofdm.modulate_into(&filler, &mut tx)?;
        self.ofdm.modulate_into(&grid, &mut tx)?;

        let channel = self.channel.realize(&cfg, rng.gen())?;
        let fs = cfg.sample_rate_hz();
        let mut rx = channel.apply(&tx, fs, 0.0);
        let rx = &mut rx[cfg.symbol_samples()..];
        let sigma2 = cnr.noise_variance(SIGNAL_REF_ENERGY);
        add_noise(rx, sigma2, &mut rng);
        let rx_grid = self.ofdm.demodulate(rx, grid.n_symbols())?;

        let est = match &self.estimator {
            Some(e) => e.estimate(&rx_grid, &self.layout)?,
            None => {
                let per_symbol: Vec<Vec<Complex64>> = (0..grid.n_symbols())
                    .map(|s| {
                        let mid = (s + 1) * cfg.symbol_samples() + cfg.cp_samples() + cfg.fft_size / 2;
                        channel_frequency_response(&channel, &cfg, mid as f64 / fs)
                    })
                    .collect();
                ChannelEstimate::perfect(&per_symbol)?
            }
        };
        let demap_sigma2 = match self.noise_mode {
            NoiseMode::Genie if cnr.is_noiseless() => NOISELESS_SIGMA2,
            NoiseMode::Genie => sigma2,
            NoiseMode::Blind => estimate_noise_variance(&rx_grid, &est, &self.layout)?,
        };
        equalize_and_demap_into(&rx_grid, &est, &self.layout, demap_sigma2, &mut self.llrs)?;
        rate_recover_into(&self.llrs, &self.code, &mut self.mother_llrs)?;
        let outcome = self.decoder.decode(&self.mother_llrs)?;

        let bit_errors = outcome.bits[..self.payload_bits]
            .iter()
            .zip(&info)
            .filter(|(a, b)| a != b)
            .count() as u32;
        Ok(TrialOutcome {
            block_error: !outcome.crc_pass || bit_errors > 0,
            bit_errors,
        })
    }
}
