use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Carrier-to-noise ratio, defined as the average energy of an occupied RE
/// over the noise variance per RE, both at the receiver FFT output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CnrSpec {
    pub cnr_db: f64,
}

impl CnrSpec {
    pub fn db(cnr_db: f64) -> Self {
        Self { cnr_db }
    }

    /// Noise switched off.
    pub fn noiseless() -> Self {
        Self { cnr_db: f64::INFINITY }
    }

    pub fn is_noiseless(&self) -> bool {
        self.cnr_db == f64::INFINITY
    }

    /// Per-sample (and, with a unitary FFT, per-RE) noise variance.
    pub fn noise_variance(&self, signal_ref_energy: f64) -> f64 {
        if self.is_noiseless() {
            0.0
        } else {
            signal_ref_energy / 10f64.powf(self.cnr_db / 10.0)
        }
    }
}

/// Adds circular complex Gaussian noise of total variance `sigma2`.
pub fn add_noise<R: Rng>(samples: &mut [Complex64], sigma2: f64, rng: &mut R) {
    if sigma2 <= 0.0 {
        return;
    }
    let std = (sigma2 / 2.0).sqrt();
    for s in samples.iter_mut() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *s += Complex64::new(re * std, im * std);
    }
}

/// Adds noise so that the per-RE Es/N0 at the FFT output equals `cnr`.
///
/// `signal_ref_energy` is the nominal per-RE energy of the transmitted grid
/// (1 for unit-energy QPSK through a power-normalized channel).
pub fn apply_awgn(samples: &[Complex64], cnr: CnrSpec, signal_ref_energy: f64, seed: u64) -> Vec<Complex64> {
    let mut out = samples.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    add_noise(&mut out, cnr.noise_variance(signal_ref_energy), &mut rng);
    out
}
