//! CORESET geometry and resource grid construction.
//!
//! Each resource block carries DMRS on subcarriers 1, 5 and 9 of every
//! CORESET symbol, so pilots sit on a uniform lattice with a spacing of four
//! subcarriers in frequency and one symbol in time. Data fills the
//! remaining nine REs of each REG.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::qpsk::qpsk_symbol;
use crate::error::{Error, Result};

pub const SUBCARRIERS_PER_RB: usize = 12;
pub const DMRS_OFFSETS: [usize; 3] = [1, 5, 9];
/// Pilot spacing in subcarriers.
pub const DMRS_FREQ_SPACING: usize = 4;
/// Pilot spacing in OFDM symbols.
pub const DMRS_TIME_SPACING: usize = 1;
pub const REGS_PER_CCE: usize = 6;
pub const DATA_RES_PER_REG: usize = SUBCARRIERS_PER_RB - DMRS_OFFSETS.len();

/// CORESET size and the aggregation level of the candidate it carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoresetConfig {
    pub n_rb: usize,
    pub n_sym: usize,
    pub aggregation_level: usize,
}

impl CoresetConfig {
    pub fn new(n_rb: usize, n_sym: usize, aggregation_level: usize) -> Result<Self> {
        let c = Self {
            n_rb,
            n_sym,
            aggregation_level,
        };
        c.validate()?;
        Ok(c)
    }

    /// Smallest single-symbol CORESET that fits the candidate, two symbols
    /// for aggregation level 8.
    pub fn for_level(aggregation_level: usize) -> Result<Self> {
        match aggregation_level {
            8 => Self::new(24, 2, 8),
            l => Self::new(REGS_PER_CCE * l, 1, l),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if ![1, 2, 4, 8].contains(&self.aggregation_level) {
            return Err(Error::Parameter(format!(
                "aggregation level {} not in {{1,2,4,8}}",
                self.aggregation_level
            )));
        }
        if !(1..=3).contains(&self.n_sym) {
            return Err(Error::Parameter(format!(
                "CORESET spans {} symbols, expected 1..=3",
                self.n_sym
            )));
        }
        if self.n_rb == 0 || self.n_rb * self.n_sym < self.n_regs() {
            return Err(Error::Parameter(format!(
                "CORESET of {} RBs x {} symbols cannot hold {} REGs",
                self.n_rb,
                self.n_sym,
                self.n_regs()
            )));
        }
        Ok(())
    }

    pub fn n_subcarriers(&self) -> usize {
        self.n_rb * SUBCARRIERS_PER_RB
    }

    /// REGs occupied by the candidate.
    pub fn n_regs(&self) -> usize {
        REGS_PER_CCE * self.aggregation_level
    }

    pub fn n_data_res(&self) -> usize {
        self.n_regs() * DATA_RES_PER_REG
    }

    /// Coded bits carried by the candidate (QPSK).
    pub fn coded_bits(&self) -> usize {
        2 * self.n_data_res()
    }

    pub fn pilots_per_symbol(&self) -> usize {
        self.n_rb * DMRS_OFFSETS.len()
    }

    /// Pilot subcarriers of one symbol, ascending (`4p + 1`).
    pub fn pilot_subcarriers(&self) -> Vec<usize> {
        (0..self.n_rb)
            .flat_map(|rb| DMRS_OFFSETS.iter().map(move |o| rb * SUBCARRIERS_PER_RB + o))
            .collect()
    }
}

/// Role of a resource element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReRole {
    Data,
    Dmrs,
    Empty,
}

/// Complex symbols over (subcarrier, symbol), stored symbol by symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceGrid {
    n_sc: usize,
    n_sym: usize,
    values: Vec<Complex64>,
    roles: Vec<ReRole>,
}

impl ResourceGrid {
    pub fn zeros(n_sc: usize, n_sym: usize) -> Self {
        Self {
            n_sc,
            n_sym,
            values: vec![Complex64::new(0.0, 0.0); n_sc * n_sym],
            roles: vec![ReRole::Empty; n_sc * n_sym],
        }
    }

    /// Wraps a received or otherwise untagged matrix.
    pub fn from_values(n_sc: usize, n_sym: usize, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != n_sc * n_sym {
            return Err(Error::length("grid values", values.len(), n_sc * n_sym));
        }
        Ok(Self {
            n_sc,
            n_sym,
            values,
            roles: vec![ReRole::Empty; n_sc * n_sym],
        })
    }

    pub fn n_subcarriers(&self) -> usize {
        self.n_sc
    }

    pub fn n_symbols(&self) -> usize {
        self.n_sym
    }

    #[inline]
    pub fn index(&self, sc: usize, sym: usize) -> usize {
        sym * self.n_sc + sc
    }

    #[inline]
    pub fn get(&self, sc: usize, sym: usize) -> Complex64 {
        self.values[self.index(sc, sym)]
    }

    pub fn set(&mut self, sc: usize, sym: usize, value: Complex64, role: ReRole) {
        let i = self.index(sc, sym);
        self.values[i] = value;
        self.roles[i] = role;
    }

    pub fn role(&self, sc: usize, sym: usize) -> ReRole {
        self.roles[self.index(sc, sym)]
    }

    /// One OFDM symbol's subcarriers.
    pub fn symbol(&self, sym: usize) -> &[Complex64] {
        &self.values[sym * self.n_sc..(sym + 1) * self.n_sc]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn count(&self, role: ReRole) -> usize {
        self.roles.iter().filter(|&&r| r == role).count()
    }
}

/// Precomputed RE positions and DMRS values for one CORESET and DMRS seed.
#[derive(Debug, Clone)]
pub struct CoresetLayout {
    coreset: CoresetConfig,
    /// Grid indices of data REs in fill order.
    data: Vec<usize>,
    /// Pilot subcarriers, shared by every symbol.
    pilot_sc: Vec<usize>,
    /// DMRS values, symbol-major: `dmrs[sym * P + p]`.
    dmrs: Vec<Complex64>,
}

impl CoresetLayout {
    pub fn new(coreset: CoresetConfig, dmrs_seed: u64) -> Result<Self> {
        coreset.validate()?;
        let n_sc = coreset.n_subcarriers();
        let mut data = Vec::with_capacity(coreset.n_data_res());
        // REGs are taken frequency-first: all RBs of symbol 0, then symbol 1, ...
        for reg in 0..coreset.n_regs() {
            let sym = reg / coreset.n_rb;
            let rb = reg % coreset.n_rb;
            for o in 0..SUBCARRIERS_PER_RB {
                if !DMRS_OFFSETS.contains(&o) {
                    data.push(sym * n_sc + rb * SUBCARRIERS_PER_RB + o);
                }
            }
        }
        let pilot_sc = coreset.pilot_subcarriers();
        let mut rng = ChaCha8Rng::seed_from_u64(dmrs_seed);
        let dmrs = (0..pilot_sc.len() * coreset.n_sym)
            .map(|_| qpsk_symbol(rng.gen_range(0..2), rng.gen_range(0..2)))
            .collect();
        Ok(Self {
            coreset,
            data,
            pilot_sc,
            dmrs,
        })
    }

    pub fn coreset(&self) -> &CoresetConfig {
        &self.coreset
    }

    pub fn data_indices(&self) -> &[usize] {
        &self.data
    }

    pub fn pilot_subcarriers(&self) -> &[usize] {
        &self.pilot_sc
    }

    /// Transmitted DMRS on symbol `sym`, one per pilot subcarrier.
    pub fn dmrs(&self, sym: usize) -> &[Complex64] {
        let p = self.pilot_sc.len();
        &self.dmrs[sym * p..(sym + 1) * p]
    }

    /// Places `data` and the DMRS on a fresh grid.
    pub fn build(&self, data: &[Complex64]) -> Result<ResourceGrid> {
        if data.len() != self.data.len() {
            return Err(Error::length("data symbols", data.len(), self.data.len()));
        }
        let c = &self.coreset;
        let mut grid = ResourceGrid::zeros(c.n_subcarriers(), c.n_sym);
        for sym in 0..c.n_sym {
            for (&sc, &d) in self.pilot_sc.iter().zip(self.dmrs(sym)) {
                grid.set(sc, sym, d, ReRole::Dmrs);
            }
        }
        for (&i, &d) in self.data.iter().zip(data) {
            grid.values[i] = d;
            grid.roles[i] = ReRole::Data;
        }
        Ok(grid)
    }
}

/// Builds the CORESET grid for `data` (54 L QPSK symbols) with seeded DMRS.
pub fn build_grid(data: &[Complex64], coreset: &CoresetConfig, dmrs_seed: u64) -> Result<ResourceGrid> {
    CoresetLayout::new(*coreset, dmrs_seed)?.build(data)
}
