//! CRC-aided successive-cancellation list decoding.
//!
//! LLR-domain decoder with min-sum node updates and the usual path metric
//! approximation (a path pays `|L|` whenever its decision disagrees with the
//! sign of the leaf LLR). Each path owns its intermediate LLRs and left-child
//! partial sums, so cloning a path is a flat copy of `2N` values.

use super::crc::{check_crc, DciPayload};
use super::polar::PolarCodeConfig;
use super::Llr;
use crate::error::{Error, Result};

pub const DEFAULT_LIST_SIZE: usize = 8;
pub const MAX_LIST_SIZE: usize = 32;

#[inline]
fn f_node(a: Llr, b: Llr) -> Llr {
    let m = a.abs().min(b.abs());
    if (a < 0.0) ^ (b < 0.0) {
        -m
    } else {
        m
    }
}

#[inline]
fn g_node(a: Llr, b: Llr, left_bit: u8) -> Llr {
    if left_bit == 0 {
        b + a
    } else {
        b - a
    }
}

#[derive(Clone)]
struct Path {
    /// Level `l` occupies `alpha[2^l .. 2^(l+1)]`.
    alpha: Vec<Llr>,
    /// Partial sums of the last finished left child at level `l`, same layout.
    beta_left: Vec<u8>,
    u: Vec<u8>,
    metric: f64,
}

impl Path {
    fn new(n: usize) -> Self {
        Self {
            alpha: vec![0.0; n],
            beta_left: vec![0; n],
            u: vec![0; n],
            metric: 0.0,
        }
    }

    fn copy_from(&mut self, other: &Path) {
        self.alpha.copy_from_slice(&other.alpha);
        self.beta_left.copy_from_slice(&other.beta_left);
        self.u.copy_from_slice(&other.u);
        self.metric = other.metric;
    }

    /// Updates the LLRs along the branch leading to leaf `i`; returns the leaf LLR.
    fn descend(&mut self, channel: &[Llr], log_n: usize, i: usize) -> Llr {
        let top = if i == 0 { log_n } else { i.trailing_zeros() as usize + 1 };
        for level in (0..top).rev() {
            let h = 1usize << level;
            let is_right = (i >> level) & 1 == 1;
            let (parent, child): (&[Llr], &mut [Llr]) = if level + 1 == log_n {
                (channel, &mut self.alpha[h..2 * h])
            } else {
                let (lo, hi) = self.alpha.split_at_mut(2 * h);
                (&hi[..2 * h], &mut lo[h..2 * h])
            };
            if is_right {
                let beta = &self.beta_left[h..2 * h];
                for j in 0..h {
                    child[j] = g_node(parent[j], parent[j + h], beta[j]);
                }
            } else {
                for j in 0..h {
                    child[j] = f_node(parent[j], parent[j + h]);
                }
            }
        }
        self.alpha[1]
    }

    /// Records the decision on leaf `i` and folds finished right children upward.
    fn ascend(&mut self, i: usize, bit: u8, log_n: usize, scratch: &mut [u8]) {
        self.u[i] = bit;
        scratch[0] = bit;
        let mut level = 0;
        while level < log_n {
            let h = 1usize << level;
            if (i >> level) & 1 == 0 {
                self.beta_left[h..2 * h].copy_from_slice(&scratch[..h]);
                return;
            }
            // right child done: parent = [left ^ right, right]
            for j in (0..h).rev() {
                let r = scratch[j];
                scratch[j + h] = r;
                scratch[j] = self.beta_left[h + j] ^ r;
            }
            level += 1;
        }
    }
}

/// Result of list decoding one block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeOutcome {
    /// `K` bits of the selected path: the best CRC-passing path if any,
    /// otherwise the path with the best metric.
    pub bits: Vec<u8>,
    pub crc_pass: bool,
}

impl DecodeOutcome {
    pub fn into_payload(self) -> Option<DciPayload> {
        if self.crc_pass {
            DciPayload::from_bits(&self.bits).ok()
        } else {
            None
        }
    }
}

/// Reusable list decoder for one code configuration.
pub struct ListDecoder {
    cfg: PolarCodeConfig,
    list_size: usize,
    paths: Vec<Path>,
    spare: Vec<Path>,
    scratch: Vec<u8>,
    candidates: Vec<(f64, usize, u8)>,
}

impl ListDecoder {
    pub fn new(cfg: PolarCodeConfig, list_size: usize) -> Result<Self> {
        if !list_size.is_power_of_two() || list_size > MAX_LIST_SIZE {
            return Err(Error::Parameter(format!(
                "list size {list_size} not in {{1,2,4,8,16,32}}"
            )));
        }
        let n = cfg.n();
        Ok(Self {
            cfg,
            list_size,
            paths: Vec::with_capacity(list_size),
            spare: Vec::new(),
            scratch: vec![0; n],
            candidates: Vec::with_capacity(2 * list_size),
        })
    }

    pub fn config(&self) -> &PolarCodeConfig {
        &self.cfg
    }

    pub fn list_size(&self) -> usize {
        self.list_size
    }

    fn take_path(&mut self) -> Path {
        self.spare.pop().unwrap_or_else(|| Path::new(self.cfg.n()))
    }

    /// Decodes `N` mother-code LLRs (positive means bit 0).
    pub fn decode(&mut self, llrs: &[Llr]) -> Result<DecodeOutcome> {
        let n = self.cfg.n();
        let log_n = self.cfg.log_n();
        if llrs.len() != n {
            return Err(Error::length("llrs", llrs.len(), n));
        }
        self.spare.append(&mut self.paths);
        let mut root = self.take_path();
        root.metric = 0.0;
        self.paths.push(root);

        for i in 0..n {
            let frozen = self.cfg.frozen_mask()[i];
            if frozen {
                for p in self.paths.iter_mut() {
                    let l = p.descend(llrs, log_n, i);
                    if l < 0.0 {
                        p.metric += f64::from(-l);
                    }
                    p.ascend(i, 0, log_n, &mut self.scratch);
                }
                continue;
            }

            self.candidates.clear();
            for (idx, p) in self.paths.iter_mut().enumerate() {
                let l = p.descend(llrs, log_n, i);
                let penalty = f64::from(l.abs());
                let (m0, m1) = if l >= 0.0 {
                    (p.metric, p.metric + penalty)
                } else {
                    (p.metric + penalty, p.metric)
                };
                self.candidates.push((m0, idx, 0));
                self.candidates.push((m1, idx, 1));
            }
            let keep = self.candidates.len().min(self.list_size);
            if self.candidates.len() > keep {
                self.candidates.select_nth_unstable_by(keep - 1, |a, b| {
                    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2))
                });
                self.candidates.truncate(keep);
            }

            // which (path, bit) pairs survive
            let active = self.paths.len();
            let mut survive = [[false; 2]; MAX_LIST_SIZE];
            for &(_, idx, bit) in &self.candidates {
                survive[idx][bit as usize] = true;
            }
            let mut next: Vec<Path> = Vec::with_capacity(keep);
            let mut old = std::mem::take(&mut self.paths);
            // paths with both children need a copy before being moved
            let mut clones: Vec<Path> = Vec::new();
            for (idx, s) in survive.iter().enumerate().take(active) {
                if s[0] && s[1] {
                    let mut c = self.take_path();
                    c.copy_from(&old[idx]);
                    clones.push(c);
                }
            }
            let mut clone_iter = clones.into_iter();
            for (idx, mut p) in old.drain(..).enumerate() {
                let s = survive[idx];
                match (s[0], s[1]) {
                    (false, false) => self.spare.push(p),
                    (true, true) => {
                        let mut c = clone_iter.next().expect("clone prepared");
                        let l = p.alpha[1];
                        let penalty = f64::from(l.abs());
                        if l >= 0.0 {
                            c.metric += penalty;
                        } else {
                            p.metric += penalty;
                        }
                        p.ascend(i, 0, log_n, &mut self.scratch);
                        c.ascend(i, 1, log_n, &mut self.scratch);
                        next.push(p);
                        next.push(c);
                    }
                    (zero, _) => {
                        let bit = u8::from(!zero);
                        let l = p.alpha[1];
                        if (l < 0.0) != (bit == 1) {
                            p.metric += f64::from(l.abs());
                        }
                        p.ascend(i, bit, log_n, &mut self.scratch);
                        next.push(p);
                    }
                }
            }
            self.spare.append(&mut old);
            self.paths = next;
        }

        let info = self.cfg.info_positions();
        let mut order: Vec<usize> = (0..self.paths.len()).collect();
        order.sort_by(|&a, &b| self.paths[a].metric.total_cmp(&self.paths[b].metric).then(a.cmp(&b)));
        let extract = |p: &Path| -> Vec<u8> { info.iter().map(|&pos| p.u[pos]).collect() };
        for &idx in &order {
            let bits = extract(&self.paths[idx]);
            if check_crc(&bits) {
                return Ok(DecodeOutcome { bits, crc_pass: true });
            }
        }
        Ok(DecodeOutcome {
            bits: extract(&self.paths[order[0]]),
            crc_pass: false,
        })
    }
}

/// One-shot CRC-aided list decode. `None` when no list path passes the CRC.
pub fn decode(llrs: &[Llr], cfg: &PolarCodeConfig, list_size: usize) -> Result<Option<DciPayload>> {
    let mut dec = ListDecoder::new(cfg.clone(), list_size)?;
    Ok(dec.decode(llrs)?.into_payload())
}
