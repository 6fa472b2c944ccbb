//! Output-frequency probabilities, coding-theorem complexity estimates, block
//! decomposition over long strings and the halting-time decay fit.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use num_rational::Ratio;

use crate::bits::BitString;
use crate::enumerate::FrequencyDistribution;
use crate::error::{Error, Result};
use crate::spec::MachineSpec;

/// Fraction of halting machines whose final tape is `s`.
pub fn d_value(dist: &FrequencyDistribution, s: &BitString) -> Result<Ratio<u64>> {
    if s.len() != dist.spec.tape_len() {
        return Err(Error::StringLength { expected: dist.spec.tape_len(), actual: s.len() });
    }
    if dist.halting_total == 0 {
        return Err(Error::NoHaltingMachines);
    }
    Ok(Ratio::new(dist.count(s), dist.halting_total))
}

/// `-log₂ d`, in bits.
pub fn bits_of(d: Ratio<u64>) -> f64 {
    libm::log2(*d.denom() as f64) - libm::log2(*d.numer() as f64)
}

/// Complexity estimate of `s` in bits; `NotInTable` if no halting machine
/// produced it.
pub fn ctm(dist: &FrequencyDistribution, s: &BitString) -> Result<f64> {
    let d = d_value(dist, s)?;
    if *d.numer() == 0 {
        return Err(Error::NotInTable(*s));
    }
    Ok(bits_of(d))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CtmEntry {
    pub count: u64,
    pub d_value: Ratio<u64>,
    pub ctm: f64,
}

/// String-to-complexity lookup built from a full census.
#[derive(Debug, Clone, PartialEq)]
pub struct CtmTable {
    pub spec: MachineSpec,
    pub programs: u128,
    pub halting_total: u64,
    pub nonhalting_total: u64,
    pub frozen_total: u64,
    pub entries: BTreeMap<BitString, CtmEntry>,
}

impl CtmTable {
    pub fn from_distribution(dist: &FrequencyDistribution) -> Result<Self> {
        if dist.halting_total == 0 {
            return Err(Error::NoHaltingMachines);
        }
        let entries = dist
            .output_counts
            .iter()
            .filter(|(_, &n)| n > 0)
            .map(|(s, &count)| {
                let d_value = Ratio::new(count, dist.halting_total);
                (*s, CtmEntry { count, d_value, ctm: bits_of(d_value) })
            })
            .collect();
        Ok(Self {
            spec: dist.spec,
            programs: dist.programs(),
            halting_total: dist.halting_total,
            nonhalting_total: dist.nonhalting_total,
            frozen_total: dist.frozen_total,
            entries,
        })
    }

    pub fn block_len(&self) -> u32 {
        self.spec.tape_len()
    }

    pub fn get(&self, s: &BitString) -> Option<&CtmEntry> {
        self.entries.get(s)
    }

    pub fn ctm(&self, s: &BitString) -> Result<f64> {
        if s.len() != self.block_len() {
            return Err(Error::StringLength { expected: self.block_len(), actual: s.len() });
        }
        self.get(s).map(|e| e.ctm).ok_or(Error::NotInTable(*s))
    }

    /// Fraction of the `2^c` strings present in the table.
    pub fn coverage(&self) -> f64 {
        self.entries.len() as f64 / libm::exp2(f64::from(self.block_len()))
    }

    /// Totals reconcile and every `d_value` matches its count.
    pub fn is_consistent(&self) -> bool {
        let sum: u64 = self.entries.values().map(|e| e.count).sum();
        sum == self.halting_total
            && u128::from(self.halting_total) + u128::from(self.nonhalting_total) + u128::from(self.frozen_total)
                == self.programs
            && self.entries.iter().all(|(s, e)| {
                s.len() == self.block_len()
                    && e.count > 0
                    && e.d_value == Ratio::new(e.count, self.halting_total)
                    && e.ctm.to_bits() == bits_of(e.d_value).to_bits()
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockMode {
    /// Non-overlapping blocks; a trailing remainder shorter than a block is
    /// dropped.
    Partition,
    /// Windows starting every `stride` symbols.
    Sliding { stride: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MissingPolicy {
    /// Fail, listing every missing block.
    #[default]
    Strict,
    /// Skip missing blocks and report them.
    Lenient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BdmOptions {
    pub block: u32,
    pub mode: BlockMode,
    /// Sum `ctm(b) + log₂(occurrences)` over distinct blocks instead of the
    /// plain per-block sum.
    pub multiplicity: bool,
    pub missing: MissingPolicy,
}

impl BdmOptions {
    pub fn partition(block: u32) -> Self {
        Self { block, mode: BlockMode::Partition, multiplicity: false, missing: MissingPolicy::Strict }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockTerm {
    pub offset: usize,
    pub block: BitString,
    pub ctm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BdmReport {
    pub total: f64,
    /// Every block in input order, present blocks only.
    pub blocks: Vec<BlockTerm>,
    /// Distinct present blocks with their occurrence counts.
    pub distinct: BTreeMap<BitString, u64>,
    /// Distinct missing blocks (lenient mode only).
    pub skipped: Vec<BitString>,
    /// Symbols left over at the end that do not fill a block.
    pub remainder: usize,
}

/// Block decomposition estimate of a long binary string.
pub fn bdm(symbols: &[u8], table: &CtmTable, opts: &BdmOptions) -> Result<BdmReport> {
    let block = opts.block as usize;
    if opts.block != table.block_len() {
        return Err(Error::StringLength { expected: table.block_len(), actual: opts.block });
    }
    if symbols.len() < block {
        return Err(Error::InvalidSpec(format!("input of {} symbols is shorter than one block", symbols.len())));
    }
    let stride = match opts.mode {
        BlockMode::Partition => block,
        BlockMode::Sliding { stride: 0 } => return Err(Error::InvalidSpec("stride must be positive".into())),
        BlockMode::Sliding { stride } => stride,
    };
    let mut blocks = Vec::new();
    let mut missing = BTreeMap::new();
    let mut distinct: BTreeMap<BitString, u64> = BTreeMap::new();
    let mut offset = 0;
    while offset + block <= symbols.len() {
        let b = BitString::from_symbols(&symbols[offset..offset + block])?;
        match table.get(&b) {
            Some(entry) => {
                blocks.push(BlockTerm { offset, block: b, ctm: entry.ctm });
                *distinct.entry(b).or_default() += 1;
            }
            None => {
                missing.insert(b, ());
            }
        }
        offset += stride;
    }
    let remainder = symbols.len() - (offset - stride + block);
    let skipped: Vec<BitString> = missing.into_keys().collect();
    if !skipped.is_empty() && opts.missing == MissingPolicy::Strict {
        return Err(Error::MissingBlocks(skipped));
    }
    let total = if opts.multiplicity {
        distinct.iter().map(|(b, &k)| table.entries[b].ctm + libm::log2(k as f64)).sum()
    } else {
        blocks.iter().map(|t| t.ctm).sum()
    };
    Ok(BdmReport { total, blocks, distinct, skipped, remainder })
}

/// Exponential model `count(k) ≈ alpha·e^(−lambda·k)` of first-halting times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub alpha: f64,
    pub lambda: f64,
    /// First step included in the fit.
    pub first_step: u32,
    pub points: usize,
}

impl DecayFit {
    /// Fraction of the fitted halting mass that lies beyond `z_limit`.
    pub fn tail_probability(&self, z_limit: u32) -> f64 {
        let beyond = z_limit.saturating_sub(self.first_step.saturating_sub(1));
        libm::exp(-self.lambda * f64::from(beyond)).clamp(0.0, 1.0)
    }

    /// Expected halting count at step `k` under the fit.
    pub fn predict(&self, k: u32) -> f64 {
        self.alpha * libm::exp(-self.lambda * f64::from(k))
    }
}

/// Least-squares fit of `ln(count)` against step over the positive part of
/// the halting histogram, excluding step 0.
pub fn fit_decay(dist: &FrequencyDistribution) -> Result<DecayFit> {
    fit_histogram(&dist.halted_by_step)
}

pub fn fit_histogram(halted_by_step: &BTreeMap<u32, u64>) -> Result<DecayFit> {
    let points: Vec<(f64, f64)> = halted_by_step
        .iter()
        .filter(|(&k, &n)| k > 0 && n > 0)
        .map(|(&k, &n)| (f64::from(k), libm::log(n as f64)))
        .collect();
    if points.len() < 2 {
        return Err(Error::InsufficientData(format!("{} positive histogram point(s) beyond step 0", points.len())));
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let lambda = -slope;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InsufficientData(format!("histogram does not decay (slope {slope})")));
    }
    let first_step = halted_by_step.iter().find(|(&k, &n)| k > 0 && n > 0).map(|(&k, _)| k).unwrap_or(1);
    Ok(DecayFit { alpha: libm::exp(mean_y - slope * mean_x), lambda, first_step, points: points.len() })
}

/// Shannon entropy of the symbol frequencies of `symbols`, in bits per symbol.
pub fn entropy(symbols: &[u8]) -> f64 {
    if symbols.is_empty() {
        return 0.0;
    }
    let ones = symbols.iter().filter(|&&s| s == 1).count() as f64;
    let n = symbols.len() as f64;
    [ones / n, 1.0 - ones / n].iter().filter(|&&p| p > 0.0).map(|&p| -p * libm::log2(p)).sum()
}
