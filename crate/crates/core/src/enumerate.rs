//! Exhaustive census of a program range: which machines halt, when, and with
//! which tape.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::machine::{program_count_u128, run_packed, RunStatus};
use crate::spec::MachineSpec;

/// Output counts and halting census over a set of program index ranges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyDistribution {
    pub spec: MachineSpec,
    /// Disjoint, sorted, coalesced `[lo, hi)` ranges this census covers.
    pub ranges: Vec<(u128, u128)>,
    pub output_counts: BTreeMap<BitString, u64>,
    pub halted_by_step: BTreeMap<u32, u64>,
    pub halting_total: u64,
    pub nonhalting_total: u64,
    pub frozen_total: u64,
}

impl FrequencyDistribution {
    pub fn empty(spec: MachineSpec) -> Self {
        Self {
            spec,
            ranges: Vec::new(),
            output_counts: BTreeMap::new(),
            halted_by_step: BTreeMap::new(),
            halting_total: 0,
            nonhalting_total: 0,
            frozen_total: 0,
        }
    }

    /// Number of programs covered.
    pub fn programs(&self) -> u128 {
        self.ranges.iter().map(|(lo, hi)| hi - lo).sum()
    }

    pub fn covers_all(&self) -> bool {
        program_count_u128(&self.spec).is_ok_and(|p| self.ranges == [(0, p)] || (p == 0 && self.ranges.is_empty()))
    }

    pub fn count(&self, s: &BitString) -> u64 {
        self.output_counts.get(s).copied().unwrap_or(0)
    }

    /// Checks the internal bookkeeping identities.
    pub fn is_consistent(&self) -> bool {
        let outputs: u64 = self.output_counts.values().sum();
        let by_step: u64 = self.halted_by_step.values().sum();
        let total = u128::from(self.halting_total) + u128::from(self.nonhalting_total) + u128::from(self.frozen_total);
        outputs == self.halting_total
            && by_step == self.halting_total
            && total == self.programs()
            && self.halted_by_step.keys().all(|&k| k <= self.spec.steps())
    }

    fn record(&mut self, status: RunStatus, tape: BitString) {
        match status {
            RunStatus::HaltedAt(k) => {
                self.halting_total += 1;
                *self.halted_by_step.entry(k).or_default() += 1;
                *self.output_counts.entry(tape).or_default() += 1;
            }
            RunStatus::RunningAtLimit => self.nonhalting_total += 1,
            RunStatus::FrozenInvalid(_) => self.frozen_total += 1,
        }
    }
}

/// Census of programs `lo..hi`.
pub fn enumerate_range(spec: &MachineSpec, lo: u128, hi: u128) -> Result<FrequencyDistribution> {
    let count = program_count_u128(spec)?;
    if lo > hi || hi > count {
        return Err(Error::InvalidRange { lo, hi, count });
    }
    let mut dist = FrequencyDistribution::empty(*spec);
    if lo == hi {
        return Ok(dist);
    }
    dist.ranges.push((lo, hi));
    // Small tapes tally into a flat array; the map is built once at the end.
    let dense = spec.tape_len() <= 16;
    let mut tally = if dense { alloc::vec![0u64; 1 << spec.tape_len()] } else { Vec::new() };
    let mut by_step = alloc::vec![0u64; spec.steps() as usize + 1];
    for index in lo..hi {
        let out = run_packed(index, spec);
        match out.status {
            RunStatus::HaltedAt(k) if dense => {
                dist.halting_total += 1;
                by_step[k as usize] += 1;
                tally[out.final_tape.bits() as usize] += 1;
            }
            RunStatus::HaltedAt(k) => {
                by_step[k as usize] += 1;
                dist.record(out.status, out.final_tape);
            }
            status => dist.record(status, out.final_tape),
        }
    }
    dist.halted_by_step.clear();
    for (k, &n) in by_step.iter().enumerate() {
        if n > 0 {
            dist.halted_by_step.insert(k as u32, n);
        }
    }
    for (bits, &n) in tally.iter().enumerate() {
        if n > 0 {
            dist.output_counts.insert(BitString::from_bits(bits as u64, spec.tape_len()), n);
        }
    }
    Ok(dist)
}

/// Census of the whole program space, single-threaded.
pub fn enumerate_all(spec: &MachineSpec) -> Result<FrequencyDistribution> {
    enumerate_range(spec, 0, program_count_u128(spec)?)
}

/// Componentwise sum of two censuses over disjoint ranges of the same spec.
pub fn merge(a: &FrequencyDistribution, b: &FrequencyDistribution) -> Result<FrequencyDistribution> {
    if a.spec != b.spec {
        return Err(Error::SpecMismatch);
    }
    let mut out = a.clone();
    out.ranges = union_ranges(&a.ranges, &b.ranges)?;
    for (s, n) in &b.output_counts {
        *out.output_counts.entry(*s).or_default() += n;
    }
    for (k, n) in &b.halted_by_step {
        *out.halted_by_step.entry(*k).or_default() += n;
    }
    out.halting_total += b.halting_total;
    out.nonhalting_total += b.nonhalting_total;
    out.frozen_total += b.frozen_total;
    Ok(out)
}

/// Sorted, coalesced union of two disjoint range lists.
pub fn union_ranges(a: &[(u128, u128)], b: &[(u128, u128)]) -> Result<Vec<(u128, u128)>> {
    let mut all: Vec<(u128, u128)> = a.iter().chain(b).copied().filter(|(lo, hi)| lo < hi).collect();
    all.sort_unstable();
    let mut out: Vec<(u128, u128)> = Vec::with_capacity(all.len());
    for (lo, hi) in all {
        match out.last_mut() {
            Some(last) if lo < last.1 => return Err(Error::OverlappingRanges),
            Some(last) if lo == last.1 => last.1 = hi,
            _ => out.push((lo, hi)),
        }
    }
    Ok(out)
}

/// Ranges of `[0, count)` not covered by `covered`.
pub fn missing_ranges(covered: &[(u128, u128)], count: u128) -> Vec<(u128, u128)> {
    let mut gaps = Vec::new();
    let mut cursor = 0;
    for &(lo, hi) in covered {
        if lo > cursor {
            gaps.push((cursor, lo));
        }
        cursor = cursor.max(hi);
    }
    if cursor < count {
        gaps.push((cursor, count));
    }
    gaps
}
