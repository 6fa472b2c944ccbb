//! Dense state-vector backend for validating the register design at small
//! sizes. Amplitudes are indexed by the packed basis state.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;

use super::circuit::{Circuit, RecordSource};
use super::layout::{get_field, xor_field, RegisterLayout};
use super::MeasurementReport;
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::machine::program_count_u128;
use crate::spec::MachineSpec;

/// Largest register the dense backend accepts by default.
pub const DEFAULT_DENSE_LIMIT: usize = 26;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    spec: MachineSpec,
    layout: RegisterLayout,
    amplitudes: Vec<Complex64>,
    step_in_stage: usize,
}

impl StateVector {
    /// `1/√P` on every program with the start state loaded.
    pub fn prepare_initial(spec: &MachineSpec, layout: &RegisterLayout, limit: usize) -> Result<Self> {
        if layout.total > limit || layout.total >= 64 {
            return Err(Error::DenseLimit { needed: layout.total, limit });
        }
        let count = program_count_u128(spec)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1usize << layout.total];
        let amp = Complex64::new(1.0 / libm::sqrt(count as f64), 0.0);
        for p in 0..count as u64 {
            let mut b = [p];
            xor_field(&mut b, layout.state, u64::from(spec.initial_state()));
            amplitudes[b[0] as usize] = amp;
        }
        Ok(Self { spec: *spec, layout: *layout, amplitudes, step_in_stage: 0 })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.amplitudes[index].norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.amplitudes.iter().map(|a| a.norm_sqr()).sum())
    }

    /// Indices with a nonzero amplitude.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.amplitudes.iter().enumerate().filter(|(_, a)| a.norm_sqr() > 0.0).map(|(i, _)| i)
    }

    /// Moves every amplitude to `map(index)`, failing on a collision.
    fn permute(&mut self, map: impl Fn(usize) -> usize) -> Result<()> {
        let mut next = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        let mut taken = vec![false; self.amplitudes.len()];
        for (i, a) in self.amplitudes.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let j = map(i);
            if taken[j] {
                return Err(Error::NotAPermutation);
            }
            taken[j] = true;
            next[j] = *a;
        }
        self.amplitudes = next;
        Ok(())
    }

    /// One full iteration, scratch uncomputed.
    pub fn step(&mut self) -> Result<()> {
        let k = self.step_in_stage;
        if k > self.layout.slots {
            return Err(Error::HistoryExhausted(k - 1));
        }
        let spec = self.spec;
        let layout = self.layout;
        let circuit = Circuit::new(&spec, &layout);
        self.permute(|i| {
            let mut b = [i as u64];
            let src = if k == 0 { RecordSource::Entry(circuit.entry_record(&b)) } else { RecordSource::Slot(k - 1) };
            circuit.step(&mut b, src);
            circuit.reset(&mut b, src);
            b[0] as usize
        })?;
        self.step_in_stage += 1;
        Ok(())
    }

    /// Zeroes the history register of every basis state.
    pub fn restart_stage(&mut self) -> Result<()> {
        let mask = !(self.layout.history.mask() as u64);
        self.permute(|i| i & mask as usize)?;
        self.step_in_stage = 0;
        Ok(())
    }

    /// Projects onto one sampled (state, head, tape) readout.
    pub fn collapse<R: Rng>(&mut self, rng: &mut R) {
        let l = self.layout;
        let key = |i: usize| {
            let b = [i as u64];
            (get_field(&b, l.state), get_field(&b, l.head), get_field(&b, l.tape))
        };
        let total: f64 = self.amplitudes.iter().map(|a| a.norm_sqr()).sum();
        let mut pick = rng.gen::<f64>() * total;
        let mut chosen = None;
        for i in self.support() {
            chosen = Some(i);
            pick -= self.probability(i);
            if pick < 0.0 {
                break;
            }
        }
        let Some(chosen) = chosen else { return };
        let target = key(chosen);
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if key(i) != target {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        let kept: f64 = self.amplitudes.iter().map(|a| a.norm_sqr()).sum();
        let scale = 1.0 / libm::sqrt(kept);
        for a in &mut self.amplitudes {
            *a *= scale;
        }
    }

    pub fn measure(&self) -> MeasurementReport {
        let l = self.layout;
        let halt = u64::from(self.spec.halt_state());
        let mut p_h = 0.0;
        let mut p_s: BTreeMap<BitString, f64> = BTreeMap::new();
        for i in self.support() {
            let b = [i as u64];
            if get_field(&b, l.state) == halt {
                let p = self.probability(i);
                p_h += p;
                *p_s.entry(BitString::from_bits(get_field(&b, l.tape), self.spec.tape_len())).or_default() += p;
            }
        }
        MeasurementReport::approximate(p_h, p_s)
    }
}
