//! Exact backend: since every block permutes basis states, the superposition
//! is a weighted set of classical basis states, one per program.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_rational::Ratio;
use rand::Rng;

use super::circuit::{Circuit, Record, RecordSource};
use super::layout::{clear, get_field, get_wide, is_zero, xor_field, xor_wide, RegisterLayout};
use super::MeasurementReport;
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::machine::{encode_program, program_count_u128, TransitionTable};
use crate::spec::MachineSpec;

/// One branch seen through the register layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Branch {
    pub program: u128,
    pub state: u32,
    pub head: u32,
    pub tape: BitString,
    pub read: u64,
    pub write: u64,
    pub moves: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisEnsemble {
    spec: MachineSpec,
    layout: RegisterLayout,
    halt: u32,
    words: usize,
    /// `branches × words` packed basis states.
    states: Vec<u64>,
    /// Weight numerators over `denominator`.
    weights: Vec<u64>,
    denominator: u128,
    step_in_stage: usize,
    steps_done: u32,
    /// Per-branch stage-entry records, filled by the first step of a stage.
    entry: Vec<Record>,
    pending: Option<Pending>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pending {
    Entry,
    Slot(usize),
}

impl BasisEnsemble {
    /// Uniform superposition over every program, start state loaded, blank
    /// tape, head on cell 0.
    pub fn prepare_initial(spec: &MachineSpec, layout: &RegisterLayout) -> Result<Self> {
        let count = program_count_u128(spec)?;
        let count = usize::try_from(count).map_err(|_| Error::IndexSpaceTooLarge(spec.program_bits()))?;
        Self::prepare_programs(spec, layout, (0..count).map(|i| i as u128))
    }

    /// Uniform superposition over the given program indices.
    pub fn prepare_programs(
        spec: &MachineSpec,
        layout: &RegisterLayout,
        programs: impl IntoIterator<Item = u128>,
    ) -> Result<Self> {
        let mut ens = Self::empty(spec, layout, spec.halt_state());
        let count = program_count_u128(spec)?;
        for p in programs {
            if p >= count {
                return Err(Error::IndexOutOfRange { index: p, count });
            }
            ens.push(p, spec.initial_state(), BitString::zeros(spec.tape_len()));
        }
        ens.denominator = ens.weights.len() as u128;
        Ok(ens)
    }

    /// A single hand-built machine with its own halt state, start state and
    /// initial tape.
    pub fn prepare_table(
        spec: &MachineSpec,
        layout: &RegisterLayout,
        table: &TransitionTable,
        initial_state: u32,
        tape: BitString,
    ) -> Result<Self> {
        if tape.len() != spec.tape_len() {
            return Err(Error::TapeLength { expected: spec.tape_len(), actual: tape.len() });
        }
        let program = encode_program(table, spec)?;
        let mut ens = Self::empty(spec, layout, table.halt_state());
        ens.push(program.0, initial_state, tape);
        ens.denominator = 1;
        Ok(ens)
    }

    fn empty(spec: &MachineSpec, layout: &RegisterLayout, halt: u32) -> Self {
        Self {
            spec: *spec,
            layout: *layout,
            halt,
            words: layout.words(),
            states: Vec::new(),
            weights: Vec::new(),
            denominator: 0,
            step_in_stage: 0,
            steps_done: 0,
            entry: Vec::new(),
            pending: None,
        }
    }

    fn push(&mut self, program: u128, state: u32, tape: BitString) {
        let mut b = vec![0u64; self.words];
        xor_wide(&mut b, self.layout.program, program);
        xor_field(&mut b, self.layout.state, u64::from(state));
        xor_field(&mut b, self.layout.tape, tape.bits());
        self.states.extend_from_slice(&b);
        self.weights.push(1);
    }

    pub fn spec(&self) -> &MachineSpec {
        &self.spec
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn steps_done(&self) -> u32 {
        self.steps_done
    }

    pub fn weight(&self, i: usize) -> Ratio<u128> {
        Ratio::new(u128::from(self.weights[i]), self.denominator)
    }

    pub fn total_weight(&self) -> Ratio<u128> {
        Ratio::new(self.weights.iter().map(|&w| u128::from(w)).sum(), self.denominator)
    }

    pub fn basis(&self, i: usize) -> &[u64] {
        &self.states[i * self.words..(i + 1) * self.words]
    }

    /// `(basis words, weight)` for every branch.
    pub fn iter(&self) -> impl Iterator<Item = (&[u64], Ratio<u128>)> + '_ {
        (0..self.len()).map(move |i| (self.basis(i), self.weight(i)))
    }

    pub fn branch(&self, i: usize) -> Branch {
        let b = self.basis(i);
        let l = &self.layout;
        Branch {
            program: get_wide(b, l.program),
            state: get_field(b, l.state) as u32,
            head: get_field(b, l.head) as u32,
            tape: BitString::from_bits(get_field(b, l.tape), self.spec.tape_len()),
            read: get_field(b, l.read),
            write: get_field(b, l.write),
            moves: get_field(b, l.moves),
        }
    }

    /// Read, write and move registers are zero in every branch.
    pub fn scratch_clean(&self) -> bool {
        let l = &self.layout;
        (0..self.len()).all(|i| {
            let b = self.basis(i);
            is_zero(b, l.read) && is_zero(b, l.write) && is_zero(b, l.moves)
        })
    }

    /// Read, transition, write and move on every branch. The transition
    /// deposits its record in the next free history slot, except on the first
    /// step of a stage.
    pub fn tm_step(&mut self) -> Result<()> {
        if self.pending.is_some() {
            return Err(Error::DirtyScratch);
        }
        let pending = match self.step_in_stage {
            0 => Pending::Entry,
            k if k - 1 < self.layout.slots => Pending::Slot(k - 1),
            k => return Err(Error::HistoryExhausted(k - 1)),
        };
        let words = self.words;
        let spec = self.spec;
        let layout = self.layout;
        let circuit = Circuit::new(&spec, &layout).with_halt(self.halt);
        if pending == Pending::Entry {
            self.entry = self.states.chunks_exact(words).map(|b| circuit.entry_record(b)).collect();
        }
        for (i, b) in self.states.chunks_exact_mut(words).enumerate() {
            let src = match pending {
                Pending::Entry => RecordSource::Entry(self.entry[i]),
                Pending::Slot(k) => RecordSource::Slot(k),
            };
            circuit.step(b, src);
        }
        self.pending = Some(pending);
        Ok(())
    }

    /// Uncomputes the scratch registers of the last `tm_step`.
    pub fn reset_step(&mut self) -> Result<()> {
        let Some(pending) = self.pending.take() else {
            return Ok(());
        };
        let words = self.words;
        let spec = self.spec;
        let layout = self.layout;
        let circuit = Circuit::new(&spec, &layout).with_halt(self.halt);
        for (i, b) in self.states.chunks_exact_mut(words).enumerate() {
            let src = match pending {
                Pending::Entry => RecordSource::Entry(self.entry[i]),
                Pending::Slot(k) => RecordSource::Slot(k),
            };
            circuit.reset(b, src);
        }
        self.step_in_stage += 1;
        self.steps_done += 1;
        Ok(())
    }

    /// Drops the history and starts a new stage from the carried (program,
    /// state, head, tape) registers.
    pub fn restart_stage(&mut self) -> Result<()> {
        if self.pending.is_some() {
            return Err(Error::DirtyScratch);
        }
        let history = self.layout.history;
        for b in self.states.chunks_exact_mut(self.words) {
            clear(b, history);
        }
        self.step_in_stage = 0;
        self.entry.clear();
        Ok(())
    }

    /// Samples one (state, head, tape) readout and keeps only the branches
    /// consistent with it, renormalized.
    pub fn collapse<R: Rng>(&mut self, rng: &mut R) {
        if self.denominator == 0 {
            return;
        }
        let total: u128 = self.weights.iter().map(|&w| u128::from(w)).sum();
        let mut pick = rng.gen_range(0..total);
        let mut chosen = 0;
        for (i, &w) in self.weights.iter().enumerate() {
            if pick < u128::from(w) {
                chosen = i;
                break;
            }
            pick -= u128::from(w);
        }
        let key = self.readout(chosen);
        let keep: Vec<usize> = (0..self.len()).filter(|&i| self.readout(i) == key).collect();
        let mut states = Vec::with_capacity(keep.len() * self.words);
        let mut weights = Vec::with_capacity(keep.len());
        for &i in &keep {
            states.extend_from_slice(self.basis(i));
            weights.push(self.weights[i]);
        }
        self.states = states;
        self.weights = weights;
        self.denominator = self.weights.iter().map(|&w| u128::from(w)).sum();
    }

    fn readout(&self, i: usize) -> (u32, u32, BitString) {
        let b = self.branch(i);
        (b.state, b.head, b.tape)
    }

    /// Halt probability and joint (tape, halted) probabilities.
    pub fn measure(&self) -> MeasurementReport {
        let mut halted = 0u128;
        let mut outputs: BTreeMap<BitString, u128> = BTreeMap::new();
        for i in 0..self.len() {
            let b = self.branch(i);
            if b.state == self.halt {
                let w = u128::from(self.weights[i]);
                halted += w;
                *outputs.entry(b.tape).or_default() += w;
            }
        }
        let den = self.denominator.max(1);
        MeasurementReport::exact(
            Ratio::new(halted, den),
            outputs.into_iter().map(|(s, w)| (s, Ratio::new(w, den))).collect(),
        )
    }

    /// Trace line for branch `i`.
    pub fn describe(&self, i: usize) -> alloc::string::String {
        let b = self.branch(i);
        let words = self.basis(i);
        let mut history = alloc::string::String::new();
        for k in 0..self.layout.slots {
            let (s, r) = self.layout.slot(k);
            if k > 0 {
                history.push(',');
            }
            history.push_str(&alloc::format!("{}:{}", get_field(words, s), get_field(words, r)));
        }
        alloc::format!(
            "state={} head={} tape={} read={} write={} move={} history=[{}]",
            b.state,
            b.head,
            b.tape,
            b.read,
            b.write,
            b.moves,
            history
        )
    }
}
