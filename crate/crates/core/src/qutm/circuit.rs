//! The per-iteration blocks as permutations of computational basis states.
//!
//! Every block XORs a function of registers it does not modify into the
//! registers it does, or cyclically shifts the head under a control, so each
//! block is a bijection on the full `2^total` basis.

use super::layout::{get, get_field, xor, xor_field, RegisterLayout};
use crate::spec::MachineSpec;

/// What the transition block needs to undo itself: the state before the step
/// and the symbol read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Record {
    pub state: u32,
    pub read: u8,
}

/// Where a step's record lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordSource {
    /// First step of a stage: the stage-entry configuration is classically
    /// known from preparation, so the record is a constant.
    Entry(Record),
    /// History slot `k`.
    Slot(usize),
}

#[derive(Debug, Clone, Copy)]
pub struct Circuit<'a> {
    pub spec: &'a MachineSpec,
    pub layout: &'a RegisterLayout,
    pub halt: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Effect {
    next: u64,
    write: u64,
    moves: u64,
}

impl<'a> Circuit<'a> {
    pub fn new(spec: &'a MachineSpec, layout: &'a RegisterLayout) -> Self {
        Self { spec, layout, halt: spec.halt_state() }
    }

    pub fn with_halt(mut self, halt: u32) -> Self {
        self.halt = halt;
        self
    }

    #[inline]
    fn head(&self, b: &[u64]) -> Option<usize> {
        let head = get_field(b, self.layout.head) as usize;
        (head < self.spec.tape_len() as usize).then_some(head)
    }

    /// Stage-entry record of a clean basis state.
    pub fn entry_record(&self, b: &[u64]) -> Record {
        let read = self.head(b).map_or(0, |h| get(b, self.layout.tape.offset + h, 1) as u8);
        Record { state: get_field(b, self.layout.state) as u32, read }
    }

    #[inline]
    fn record(&self, b: &[u64], src: RecordSource) -> Record {
        match src {
            RecordSource::Entry(r) => r,
            RecordSource::Slot(k) => {
                let (s, r) = self.layout.slot(k);
                Record { state: get_field(b, s) as u32, read: get_field(b, r) as u8 }
            }
        }
    }

    /// Rule applied for `rec`, read straight from the program register.
    #[inline]
    fn effect(&self, b: &[u64], rec: Record) -> Effect {
        if rec.state == self.halt || self.spec.is_spurious(rec.state) {
            return Effect { next: u64::from(rec.state), write: u64::from(rec.read), moves: 0 };
        }
        let row_bits = self.spec.row_bits() as usize;
        let row = rec.state as usize * 2 + rec.read as usize;
        let field = get(b, self.layout.program.offset + row * row_bits, row_bits);
        Effect { next: field >> 2, write: field & 1, moves: (field >> 1) & 1 }
    }

    /// `read ^= tape[head]`
    pub fn read(&self, b: &mut [u64]) {
        if let Some(h) = self.head(b) {
            let t = get(b, self.layout.tape.offset + h, 1);
            xor_field(b, self.layout.read, t);
        }
    }

    /// Deposits the record, replaces the state with the next state and loads
    /// the write and move registers.
    pub fn delta(&self, b: &mut [u64], src: RecordSource) {
        let l = self.layout;
        let rec = match src {
            RecordSource::Slot(k) => {
                let (s, r) = l.slot(k);
                let state = get_field(b, l.state);
                let read = get_field(b, l.read);
                xor_field(b, s, state);
                xor_field(b, r, read);
                let rec = self.record(b, src);
                xor_field(b, l.state, u64::from(rec.state));
                rec
            }
            RecordSource::Entry(rec) => {
                xor_field(b, l.state, u64::from(rec.state));
                rec
            }
        };
        let e = self.effect(b, rec);
        xor_field(b, l.state, e.next);
        xor_field(b, l.write, e.write);
        xor_field(b, l.moves, e.moves);
    }

    /// `tape[head] ^= read ^ write`
    pub fn write(&self, b: &mut [u64]) {
        if let Some(h) = self.head(b) {
            let flip = get_field(b, self.layout.read) ^ get_field(b, self.layout.write);
            xor(b, self.layout.tape.offset + h, 1, flip);
        }
    }

    /// Cyclic head shift selected by the move register; no shift when the
    /// step started in a spurious state.
    pub fn shift(&self, b: &mut [u64], src: RecordSource) {
        let rec = self.record(b, src);
        if rec.state != self.halt && self.spec.is_spurious(rec.state) {
            return;
        }
        let Some(h) = self.head(b) else { return };
        let c = self.spec.tape_len() as usize;
        let moved = if get_field(b, self.layout.moves) == 1 { (h + 1) % c } else { (h + c - 1) % c };
        xor_field(b, self.layout.head, (h ^ moved) as u64);
    }

    /// Uncomputes read, write and move from the record and program.
    pub fn reset(&self, b: &mut [u64], src: RecordSource) {
        let rec = self.record(b, src);
        let e = self.effect(b, rec);
        xor_field(b, self.layout.read, u64::from(rec.read));
        xor_field(b, self.layout.write, e.write);
        xor_field(b, self.layout.moves, e.moves);
    }

    /// Read, transition, write and move.
    pub fn step(&self, b: &mut [u64], src: RecordSource) {
        self.read(b);
        self.delta(b, src);
        self.write(b);
        self.shift(b, src);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;

    /// Applies `block` to every basis state with one of the given program
    /// register values and checks that no two states collide. The program
    /// register is only ever a control, so each slice must map onto itself.
    fn assert_bijection(layout: &RegisterLayout, programs: &[u64], block: impl Fn(&mut [u64])) {
        let rest = layout.total - layout.program.width;
        let n = 1usize << rest;
        for &p in programs {
            let mut seen = vec![false; n];
            for i in 0..n {
                let mut b = [p | ((i as u64) << layout.program.width)];
                block(&mut b);
                assert_eq!(b[0] & ((1 << layout.program.width) - 1), p);
                let j = (b[0] >> layout.program.width) as usize;
                assert!(!seen[j], "collision at {j}");
                seen[j] = true;
            }
        }
    }

    #[test]
    fn every_block_is_a_permutation() {
        // c = 3 leaves an unused head code, m = 3 a spurious state code
        for (m, c) in [(2, 2), (2, 3), (3, 2)] {
            let spec = MachineSpec::binary(m, c, 2).unwrap();
            let layout = RegisterLayout::new(&spec, 2, 0).unwrap();
            let width = layout.program.width;
            let programs: Vec<u64> = if width <= 12 {
                (0..1u64 << width).collect()
            } else {
                (0..512u64).map(|i| i.wrapping_mul(0x9e37_79b9_7f4a_7c15) >> (64 - width)).collect()
            };
            let circuit = Circuit::new(&spec, &layout);
            let entry = RecordSource::Entry(Record { state: spec.initial_state(), read: 0 });
            for src in [entry, RecordSource::Slot(0)] {
                assert_bijection(&layout, &programs, |b| circuit.read(b));
                assert_bijection(&layout, &programs, |b| circuit.delta(b, src));
                assert_bijection(&layout, &programs, |b| circuit.write(b));
                assert_bijection(&layout, &programs, |b| circuit.shift(b, src));
                assert_bijection(&layout, &programs, |b| circuit.reset(b, src));
            }
        }
    }
}
