use crate::error::{Error, Result};
use crate::resources::ResourceEstimate;
use crate::spec::MachineSpec;

/// A contiguous run of qubits inside a basis state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Field {
    pub offset: usize,
    pub width: usize,
}

impl Field {
    pub fn end(&self) -> usize {
        self.offset + self.width
    }

    pub fn mask(&self) -> u128 {
        if self.width >= 128 {
            u128::MAX
        } else {
            ((1u128 << self.width) - 1) << self.offset
        }
    }
}

/// Qubit allocation of the circuit, in ascending bit order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RegisterLayout {
    pub program: Field,
    pub state: Field,
    pub moves: Field,
    pub head: Field,
    pub read: Field,
    pub write: Field,
    pub tape: Field,
    pub history: Field,
    pub ancilla: Field,
    /// Bits per history record: previous state, then read symbol.
    pub slot_width: usize,
    pub slots: usize,
    pub total: usize,
}

impl RegisterLayout {
    /// Registers for stages of `steps_per_stage` iterations. The first step of
    /// a stage needs no history slot, so `steps_per_stage − 1` are allocated.
    pub fn new(spec: &MachineSpec, steps_per_stage: u32, ancilla: usize) -> Result<Self> {
        if steps_per_stage == 0 {
            return Err(Error::InvalidStaging("steps per stage must be at least 1".into()));
        }
        let est = ResourceEstimate::new(spec.states(), spec.symbols(), spec.dims(), spec.tape_len(), ancilla as u64);
        let mut cursor = 0;
        let mut next = |width: u64| {
            let f = Field { offset: cursor, width: width as usize };
            cursor += width as usize;
            f
        };
        let slots = steps_per_stage as usize - 1;
        let program = next(est.program);
        let state = next(est.state);
        let moves = next(est.moves);
        let head = next(est.head);
        let read = next(est.read);
        let write = next(est.write);
        let tape = next(est.tape);
        let history = next(est.history_slot * slots as u64);
        let ancilla = next(ancilla as u64);
        Ok(Self {
            program,
            state,
            moves,
            head,
            read,
            write,
            tape,
            history,
            ancilla,
            slot_width: est.history_slot as usize,
            slots,
            total: cursor,
        })
    }

    pub fn fields(&self) -> [(&'static str, Field); 9] {
        [
            ("program", self.program),
            ("state", self.state),
            ("move", self.moves),
            ("head", self.head),
            ("read", self.read),
            ("write", self.write),
            ("tape", self.tape),
            ("history", self.history),
            ("ancilla", self.ancilla),
        ]
    }

    /// 64-bit words per basis state.
    pub fn words(&self) -> usize {
        self.total.div_ceil(64).max(1)
    }

    /// History record `k`: (previous-state field, read-symbol field).
    pub fn slot(&self, k: usize) -> (Field, Field) {
        debug_assert!(k < self.slots);
        let base = self.history.offset + k * self.slot_width;
        let state_width = self.state.width;
        (
            Field { offset: base, width: state_width },
            Field { offset: base + state_width, width: self.slot_width - state_width },
        )
    }
}

#[inline]
pub fn get(words: &[u64], offset: usize, width: usize) -> u64 {
    debug_assert!(width <= 64);
    if width == 0 {
        return 0;
    }
    let word = offset / 64;
    let shift = offset % 64;
    let mut v = words[word] >> shift;
    if shift + width > 64 {
        v |= words[word + 1] << (64 - shift);
    }
    if width == 64 {
        v
    } else {
        v & ((1u64 << width) - 1)
    }
}

#[inline]
pub fn xor(words: &mut [u64], offset: usize, width: usize, value: u64) {
    debug_assert!(width <= 64);
    if width == 0 {
        return;
    }
    let value = if width == 64 { value } else { value & ((1u64 << width) - 1) };
    let word = offset / 64;
    let shift = offset % 64;
    words[word] ^= value << shift;
    if shift + width > 64 {
        words[word + 1] ^= value >> (64 - shift);
    }
}

#[inline]
pub fn get_field(words: &[u64], f: Field) -> u64 {
    get(words, f.offset, f.width)
}

#[inline]
pub fn xor_field(words: &mut [u64], f: Field, value: u64) {
    xor(words, f.offset, f.width, value)
}

/// Reads a field of up to 128 bits.
pub fn get_wide(words: &[u64], f: Field) -> u128 {
    let low = f.width.min(64);
    let mut v = u128::from(get(words, f.offset, low));
    if f.width > 64 {
        v |= u128::from(get(words, f.offset + 64, f.width - 64)) << 64;
    }
    v
}

pub fn xor_wide(words: &mut [u64], f: Field, value: u128) {
    let low = f.width.min(64);
    xor(words, f.offset, low, value as u64);
    if f.width > 64 {
        xor(words, f.offset + 64, f.width - 64, (value >> 64) as u64);
    }
}

/// Zeroes a field of any width.
pub fn clear(words: &mut [u64], f: Field) {
    let mut off = f.offset;
    let end = f.end();
    while off < end {
        let w = (end - off).min(64);
        let v = get(words, off, w);
        xor(words, off, w, v);
        off += w;
    }
}

pub fn is_zero(words: &[u64], f: Field) -> bool {
    let mut off = f.offset;
    let end = f.end();
    while off < end {
        let w = (end - off).min(64);
        if get(words, off, w) != 0 {
            return false;
        }
        off += w;
    }
    true
}
