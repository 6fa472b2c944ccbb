use alloc::format;

use crate::bits::MAX_LEN;
use crate::error::{Error, Result};

/// `⌈log₂ x⌉`, with `ceil_log2(1) == 0`.
#[inline]
pub fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

/// Hyper-parameters of an enumeration universe: `states` (m), `symbols` (n),
/// `dims` (d), `tape_len` (c) and `steps` (z, the iteration limit).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MachineSpec {
    states: u32,
    symbols: u32,
    dims: u32,
    tape_len: u32,
    steps: u32,
}

impl MachineSpec {
    /// Binary, one-dimensional machines with `states` states on a cyclic tape
    /// of `tape_len` cells, run for at most `steps` iterations.
    pub fn binary(states: u32, tape_len: u32, steps: u32) -> Result<Self> {
        Self::new(states, 2, 1, tape_len, steps)
    }

    pub fn new(states: u32, symbols: u32, dims: u32, tape_len: u32, steps: u32) -> Result<Self> {
        if states == 0 {
            return Err(Error::InvalidSpec("state count must be at least 1".into()));
        }
        if symbols != 2 {
            return Err(Error::InvalidSpec(format!("only 2 symbols are supported, got {symbols}")));
        }
        if dims != 1 {
            return Err(Error::InvalidSpec(format!("only 1-dimensional tapes are supported, got {dims}")));
        }
        if tape_len == 0 || tape_len > MAX_LEN {
            return Err(Error::InvalidSpec(format!("tape length must be in 1..={MAX_LEN}, got {tape_len}")));
        }
        if steps == 0 {
            return Err(Error::InvalidSpec("iteration limit must be at least 1".into()));
        }
        Ok(Self { states, symbols, dims, tape_len, steps })
    }

    pub fn states(&self) -> u32 {
        self.states
    }

    pub fn symbols(&self) -> u32 {
        self.symbols
    }

    pub fn dims(&self) -> u32 {
        self.dims
    }

    pub fn tape_len(&self) -> u32 {
        self.tape_len
    }

    pub fn steps(&self) -> u32 {
        self.steps
    }

    /// Same universe with a different iteration limit.
    pub fn with_steps(&self, steps: u32) -> Result<Self> {
        Self::new(self.states, self.symbols, self.dims, self.tape_len, steps)
    }

    pub fn state_bits(&self) -> u32 {
        ceil_log2(u64::from(self.states))
    }

    pub fn symbol_bits(&self) -> u32 {
        ceil_log2(u64::from(self.symbols))
    }

    pub fn head_bits(&self) -> u32 {
        ceil_log2(u64::from(self.tape_len))
    }

    /// Width of one transition-table row: next state, move, written symbol.
    pub fn row_bits(&self) -> u32 {
        self.state_bits() + self.dims + self.symbol_bits()
    }

    pub fn rows(&self) -> u32 {
        self.states * self.symbols
    }

    /// Width of a full description number.
    pub fn program_bits(&self) -> u32 {
        self.rows() * self.row_bits()
    }

    /// Halt state under the enumeration convention.
    pub fn halt_state(&self) -> u32 {
        0
    }

    /// Start state under the enumeration convention: the all-ones state
    /// register, lowered to the highest valid state when all-ones would be a
    /// spurious code (state counts that are not powers of two).
    pub fn initial_state(&self) -> u32 {
        let all_ones = (1u32 << self.state_bits()) - 1;
        all_ones.min(self.states - 1)
    }

    /// Whether `state` is a code that no real state maps to.
    #[inline]
    pub fn is_spurious(&self, state: u32) -> bool {
        state >= self.states
    }
}
