//! Description numbers, transition tables and step-wise execution of binary
//! Turing machines on a cyclic tape.
//!
//! A description number packs one row per `(state, read symbol)` pair. Row
//! `state * n + symbol` sits at bit offset `row * row_bits`, so higher states
//! and higher symbols occupy more significant bits. Inside a row the fields
//! are, from most to least significant: next state, move (0 = left,
//! 1 = right), written symbol.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::spec::MachineSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProgramIndex(pub u128);

impl fmt::Display for ProgramIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    Left,
    Right,
}

impl Move {
    #[inline]
    pub fn from_bit(bit: u64) -> Self {
        if bit & 1 == 0 {
            Move::Left
        } else {
            Move::Right
        }
    }

    #[inline]
    pub fn bit(self) -> u64 {
        match self {
            Move::Left => 0,
            Move::Right => 1,
        }
    }

    /// New head position on a cyclic tape of `len` cells.
    #[inline]
    pub fn apply(self, head: u32, len: u32) -> u32 {
        match self {
            Move::Left => (head + len - 1) % len,
            Move::Right => (head + 1) % len,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rule {
    pub next_state: u32,
    pub moves: Move,
    pub write: u8,
}

impl Rule {
    pub const fn new(next_state: u32, moves: Move, write: u8) -> Self {
        Self { next_state, moves, write }
    }
}

/// Anything that can answer "what does state `q` do on symbol `r`".
pub trait Rules {
    fn rule(&self, state: u32, symbol: u8) -> Rule;
}

/// A decoded machine. `rows[q * n + r]` is the rule for state `q` reading `r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TransitionTable {
    rows: Vec<Rule>,
    halt_state: u32,
}

impl TransitionTable {
    /// Hand-built table, rows ordered `(Q0,R0), (Q0,R1), (Q1,R0), ...`.
    pub fn from_rules(spec: &MachineSpec, rows: Vec<Rule>, halt_state: u32) -> Result<Self> {
        if rows.len() != spec.rows() as usize {
            return Err(Error::FieldOutOfRange(alloc::format!("expected {} rows, got {}", spec.rows(), rows.len())));
        }
        let state_limit = 1u64 << spec.state_bits();
        for (i, row) in rows.iter().enumerate() {
            if u64::from(row.next_state) >= state_limit {
                return Err(Error::FieldOutOfRange(alloc::format!(
                    "row {i}: next state {} needs more than {} bits",
                    row.next_state,
                    spec.state_bits()
                )));
            }
            if u32::from(row.write) >= spec.symbols() {
                return Err(Error::FieldOutOfRange(alloc::format!("row {i}: symbol {}", row.write)));
            }
        }
        if halt_state >= spec.states() {
            return Err(Error::FieldOutOfRange(alloc::format!("halt state {halt_state}")));
        }
        Ok(Self { rows, halt_state })
    }

    pub fn rows(&self) -> &[Rule] {
        &self.rows
    }

    pub fn halt_state(&self) -> u32 {
        self.halt_state
    }

    /// Rule stored for `(state, symbol)`, ignoring the halting override.
    pub fn stored(&self, state: u32, symbol: u8) -> Option<&Rule> {
        self.rows.get(state as usize * 2 + symbol as usize)
    }
}

impl Rules for TransitionTable {
    #[inline]
    fn rule(&self, state: u32, symbol: u8) -> Rule {
        self.rows[state as usize * 2 + symbol as usize]
    }
}

/// A description number read in place, without decoding a table.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PackedProgram {
    bits: u128,
    row_bits: u32,
    row_mask: u128,
    symbol_bits: u32,
}

impl PackedProgram {
    pub(crate) fn new(index: u128, spec: &MachineSpec) -> Self {
        let row_bits = spec.row_bits();
        Self { bits: index, row_bits, row_mask: (1u128 << row_bits) - 1, symbol_bits: spec.symbol_bits() }
    }
}

impl Rules for PackedProgram {
    #[inline]
    fn rule(&self, state: u32, symbol: u8) -> Rule {
        let row = state * 2 + u32::from(symbol);
        let field = ((self.bits >> (row * self.row_bits)) & self.row_mask) as u64;
        Rule {
            next_state: (field >> (self.symbol_bits + 1)) as u32,
            moves: Move::from_bit(field >> self.symbol_bits),
            write: (field & 1) as u8,
        }
    }
}

/// Number of description numbers for `(m, n, d)`:
/// `2^((m·n)·(⌈log₂ m⌉ + ⌈log₂ n⌉ + d))`.
pub fn program_count(states: u32, symbols: u32, dims: u32) -> BigUint {
    let log = |x: u32| crate::spec::ceil_log2(u64::from(x));
    let exponent =
        u64::from(states) * u64::from(symbols) * (u64::from(log(states)) + u64::from(log(symbols)) + u64::from(dims));
    BigUint::from(1u8) << exponent
}

pub fn count_programs(spec: &MachineSpec) -> BigUint {
    program_count(spec.states(), spec.symbols(), spec.dims())
}

/// `count_programs` as a machine integer, for index arithmetic.
pub fn program_count_u128(spec: &MachineSpec) -> Result<u128> {
    let bits = spec.program_bits();
    if bits >= 128 {
        return Err(Error::IndexSpaceTooLarge(bits));
    }
    Ok(1u128 << bits)
}

pub fn decode_program(index: ProgramIndex, spec: &MachineSpec) -> Result<TransitionTable> {
    let count = program_count_u128(spec)?;
    if index.0 >= count {
        return Err(Error::IndexOutOfRange { index: index.0, count });
    }
    let packed = PackedProgram::new(index.0, spec);
    let rows = (0..spec.states()).flat_map(|q| (0..2u8).map(move |r| (q, r))).map(|(q, r)| packed.rule(q, r)).collect();
    Ok(TransitionTable { rows, halt_state: spec.halt_state() })
}

pub fn encode_program(table: &TransitionTable, spec: &MachineSpec) -> Result<ProgramIndex> {
    if table.rows.len() != spec.rows() as usize {
        return Err(Error::FieldOutOfRange(alloc::format!("expected {} rows, got {}", spec.rows(), table.rows.len())));
    }
    program_count_u128(spec)?;
    let row_bits = spec.row_bits();
    let symbol_bits = spec.symbol_bits();
    let mut index = 0u128;
    for (row, rule) in table.rows.iter().enumerate() {
        if spec.state_bits() < 32 && rule.next_state >> spec.state_bits() != 0 {
            return Err(Error::FieldOutOfRange(alloc::format!("row {row}: next state {}", rule.next_state)));
        }
        if rule.write > 1 {
            return Err(Error::FieldOutOfRange(alloc::format!("row {row}: symbol {}", rule.write)));
        }
        let field = (u128::from(rule.next_state) << (symbol_bits + 1))
            | (u128::from(rule.moves.bit()) << symbol_bits)
            | u128::from(rule.write);
        index |= field << (row as u32 * row_bits);
    }
    Ok(ProgramIndex(index))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MachineConfig {
    pub state: u32,
    pub head: u32,
    pub tape: BitString,
    pub step: u32,
}

impl MachineConfig {
    /// Enumeration start: initial state, head on cell 0, blank tape.
    pub fn initial(spec: &MachineSpec) -> Self {
        Self { state: spec.initial_state(), head: 0, tape: BitString::zeros(spec.tape_len()), step: 0 }
    }
}

/// One iteration: read, look up, write, move. The halt state loops on itself,
/// writes back what it read and moves left. A spurious state (a code `>= m`
/// that is not the halt state) is a fixed point.
pub fn step(config: &MachineConfig, table: &TransitionTable, spec: &MachineSpec) -> MachineConfig {
    step_with(table, table.halt_state, spec, config)
}

#[inline]
pub(crate) fn step_with<R: Rules>(rules: &R, halt: u32, spec: &MachineSpec, config: &MachineConfig) -> MachineConfig {
    let mut next = *config;
    let len = spec.tape_len();
    if config.state == halt {
        next.head = Move::Left.apply(config.head, len);
        next.step += 1;
    } else if spec.is_spurious(config.state) {
        // frozen
    } else {
        let read = config.tape.get(config.head);
        let rule = rules.rule(config.state, read);
        next.tape.set(config.head, rule.write);
        next.head = rule.moves.apply(config.head, len);
        next.state = rule.next_state;
        next.step += 1;
    }
    next
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RunStatus {
    /// First step at which the halt state was reached.
    HaltedAt(u32),
    RunningAtLimit,
    /// Step at which a spurious state was entered.
    FrozenInvalid(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RunOutcome {
    pub status: RunStatus,
    pub final_tape: BitString,
    pub final_state: u32,
}

/// Runs program `index` from the enumeration start configuration (optionally
/// with a different initial tape) for at most `spec.steps()` iterations.
pub fn run(index: ProgramIndex, spec: &MachineSpec, initial_tape: Option<BitString>) -> Result<RunOutcome> {
    let count = program_count_u128(spec)?;
    if index.0 >= count {
        return Err(Error::IndexOutOfRange { index: index.0, count });
    }
    let mut start = MachineConfig::initial(spec);
    if let Some(tape) = initial_tape {
        check_tape(spec, &tape)?;
        start.tape = tape;
    }
    Ok(execute(&PackedProgram::new(index.0, spec), spec.halt_state(), spec, start))
}

/// Runs a hand-built table from `initial_state` with the head on cell 0.
pub fn run_table(
    table: &TransitionTable,
    spec: &MachineSpec,
    initial_state: u32,
    initial_tape: BitString,
) -> Result<RunOutcome> {
    check_tape(spec, &initial_tape)?;
    let start = MachineConfig { state: initial_state, head: 0, tape: initial_tape, step: 0 };
    Ok(execute(table, table.halt_state, spec, start))
}

/// Enumeration fast path: program index given as a raw integer, blank tape.
#[inline]
pub(crate) fn run_packed(index: u128, spec: &MachineSpec) -> RunOutcome {
    execute(&PackedProgram::new(index, spec), spec.halt_state(), spec, MachineConfig::initial(spec))
}

fn check_tape(spec: &MachineSpec, tape: &BitString) -> Result<()> {
    if tape.len() != spec.tape_len() {
        return Err(Error::TapeLength { expected: spec.tape_len(), actual: tape.len() });
    }
    Ok(())
}

#[inline]
fn execute<R: Rules>(rules: &R, halt: u32, spec: &MachineSpec, start: MachineConfig) -> RunOutcome {
    let outcome =
        |status, config: &MachineConfig| RunOutcome { status, final_tape: config.tape, final_state: config.state };
    let mut config = start;
    if config.state == halt {
        return outcome(RunStatus::HaltedAt(0), &config);
    }
    if spec.is_spurious(config.state) {
        return outcome(RunStatus::FrozenInvalid(0), &config);
    }
    for k in 1..=spec.steps() {
        config = step_with(rules, halt, spec, &config);
        if config.state == halt {
            return outcome(RunStatus::HaltedAt(k), &config);
        }
        if spec.is_spurious(config.state) {
            return outcome(RunStatus::FrozenInvalid(k), &config);
        }
    }
    outcome(RunStatus::RunningAtLimit, &config)
}
