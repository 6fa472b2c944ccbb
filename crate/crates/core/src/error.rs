use alloc::string::String;
use alloc::vec::Vec;

use crate::bits::BitString;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid machine spec: {0}")]
    InvalidSpec(String),
    #[error("program index {index} out of range for {count} programs")]
    IndexOutOfRange { index: u128, count: u128 },
    #[error("program space of 2^{0} programs does not fit a 128-bit index")]
    IndexSpaceTooLarge(u32),
    #[error("transition table field out of range: {0}")]
    FieldOutOfRange(String),
    #[error("tape has {actual} cells, expected {expected}")]
    TapeLength { expected: u32, actual: u32 },
    #[error("invalid index range [{lo}, {hi}) for {count} programs")]
    InvalidRange { lo: u128, hi: u128, count: u128 },
    #[error("distributions belong to different machine specs")]
    SpecMismatch,
    #[error("distributions cover overlapping index ranges")]
    OverlappingRanges,
    #[error("no machine halted")]
    NoHaltingMachines,
    #[error("string {0} was never produced by a halting machine")]
    NotInTable(BitString),
    #[error("string has {actual} symbols, expected {expected}")]
    StringLength { expected: u32, actual: u32 },
    #[error("{} block(s) missing from the table", .0.len())]
    MissingBlocks(Vec<BitString>),
    #[error("invalid symbol {0:?}; only '0' and '1' are allowed")]
    InvalidSymbol(char),
    #[error("not enough data to fit a decay curve: {0}")]
    InsufficientData(String),
    #[error("history slots exhausted after {0} recorded steps")]
    HistoryExhausted(usize),
    #[error("scratch registers are not clean")]
    DirtyScratch,
    #[error("state vector needs {needed} qubits, limit is {limit}")]
    DenseLimit { needed: usize, limit: usize },
    #[error("circuit block is not a permutation of basis states")]
    NotAPermutation,
    #[error("invalid staging: {0}")]
    InvalidStaging(String),
}
