//! Algorithmic complexity of short binary strings by exhaustive Turing machine
//! enumeration, plus an exact simulator of the reversible circuit that runs
//! every machine of a given size in superposition.
//!
//! The crate is `no_std` and only needs `alloc`. IO, persistence and the
//! parallel census driver live in the `acssq` companion crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bits;
pub mod complexity;
pub mod enumerate;
pub mod error;
pub mod machine;
pub mod qutm;
pub mod resources;
pub mod spec;

pub use bits::BitString;
pub use complexity::{
    bdm, ctm, d_value, fit_decay, BdmOptions, BdmReport, BlockMode, CtmTable, DecayFit, MissingPolicy,
};
pub use enumerate::{enumerate_range, merge, FrequencyDistribution};
pub use error::{Error, Result};
pub use machine::{
    count_programs, decode_program, encode_program, run, run_table, step, MachineConfig, Move, ProgramIndex, Rule,
    RunOutcome, RunStatus, TransitionTable,
};
pub use resources::{growth_table, qubit_count, ResourceEstimate};
pub use spec::MachineSpec;
