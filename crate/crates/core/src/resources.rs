//! Closed-form qubit counts for the superposed-machine circuit.

use alloc::vec::Vec;

use crate::spec::ceil_log2;

/// Per-register qubit widths. Every `log` below is `⌈log₂⌉`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ResourceEstimate {
    /// `m·n·(log m + log n + d)`
    pub program: u64,
    pub state: u64,
    pub moves: u64,
    pub head: u64,
    pub read: u64,
    pub write: u64,
    /// `c·log n`
    pub tape: u64,
    /// One history record, `log m + log n`.
    pub history_slot: u64,
    pub ancilla: u64,
}

impl ResourceEstimate {
    pub fn new(states: u32, symbols: u32, dims: u32, tape_len: u32, ancilla: u64) -> Self {
        let log_m = u64::from(ceil_log2(u64::from(states)));
        let log_n = u64::from(ceil_log2(u64::from(symbols)));
        let d = u64::from(dims);
        Self {
            program: u64::from(states) * u64::from(symbols) * (log_m + log_n + d),
            state: log_m,
            moves: d,
            head: u64::from(ceil_log2(u64::from(tape_len))),
            read: log_n,
            write: log_n,
            tape: u64::from(tape_len) * log_n,
            history_slot: log_m + log_n,
            ancilla,
        }
    }

    /// Qubits for a single iteration, ancillas included.
    pub fn base(&self) -> u64 {
        self.program + self.state + self.moves + self.head + self.read + self.write + self.tape + self.ancilla
    }

    /// Extra qubits per additional iteration.
    pub fn slope(&self) -> u64 {
        self.history_slot
    }

    /// `base + slope·(z − 1)`.
    pub fn total(&self, steps: u64) -> u64 {
        self.base() + self.slope() * steps.saturating_sub(1)
    }
}

/// Total qubits for `z` iterations with `q_a` ancillas.
pub fn qubit_count(states: u32, symbols: u32, dims: u32, tape_len: u32, steps: u64, ancilla: u64) -> u64 {
    ResourceEstimate::new(states, symbols, dims, tape_len, ancilla).total(steps)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GrowthRow {
    pub states: u32,
    pub tape_len: u32,
    pub steps: u64,
    pub base: u64,
    pub slope: u64,
    pub total: u64,
}

/// Binary 1-d totals over every `(m, c)` pair, `m` outer.
pub fn growth_table(
    states: impl IntoIterator<Item = u32>,
    tape_lens: impl IntoIterator<Item = u32> + Clone,
    steps: u64,
    ancilla: u64,
) -> Vec<GrowthRow> {
    states
        .into_iter()
        .flat_map(|m| {
            tape_lens.clone().into_iter().map(move |c| {
                let est = ResourceEstimate::new(m, 2, 1, c, ancilla);
                GrowthRow {
                    states: m,
                    tape_len: c,
                    steps,
                    base: est.base(),
                    slope: est.slope(),
                    total: est.total(steps),
                }
            })
        })
        .collect()
}
