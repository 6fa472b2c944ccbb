#![allow(dead_code)]

use std::collections::BTreeMap;

/// Reference interpreter written against the textual form of a description
/// number: the index in binary, most significant bit first, split into one
/// chunk per row with the highest row first. A chunk reads
/// `next state | move | write`.
pub struct NaiveMachine {
    pub rows: BTreeMap<(u32, u8), (u32, bool, u8)>,
}

pub fn state_bits(m: u32) -> usize {
    let mut bits = 0;
    while (1u32 << bits) < m {
        bits += 1;
    }
    bits
}

impl NaiveMachine {
    pub fn decode(index: u128, m: u32) -> Self {
        let sb = state_bits(m);
        let row_width = sb + 2;
        let rows_n = 2 * m as usize;
        let text = format!("{:0width$b}", index, width = rows_n * row_width);
        assert_eq!(text.len(), rows_n * row_width, "index too large");
        let mut rows = BTreeMap::new();
        for (chunk_i, chunk) in text.as_bytes().chunks(row_width).enumerate() {
            let row = rows_n - 1 - chunk_i;
            let chunk = std::str::from_utf8(chunk).unwrap();
            let next = if sb == 0 { 0 } else { u32::from_str_radix(&chunk[..sb], 2).unwrap() };
            let right = &chunk[sb..sb + 1] == "1";
            let write = if &chunk[sb + 1..] == "1" { 1 } else { 0 };
            rows.insert(((row / 2) as u32, (row % 2) as u8), (next, right, write));
        }
        Self { rows }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NaiveStatus {
    Halted(u32),
    Running,
    Frozen(u32),
}

/// Runs from the highest valid all-ones state on `tape`, head at 0.
pub fn naive_run(machine: &NaiveMachine, m: u32, tape: &[u8], z: u32) -> (NaiveStatus, Vec<u8>) {
    let mut tape = tape.to_vec();
    let c = tape.len() as i64;
    let mut state = ((1u32 << state_bits(m)) - 1).min(m - 1);
    let mut head: i64 = 0;
    if state == 0 {
        return (NaiveStatus::Halted(0), tape);
    }
    for k in 1..=z {
        let read = tape[head as usize];
        let (next, right, write) = machine.rows[&(state, read)];
        tape[head as usize] = write;
        head = (head + if right { 1 } else { -1 }).rem_euclid(c);
        state = next;
        if state == 0 {
            return (NaiveStatus::Halted(k), tape);
        }
        if state >= m {
            return (NaiveStatus::Frozen(k), tape);
        }
    }
    (NaiveStatus::Running, tape)
}

pub struct NaiveCensus {
    pub outputs: BTreeMap<String, u64>,
    pub by_step: BTreeMap<u32, u64>,
    pub halting: u64,
    pub running: u64,
    pub frozen: u64,
}

pub fn naive_census(m: u32, c: usize, z: u32, blank: u8) -> NaiveCensus {
    let programs = 1u128 << (2 * m as usize * (state_bits(m) + 2));
    let mut census =
        NaiveCensus { outputs: BTreeMap::new(), by_step: BTreeMap::new(), halting: 0, running: 0, frozen: 0 };
    for i in 0..programs {
        let machine = NaiveMachine::decode(i, m);
        let (status, tape) = naive_run(&machine, m, &vec![blank; c], z);
        match status {
            NaiveStatus::Halted(k) => {
                census.halting += 1;
                *census.by_step.entry(k).or_default() += 1;
                let s: String = tape.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect();
                *census.outputs.entry(s).or_default() += 1;
            }
            NaiveStatus::Running => census.running += 1,
            NaiveStatus::Frozen(_) => census.frozen += 1,
        }
    }
    census
}
