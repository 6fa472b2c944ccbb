//! Simulation of the reversible circuit that runs every program of a
//! [`MachineSpec`] in superposition, one machine iteration per block sequence
//! (read, transition, write, move, reset).
//!
//! Two backends share the block definitions in [`circuit`]: an exact weighted
//! ensemble of basis states ([`BasisEnsemble`]) and a dense complex state
//! vector ([`StateVector`]) for tiny registers.

pub mod circuit;
pub mod dense;
pub mod ensemble;
pub mod layout;

use alloc::collections::BTreeMap;
use alloc::string::String;
use core::fmt::Write;

use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use circuit::{Circuit, Record, RecordSource};
pub use dense::{StateVector, DEFAULT_DENSE_LIMIT};
pub use ensemble::{BasisEnsemble, Branch};
pub use layout::{Field, RegisterLayout};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::machine::ProgramIndex;
use crate::spec::MachineSpec;

/// `RegisterLayout::new` under its operation name.
pub fn build_layout(spec: &MachineSpec, steps_per_stage: u32, ancilla: usize) -> Result<RegisterLayout> {
    RegisterLayout::new(spec, steps_per_stage, ancilla)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Permutation,
    StateVector { max_qubits: usize },
}

impl Backend {
    pub fn dense() -> Self {
        Backend::StateVector { max_qubits: DEFAULT_DENSE_LIMIT }
    }
}

/// What happens between stages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Staging {
    /// Carry every branch into the next stage.
    #[default]
    Carry,
    /// Measure (state, head, tape), keep one sampled outcome and re-prepare.
    Sample { seed: u64 },
}

/// Exact halting and output probabilities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactProbabilities {
    pub p_h: Ratio<u128>,
    pub p_s: BTreeMap<BitString, Ratio<u128>>,
}

/// Probability that the state register holds the halt state (`p_h`) and the
/// joint probability of halting with tape `s` (`p_s`).
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementReport {
    pub p_h: f64,
    pub p_s: BTreeMap<BitString, f64>,
    /// Present for the permutation backend.
    pub exact: Option<ExactProbabilities>,
}

fn ratio_f64(r: &Ratio<u128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl MeasurementReport {
    pub fn exact(p_h: Ratio<u128>, p_s: BTreeMap<BitString, Ratio<u128>>) -> Self {
        Self {
            p_h: ratio_f64(&p_h),
            p_s: p_s.iter().map(|(s, r)| (*s, ratio_f64(r))).collect(),
            exact: Some(ExactProbabilities { p_h, p_s }),
        }
    }

    pub fn approximate(p_h: f64, p_s: BTreeMap<BitString, f64>) -> Self {
        Self { p_h, p_s, exact: None }
    }

    /// `p_s / p_h` for `s`; exact when available.
    pub fn d_estimate(&self, s: &BitString) -> Option<Ratio<u128>> {
        let exact = self.exact.as_ref()?;
        let ps = exact.p_s.get(s)?;
        if *exact.p_h.numer() == 0 {
            return None;
        }
        Some(*ps / exact.p_h)
    }

    /// `−log₂(p_s / p_h)` in bits, `None` if `s` never halted.
    pub fn ctm_estimate(&self, s: &BitString) -> Option<f64> {
        if let Some(d) = self.d_estimate(s) {
            return Some(libm::log2(*d.denom() as f64) - libm::log2(*d.numer() as f64));
        }
        let ps = *self.p_s.get(s)?;
        (ps > 0.0 && self.p_h > 0.0).then(|| -libm::log2(ps / self.p_h))
    }
}

/// Final state of either backend.
pub enum Terminal {
    Ensemble(BasisEnsemble),
    Dense(StateVector),
}

impl Terminal {
    pub fn measure(&self) -> MeasurementReport {
        match self {
            Terminal::Ensemble(e) => e.measure(),
            Terminal::Dense(v) => v.measure(),
        }
    }
}

fn check_staging(spec: &MachineSpec, steps_per_stage: u32) -> Result<()> {
    if steps_per_stage == 0 || steps_per_stage > spec.steps() {
        return Err(Error::InvalidStaging(alloc::format!(
            "steps per stage must be in 1..={}, got {steps_per_stage}",
            spec.steps()
        )));
    }
    Ok(())
}

/// Runs `spec.steps()` iterations in stages of at most `steps_per_stage`,
/// returning the final ensemble or state vector.
pub fn simulate(spec: &MachineSpec, steps_per_stage: u32, backend: Backend, staging: Staging) -> Result<Terminal> {
    check_staging(spec, steps_per_stage)?;
    let layout = RegisterLayout::new(spec, steps_per_stage, 0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(match staging {
        Staging::Sample { seed } => seed,
        Staging::Carry => 0,
    });
    let stages = stage_lengths(spec.steps(), steps_per_stage);
    match backend {
        Backend::Permutation => {
            let mut ens = BasisEnsemble::prepare_initial(spec, &layout)?;
            for (i, len) in stages.enumerate() {
                if i > 0 {
                    if let Staging::Sample { .. } = staging {
                        ens.collapse(&mut rng);
                    }
                    ens.restart_stage()?;
                }
                for _ in 0..len {
                    ens.tm_step()?;
                    ens.reset_step()?;
                }
            }
            Ok(Terminal::Ensemble(ens))
        }
        Backend::StateVector { max_qubits } => {
            let mut sv = StateVector::prepare_initial(spec, &layout, max_qubits)?;
            for (i, len) in stages.enumerate() {
                if i > 0 {
                    if let Staging::Sample { .. } = staging {
                        sv.collapse(&mut rng);
                    }
                    sv.restart_stage()?;
                }
                for _ in 0..len {
                    sv.step()?;
                }
            }
            Ok(Terminal::Dense(sv))
        }
    }
}

/// Lengths of the `⌈z / z_ch⌉` stages.
pub fn stage_lengths(steps: u32, per_stage: u32) -> impl Iterator<Item = u32> {
    let stages = steps.div_ceil(per_stage);
    (0..stages).map(move |i| per_stage.min(steps - i * per_stage))
}

/// Simulates the circuit and measures the state and tape registers.
pub fn run_staged(
    spec: &MachineSpec,
    steps_per_stage: u32,
    backend: Backend,
    staging: Staging,
) -> Result<MeasurementReport> {
    Ok(simulate(spec, steps_per_stage, backend, staging)?.measure())
}

/// Largest difference between a state vector's basis probabilities and an
/// ensemble's weights, over every basis state.
pub fn compare_states(ensemble: &BasisEnsemble, dense: &StateVector) -> Result<f64> {
    if ensemble.layout() != dense.layout() || ensemble.layout().words() != 1 {
        return Err(Error::SpecMismatch);
    }
    let mut expected: BTreeMap<usize, f64> = BTreeMap::new();
    for (b, w) in ensemble.iter() {
        *expected.entry(b[0] as usize).or_default() += ratio_f64(&w);
    }
    let mut worst: f64 = 0.0;
    for (i, a) in dense.amplitudes().iter().enumerate() {
        let e = expected.get(&i).copied().unwrap_or(0.0);
        worst = worst.max((a.norm_sqr() - e).abs());
    }
    Ok(worst)
}

/// Runs both backends with the default dense limit and compares them.
pub fn compare_backends(spec: &MachineSpec, steps_per_stage: u32) -> Result<f64> {
    let Terminal::Ensemble(ens) = simulate(spec, steps_per_stage, Backend::Permutation, Staging::Carry)? else {
        unreachable!()
    };
    let Terminal::Dense(sv) = simulate(spec, steps_per_stage, Backend::dense(), Staging::Carry)? else {
        unreachable!()
    };
    compare_states(&ens, &sv)
}

/// Line-oriented register dump for one program, one line after each block
/// group, for comparing against the classical interpreter.
pub fn trace(spec: &MachineSpec, program: ProgramIndex, steps_per_stage: u32) -> Result<String> {
    check_staging(spec, steps_per_stage)?;
    let layout = RegisterLayout::new(spec, steps_per_stage, 0)?;
    let mut ens = BasisEnsemble::prepare_programs(spec, &layout, [program.0])?;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# program={} m={} c={} z={} z_ch={}",
        program,
        spec.states(),
        spec.tape_len(),
        spec.steps(),
        steps_per_stage
    );
    let _ = writeln!(out, "step=0 phase=prepare {}", ens.describe(0));
    let mut step = 0;
    for (i, len) in stage_lengths(spec.steps(), steps_per_stage).enumerate() {
        if i > 0 {
            ens.restart_stage()?;
            let _ = writeln!(out, "step={step} phase=restart {}", ens.describe(0));
        }
        for _ in 0..len {
            step += 1;
            ens.tm_step()?;
            let _ = writeln!(out, "step={step} phase=step {}", ens.describe(0));
            ens.reset_step()?;
            let _ = writeln!(out, "step={step} phase=reset {}", ens.describe(0));
        }
    }
    Ok(out)
}
