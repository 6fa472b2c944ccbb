use acssq_core::enumerate::enumerate_all;
use acssq_core::machine::MachineConfig;
use acssq_core::qutm::{
    build_layout, compare_backends, compare_states, run_staged, simulate, trace, Backend, BasisEnsemble,
    RegisterLayout, Staging, StateVector, Terminal,
};
use acssq_core::{
    complexity, decode_program, step, BitString, Error, MachineSpec, Move, ProgramIndex, Rule, TransitionTable,
};
use num_rational::Ratio;

fn spec(m: u32, c: u32, z: u32) -> MachineSpec {
    MachineSpec::binary(m, c, z).unwrap()
}

fn adder(spec: &MachineSpec) -> TransitionTable {
    use Move::*;
    let rows = vec![
        Rule::new(1, Right, 1),
        Rule::new(0, Right, 1),
        Rule::new(2, Left, 0),
        Rule::new(1, Right, 1),
        Rule::new(2, Left, 0),
        Rule::new(3, Right, 0),
        Rule::new(3, Left, 0),
        Rule::new(3, Left, 1),
    ];
    TransitionTable::from_rules(spec, rows, 3).unwrap()
}

/// Steps every branch and the classical interpreter side by side.
fn assert_branches_follow_interpreter(s: &MachineSpec, programs: Vec<u128>) {
    let layout = build_layout(s, s.steps(), 0).unwrap();
    let mut ens = BasisEnsemble::prepare_programs(s, &layout, programs.iter().copied()).unwrap();
    let tables: Vec<TransitionTable> = programs.iter().map(|&p| decode_program(ProgramIndex(p), s).unwrap()).collect();
    let mut configs = vec![MachineConfig::initial(s); programs.len()];
    for k in 1..=s.steps() {
        ens.tm_step().unwrap();
        ens.reset_step().unwrap();
        assert!(ens.scratch_clean(), "scratch dirty after step {k}");
        for (i, config) in configs.iter_mut().enumerate() {
            *config = step(config, &tables[i], s);
            let b = ens.branch(i);
            assert_eq!(b.program, programs[i]);
            assert_eq!(
                (b.state, b.head, b.tape),
                (config.state, config.head, config.tape),
                "program {} step {k}",
                programs[i]
            );
        }
    }
    assert_eq!(ens.len(), programs.len());
}

#[test]
fn every_small_branch_follows_interpreter() {
    assert_branches_follow_interpreter(&spec(1, 3, 4), (0..16).collect());
    assert_branches_follow_interpreter(&spec(2, 4, 12), (0..4096).collect());
    assert_branches_follow_interpreter(&spec(2, 3, 9), (0..4096).collect());
}

#[test]
fn sampled_three_state_branches_follow_interpreter() {
    let programs: Vec<u128> = (0..10_000u128).map(|j| (j * 0x9e37_79b9_7f4a_7c15) % (1 << 24)).collect();
    assert_branches_follow_interpreter(&spec(3, 4, 10), programs);
}

#[test]
fn adder_single_step() {
    let s = spec(4, 5, 20);
    let layout = build_layout(&s, 20, 0).unwrap();
    let tape: BitString = "11010".parse().unwrap();
    let table = adder(&s);
    let mut ens = BasisEnsemble::prepare_table(&s, &layout, &table, 0, tape).unwrap();
    let mut config = MachineConfig { state: 0, head: 0, tape, step: 0 };
    for _ in 0..20 {
        ens.tm_step().unwrap();
        ens.reset_step().unwrap();
        config = step(&config, &table, &s);
        let b = ens.branch(0);
        assert_eq!((b.state, b.head, b.tape), (config.state, config.head, config.tape));
    }
    assert_eq!(config.state, 3);
    assert_eq!(config.tape.to_string(), "11100");
    let report = ens.measure();
    assert_eq!(report.p_h, 1.0);
    assert_eq!(report.p_s[&config.tape], 1.0);
}

#[test]
fn halt_branch_only_moves_left() {
    // (2,2) program whose Q1 R0 row jumps to the halt state writing 1
    let s = spec(2, 4, 3);
    let layout = build_layout(&s, 3, 0).unwrap();
    let program = 0b010_u128 << 6; // row (Q1,R0): next 0, move right, write 0
    let mut ens = BasisEnsemble::prepare_programs(&s, &layout, [program]).unwrap();
    ens.tm_step().unwrap();
    ens.reset_step().unwrap();
    let after_first = ens.branch(0);
    assert_eq!((after_first.state, after_first.head), (0, 1));
    for expected_head in [0, 3] {
        ens.tm_step().unwrap();
        ens.reset_step().unwrap();
        let b = ens.branch(0);
        assert_eq!((b.state, b.head, b.tape), (0, expected_head, after_first.tape));
    }
}

#[test]
fn scratch_protocol_errors() {
    let s = spec(2, 4, 3);
    let layout = build_layout(&s, 2, 0).unwrap();
    let mut ens = BasisEnsemble::prepare_initial(&s, &layout).unwrap();
    ens.tm_step().unwrap();
    assert!(!ens.scratch_clean() || !ens.is_empty());
    assert_eq!(ens.tm_step(), Err(Error::DirtyScratch));
    ens.reset_step().unwrap();
    assert!(ens.scratch_clean());
    ens.tm_step().unwrap();
    ens.reset_step().unwrap();
    assert_eq!(ens.tm_step(), Err(Error::HistoryExhausted(1)));
    ens.restart_stage().unwrap();
    ens.tm_step().unwrap();
}

#[test]
fn reset_undoes_scratch_of_the_step() {
    let s = spec(2, 4, 4);
    let layout = build_layout(&s, 4, 0).unwrap();
    let mut ens = BasisEnsemble::prepare_initial(&s, &layout).unwrap();
    for _ in 0..4 {
        ens.tm_step().unwrap();
        ens.reset_step().unwrap();
        assert!(ens.scratch_clean());
    }
}

#[test]
fn single_state_report() {
    let report = run_staged(&spec(1, 5, 3), 3, Backend::Permutation, Staging::Carry).unwrap();
    let zero = BitString::zeros(5);
    assert_eq!(report.p_h, 1.0);
    assert_eq!(report.p_s[&zero], 1.0);
    assert_eq!(report.ctm_estimate(&zero), Some(0.0));
}

#[test]
fn halting_probability_matches_census() {
    let s = spec(2, 4, 50);
    let report = run_staged(&s, 50, Backend::Permutation, Staging::Carry).unwrap();
    let dist = enumerate_all(&s).unwrap();
    let exact = report.exact.as_ref().unwrap();
    assert_eq!(exact.p_h, Ratio::new(u128::from(dist.halting_total), 4096));
    for string in dist.output_counts.keys() {
        let classical = complexity::ctm(&dist, string).unwrap();
        assert!((report.ctm_estimate(string).unwrap() - classical).abs() < 1e-12);
        assert_eq!(
            report.d_estimate(string).unwrap(),
            Ratio::new(u128::from(dist.count(string)), u128::from(dist.halting_total))
        );
    }
    assert_eq!(exact.p_s.len(), dist.output_counts.len());
}

#[test]
fn staging_does_not_change_the_report() {
    let s = spec(2, 4, 6);
    let reference = run_staged(&s, 6, Backend::Permutation, Staging::Carry).unwrap();
    for z_ch in [1, 2, 3, 4, 5] {
        assert_eq!(run_staged(&s, z_ch, Backend::Permutation, Staging::Carry).unwrap(), reference, "z_ch = {z_ch}");
    }
    assert!(matches!(run_staged(&s, 7, Backend::Permutation, Staging::Carry), Err(Error::InvalidStaging(_))));
}

#[test]
fn sampled_staging_is_seeded_and_normalized() {
    let s = spec(2, 4, 6);
    let a = run_staged(&s, 2, Backend::Permutation, Staging::Sample { seed: 7 }).unwrap();
    let b = run_staged(&s, 2, Backend::Permutation, Staging::Sample { seed: 7 }).unwrap();
    assert_eq!(a, b);
    let total: f64 = a.p_s.values().sum();
    assert!((total - a.p_h).abs() < 1e-15);
    assert!(a.p_h <= 1.0);
}

#[test]
fn backends_agree_on_tiny_register() {
    let s = spec(2, 2, 2);
    assert_eq!(RegisterLayout::new(&s, 2, 0).unwrap().total, 21);
    assert!(compare_backends(&s, 2).unwrap() < 1e-10);
    assert!(compare_backends(&spec(1, 2, 1), 1).unwrap() <= f64::EPSILON);
}

#[test]
fn dense_backend_staged_and_norm() {
    let s = spec(2, 2, 4);
    let Terminal::Dense(sv) = simulate(&s, 2, Backend::dense(), Staging::Carry).unwrap() else { panic!() };
    assert!((sv.norm() - 1.0).abs() < 1e-10);
    assert_eq!(sv.support().count(), 4096);
    let dense = sv.measure();
    let exact = run_staged(&s, 2, Backend::Permutation, Staging::Carry).unwrap();
    assert!((dense.p_h - exact.p_h).abs() < 1e-10);
    for (string, p) in &exact.p_s {
        assert!((dense.p_s[string] - p).abs() < 1e-10);
    }
}

#[test]
fn dense_limit_and_mismatch() {
    let s = spec(2, 4, 3);
    let layout = build_layout(&s, 3, 0).unwrap();
    assert!(matches!(StateVector::prepare_initial(&s, &layout, 20), Err(Error::DenseLimit { .. })));
    let small = spec(2, 2, 2);
    let ens = BasisEnsemble::prepare_initial(&small, &build_layout(&small, 2, 0).unwrap()).unwrap();
    let sv = StateVector::prepare_initial(&small, &build_layout(&small, 1, 0).unwrap(), 26).unwrap();
    assert_eq!(compare_states(&ens, &sv), Err(Error::SpecMismatch));
}

#[test]
fn trace_has_a_line_per_phase() {
    let s = spec(2, 4, 5);
    let text = trace(&s, ProgramIndex(1234), 3).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# program=1234"));
    assert_eq!(lines.iter().filter(|l| l.contains("phase=step")).count(), 5);
    assert_eq!(lines.iter().filter(|l| l.contains("phase=restart")).count(), 1);
    let table = decode_program(ProgramIndex(1234), &s).unwrap();
    let mut config = MachineConfig::initial(&s);
    for _ in 0..5 {
        config = step(&config, &table, &s);
    }
    let last = lines.last().unwrap();
    assert!(last.contains(&format!("state={} head={} tape={}", config.state, config.head, config.tape)), "{last}");
}
