//! Acceptance checks. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use acssq::census::enumerate;
use acssq::store::table_bytes;
use acssq_core::complexity::{bdm, fit_histogram};
use acssq_core::machine::{decode_program, encode_program, run_table, Move, Rule, RunStatus, TransitionTable};
use acssq_core::qutm::{build_layout, compare_backends, run_staged, Backend, Staging};
use acssq_core::{
    count_programs, ctm, d_value, fit_decay, BdmOptions, BitString, CtmTable, FrequencyDistribution, MachineSpec,
    ProgramIndex,
};
use num_rational::Ratio;

// Tolerances and limits.
const COUNT_BUDGET: Duration = Duration::from_millis(1);
const ORACLE_CTM_TOL: f64 = 1e-12;
const ORACLE_BUDGET: Duration = Duration::from_secs(10);
const BACKEND_PROB_TOL: f64 = 1e-10;
const BACKEND_BUDGET: Duration = Duration::from_secs(60);
const BDM_SUM_TOL: f64 = 1e-12;
const CENSUS_BUDGET: Duration = Duration::from_secs(15 * 60);
const DECAY_REL_TOL: f64 = 0.05;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn census(m: u32, c: u32, z: u32) -> FrequencyDistribution {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    enumerate(&MachineSpec::binary(m, c, z).unwrap(), workers).unwrap()
}

fn criterion_1() -> Outcome {
    let expected = [
        "16",
        "4096",
        "16777216",
        "4294967296",
        "1125899906842624",
        "1152921504606846976",
        "1180591620717411303424",
        "1208925819614629174706176",
        "324518553658426726783156020576256",
    ];
    let specs: Vec<MachineSpec> = (1..=9).map(|m| MachineSpec::binary(m, 1, 1).unwrap()).collect();
    let start = Instant::now();
    let counts: Vec<String> = specs.iter().map(|s| count_programs(s).to_string()).collect();
    let elapsed = start.elapsed();
    for (m, (got, want)) in counts.iter().zip(expected).enumerate() {
        check(got == want, || format!("m={}: {got} != {want}", m + 1))?;
    }
    check(elapsed < COUNT_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("m=1..9 exact in {elapsed:?}"))
}

fn criterion_2() -> Outcome {
    // (Q0 R1 column, Q0 R0 column) for programs #0..#15.
    let listing = [
        ("Q0 Ml W0", "Q0 Ml W0"),
        ("Q0 Ml W0", "Q0 Ml W1"),
        ("Q0 Ml W0", "Q0 Mr W0"),
        ("Q0 Ml W0", "Q0 Mr W1"),
        ("Q0 Ml W1", "Q0 Ml W0"),
        ("Q0 Ml W1", "Q0 Ml W1"),
        ("Q0 Ml W1", "Q0 Mr W0"),
        ("Q0 Ml W1", "Q0 Mr W1"),
        ("Q0 Mr W0", "Q0 Ml W0"),
        ("Q0 Mr W0", "Q0 Ml W1"),
        ("Q0 Mr W0", "Q0 Mr W0"),
        ("Q0 Mr W0", "Q0 Mr W1"),
        ("Q0 Mr W1", "Q0 Ml W0"),
        ("Q0 Mr W1", "Q0 Ml W1"),
        ("Q0 Mr W1", "Q0 Mr W0"),
        ("Q0 Mr W1", "Q0 Mr W1"),
    ];
    let show = |r: &Rule| format!("Q{} M{} W{}", r.next_state, if r.moves == Move::Left { "l" } else { "r" }, r.write);
    let one = MachineSpec::binary(1, 4, 10).unwrap();
    for (i, (r1, r0)) in listing.iter().enumerate() {
        let t = decode_program(ProgramIndex(i as u128), &one).unwrap();
        let got = (show(t.stored(0, 1).unwrap()), show(t.stored(0, 0).unwrap()));
        check((got.0.as_str(), got.1.as_str()) == (*r1, *r0), || format!("#{i}: {got:?}"))?;
        check(encode_program(&t, &one).unwrap() == ProgramIndex(i as u128), || {
            format!("(1,2) #{i} does not re-encode")
        })?;
    }
    let two = MachineSpec::binary(2, 4, 10).unwrap();
    for i in 0..4096u128 {
        let t = decode_program(ProgramIndex(i), &two).unwrap();
        check(encode_program(&t, &two).unwrap() == ProgramIndex(i), || format!("(2,2) #{i} does not re-encode"))?;
    }
    Ok("16 single-state rows, 4096 two-state roundtrips".into())
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

fn criterion_3() -> Outcome {
    let c = 10;
    let spec = MachineSpec::binary(4, c, 64).unwrap();
    let table = adder(&spec);
    for l in 0..=4u32 {
        for m in 0..=4u32 {
            let mut tape = BitString::zeros(c);
            for i in 0..l {
                tape.set(i, 1);
            }
            for i in 0..m {
                tape.set(l + 1 + i, 1);
            }
            let out = run_table(&table, &spec, 0, tape).unwrap();
            check(matches!(out.status, RunStatus::HaltedAt(_)), || format!("l={l} m={m}: {:?}", out.status))?;
            check(out.final_state == 3, || format!("l={l} m={m}: final state {}", out.final_state))?;
            let mut want = BitString::zeros(c);
            for i in 0..l + m {
                want.set(i, 1);
            }
            check(out.final_tape == want, || format!("l={l} m={m}: {} != {want}", out.final_tape))?;
        }
    }
    Ok("1^l 0 1^m -> 1^(l+m) for l, m in 0..=4 on c=10".into())
}

fn criterion_4() -> Outcome {
    let spec = MachineSpec::binary(2, 4, 50).unwrap();
    let start = Instant::now();
    let dist = acssq_core::enumerate::enumerate_all(&spec).unwrap();
    let report = run_staged(&spec, 50, Backend::Permutation, Staging::Carry).unwrap();
    let elapsed = start.elapsed();
    let exact = report.exact.as_ref().ok_or("permutation backend gave no exact report")?;
    let want = Ratio::new(u128::from(dist.halting_total), dist.programs());
    check(exact.p_h == want, || format!("p_h {} != {want}", exact.p_h))?;
    let mut worst = 0f64;
    for s in dist.output_counts.keys() {
        let est = report.ctm_estimate(s).ok_or_else(|| format!("{s} missing from p_s"))?;
        let diff = (est - ctm(&dist, s).unwrap()).abs();
        worst = worst.max(diff);
        check(diff < ORACLE_CTM_TOL, || format!("{s}: |ctm diff| = {diff:e}"))?;
    }
    check(report.p_s.len() == dist.output_counts.len(), || "p_s support differs from census".into())?;
    check(elapsed < ORACLE_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("p_h = {} exact, max |ctm diff| = {worst:e}, {elapsed:.2?}", exact.p_h))
}

fn criterion_5() -> Outcome {
    let spec = MachineSpec::binary(2, 2, 2).unwrap();
    let qubits = build_layout(&spec, 2, 0).unwrap().total;
    check(qubits == 21, || format!("layout has {qubits} qubits"))?;
    let start = Instant::now();
    let dev = compare_backends(&spec, 2).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    check(dev < BACKEND_PROB_TOL, || format!("deviation {dev:e}"))?;
    check(elapsed < BACKEND_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("{qubits} qubits, max deviation {dev:e}, {elapsed:.2?}"))
}

fn criterion_6() -> Outcome {
    let spec = MachineSpec::binary(2, 4, 6).unwrap();
    let reports: Vec<_> = [1, 2, 3, 6]
        .iter()
        .map(|&k| (k, run_staged(&spec, k, Backend::Permutation, Staging::Carry).unwrap()))
        .collect();
    let (_, first) = &reports[0];
    check(first.exact.is_some(), || "no exact report".into())?;
    for (k, r) in &reports[1..] {
        check(r == first, || format!("z_ch={k} differs from z_ch=1"))?;
    }
    Ok("z_ch in {1, 2, 3, 6} identical".into())
}

fn criterion_7() -> Outcome {
    for z in [1u64, 10, 500] {
        for (m, c, base) in [(5, 12, 72), (5, 13, 73), (6, 12, 82)] {
            let got = acssq_core::qubit_count(m, 2, 1, c, z, 0);
            let want = base + (z - 1) * 4;
            check(got == want, || format!("m={m} c={c} z={z}: {got} != {want}"))?;
        }
    }
    Ok("72/73/82 + (z-1)*4 for z in {1, 10, 500}".into())
}

fn criterion_8a(censuses: &[(u32, FrequencyDistribution)]) -> Outcome {
    for (m, dist) in censuses {
        let sum =
            dist.output_counts.keys().map(|s| d_value(dist, s).unwrap()).fold(Ratio::from_integer(0u64), |a, b| a + b);
        check(sum == Ratio::from_integer(1), || format!("m={m}: sum = {sum}"))?;
    }
    Ok("sum of d = 1 for (2,2) and (3,2)".into())
}

fn criterion_8b(censuses: &[(u32, FrequencyDistribution)]) -> Outcome {
    for (m, dist) in censuses {
        for s in BitString::all(dist.spec.tape_len()) {
            let (a, b) = (dist.count(&s), dist.count(&s.complement()));
            check(a == b, || format!("m={m}: count({s}) = {a} but count({}) = {b}", s.complement()))?;
        }
    }
    Ok("d(s) = d(complement s) for (2,2) and (3,2)".into())
}

fn criterion_8c() -> Outcome {
    let mut detail = Vec::new();
    for m in [2, 3] {
        let mut prev = Ratio::from_integer(0u128);
        let mut line = Vec::new();
        for z in [5, 10, 20, 50] {
            let dist = census(m, 4, z);
            let frac = Ratio::new(u128::from(dist.halting_total), dist.programs());
            check(frac >= prev, || format!("m={m}: halting fraction fell to {frac} at z={z}"))?;
            line.push(frac.to_string());
            prev = frac;
        }
        detail.push(format!("m={m}: {}", line.join(" <= ")));
    }
    Ok(detail.join("; "))
}

fn criterion_9() -> Outcome {
    let table = CtmTable::from_distribution(&census(2, 4, 50)).unwrap();
    let opts = BdmOptions::partition(4);
    let strings: Vec<BitString> = table.entries.keys().copied().collect();
    let syms = |s: &BitString| s.symbols();
    for s in &strings {
        let r = bdm(&syms(s), &table, &opts).unwrap();
        check(r.total.to_bits() == table.ctm(s).unwrap().to_bits(), || format!("bdm({s}) != ctm({s})"))?;
    }
    let mut checked = 0;
    for a in &strings {
        for b in &strings {
            for c in &strings {
                let (ra, rb) =
                    (bdm(&syms(a), &table, &opts).unwrap(), bdm(&[syms(b), syms(c)].concat(), &table, &opts).unwrap());
                let joined = bdm(&[syms(a), syms(b), syms(c)].concat(), &table, &opts).unwrap();
                let terms: Vec<f64> = ra.blocks.iter().chain(&rb.blocks).map(|t| t.ctm).collect();
                let joined_terms: Vec<f64> = joined.blocks.iter().map(|t| t.ctm).collect();
                check(terms == joined_terms, || format!("{a}|{b}{c}: block terms differ"))?;
                let diff = (joined.total - (ra.total + rb.total)).abs();
                check(diff < BDM_SUM_TOL, || format!("{a}|{b}{c}: additivity off by {diff:e}"))?;
                let pair = bdm(&[syms(b), syms(c)].concat(), &table, &opts).unwrap();
                let single = |s: &BitString| bdm(&syms(s), &table, &opts).unwrap().total;
                check(pair.total.to_bits() == (single(b) + single(c)).to_bits(), || format!("{b}|{c} not additive"))?;
                checked += 1;
            }
        }
    }
    let multi = BdmOptions { multiplicity: true, ..opts };
    for s in &strings {
        for k in 1..=16usize {
            let input: Vec<u8> = std::iter::repeat_n(syms(s), k).flatten().collect();
            let got = bdm(&input, &table, &multi).unwrap().total;
            let want = table.ctm(s).unwrap() + (k as f64).log2();
            check(got.to_bits() == want.to_bits(), || format!("{s} x{k}: {got} != {want}"))?;
        }
    }
    Ok(format!("single-block, {checked} concatenations, k-copies k=1..16"))
}

fn criterion_10() -> Outcome {
    let spec = MachineSpec::binary(3, 4, 30).unwrap();
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut outputs = Vec::new();
    let mut timings = Vec::new();
    for workers in [1, 4, 8] {
        let start = Instant::now();
        let dist = enumerate(&spec, workers).unwrap();
        let bytes = table_bytes(&CtmTable::from_distribution(&dist).unwrap());
        let elapsed = start.elapsed();
        check(dist.programs() == 16_777_216 && dist.covers_all(), || "census incomplete".into())?;
        outputs.push(bytes);
        timings.push((workers, elapsed));
    }
    check(outputs.iter().all(|b| *b == outputs[0]), || "table files differ across worker counts".into())?;
    let (_, eight) = timings[2];
    check(eight < CENSUS_BUDGET, || format!("8 workers took {eight:?}"))?;
    let t: Vec<String> = timings.iter().map(|(w, d)| format!("{w}w {d:.1?}")).collect();
    Ok(format!("byte-identical; {} (hardware threads: {threads})", t.join(", ")))
}

fn criterion_11() -> Outcome {
    let lambda = 0.3;
    let synthetic: BTreeMap<u32, u64> =
        (1..=40u32).map(|k| (k, (1e9 * (-lambda * f64::from(k)).exp()).round() as u64)).collect();
    let fit = fit_histogram(&synthetic).map_err(|e| e.to_string())?;
    let rel = (fit.lambda - lambda).abs() / lambda;
    check(rel < DECAY_REL_TOL, || format!("synthetic lambda {} (rel err {rel:e})", fit.lambda))?;

    let fit = fit_decay(&census(2, 4, 50)).map_err(|e| e.to_string())?;
    let mut prev = f64::INFINITY;
    for z in 0..=500 {
        let p = fit.tail_probability(z);
        check(p.is_finite() && p <= prev, || format!("tail({z}) = {p} after {prev}"))?;
        prev = p;
    }
    Ok(format!(
        "synthetic rel err {rel:.2e}; (2,2) lambda = {:.4}, tail(50) = {:.3e}",
        fit.lambda,
        fit.tail_probability(50)
    ))
}

fn run(name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        Err(e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default())
    });
    match outcome {
        Ok(detail) => {
            println!("criterion {name:<3} PASS  {detail}");
            true
        }
        Err(detail) => {
            println!("criterion {name:<3} FAIL  {detail}");
            false
        }
    }
}

fn main() -> ExitCode {
    let censuses: Vec<(u32, FrequencyDistribution)> = vec![(2, census(2, 4, 50)), (3, census(3, 4, 30))];
    let results = [
        run("1", criterion_1),
        run("2", criterion_2),
        run("3", criterion_3),
        run("4", criterion_4),
        run("5", criterion_5),
        run("6", criterion_6),
        run("7", criterion_7),
        run("8a", || criterion_8a(&censuses)),
        run("8b", || criterion_8b(&censuses)),
        run("8c", criterion_8c),
        run("9", criterion_9),
        run("10", criterion_10),
        run("11", criterion_11),
    ];
    let failed = results.iter().filter(|&&ok| !ok).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
