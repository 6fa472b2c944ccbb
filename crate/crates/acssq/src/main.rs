use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;

use acssq::census::{enumerate, enumerate_resumable, DEFAULT_SHARD};
use acssq::growth::write_csv;
use acssq::store::{load_table, save_table, write_json_lines};
use acssq_core::bits::parse_symbols;
use acssq_core::complexity::{bits_of, fit_decay};
use acssq_core::qutm::{build_layout, compare_states, run_staged, simulate, trace, Backend, Staging, Terminal};
use acssq_core::{
    bdm, count_programs, growth_table, BdmOptions, BitString, BlockMode, CtmTable, MachineSpec, MissingPolicy,
    ProgramIndex, ResourceEstimate,
};
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "acssq", version, about = "Algorithmic complexity of short strings by Turing machine census")]
struct Cli {
    /// Bare tab-separated output without headings.
    #[arg(long, global = true)]
    plain: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone, Copy)]
struct ClassArgs {
    /// Number of states, halt state included.
    #[arg(short = 'm', long, default_value_t = 5)]
    states: u32,
    /// Tape length (cells, cyclic).
    #[arg(short = 'c', long, default_value_t = 12)]
    tape_len: u32,
    /// Step limit.
    #[arg(short = 'z', long, default_value_t = 500)]
    steps: u32,
}

impl ClassArgs {
    fn spec(&self) -> Result<MachineSpec> {
        Ok(MachineSpec::binary(self.states, self.tape_len, self.steps)?)
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Number of programs in a machine class.
    Count {
        #[arg(short = 'm', long, default_value_t = 5)]
        states: u32,
        #[arg(short = 'n', long, default_value_t = 2)]
        symbols: u32,
        #[arg(short = 'd', long, default_value_t = 1)]
        dims: u32,
    },
    /// Run every program and write the resulting complexity table.
    Enumerate {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(short, long, env = "ACSSQ_WORKERS", default_value_t = default_workers())]
        workers: usize,
        /// Table file to write.
        #[arg(short, long)]
        output: PathBuf,
        /// Append finished shards here and resume from it if present.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SHARD as u64)]
        shard_size: u64,
        /// Also write a JSON-lines export.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Look up complexities in a table.
    Ctm {
        #[arg(short, long)]
        table: PathBuf,
        strings: Vec<String>,
    },
    /// Block decomposition estimate of a longer string.
    Bdm {
        #[arg(short, long)]
        table: PathBuf,
        /// Input string of 0/1; read from stdin when omitted.
        input: Option<String>,
        #[arg(long, value_enum, default_value_t = Mode::Partition)]
        mode: Mode,
        /// Offset between sliding windows.
        #[arg(long, default_value_t = 1)]
        stride: usize,
        /// Count repeated blocks once plus log2 of their multiplicity.
        #[arg(long)]
        multiplicity: bool,
        /// Skip blocks missing from the table instead of failing.
        #[arg(long)]
        lenient: bool,
        /// Print every block term.
        #[arg(long)]
        verbose: bool,
    },
    /// Simulate the reversible superposition of all programs.
    Qsim {
        #[command(flatten)]
        class: ClassArgs,
        /// Steps per stage; history registers hold one stage.
        #[arg(long)]
        stage: Option<u32>,
        #[arg(long, value_enum, default_value_t = BackendArg::Permutation)]
        backend: BackendArg,
        #[arg(long, default_value_t = acssq_core::qutm::dense::DEFAULT_DENSE_LIMIT)]
        max_qubits: usize,
        /// Collapse between stages with this seed instead of carrying the state.
        #[arg(long)]
        sample_seed: Option<u64>,
        /// Cross-check against the classical census.
        #[arg(long)]
        verify: bool,
        #[arg(short, long, env = "ACSSQ_WORKERS", default_value_t = default_workers())]
        workers: usize,
        /// Dump the register trace of one program instead.
        #[arg(long)]
        trace: Option<u128>,
    },
    /// Qubit requirements.
    Resources {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(short = 'n', long, default_value_t = 2)]
        symbols: u32,
        #[arg(short = 'd', long, default_value_t = 1)]
        dims: u32,
        #[arg(long, default_value_t = 0)]
        ancilla: u64,
        /// Write a growth table over states 1..=M and tape lengths 1..=C as CSV.
        #[arg(long, num_args = 2, value_names = ["M", "C"])]
        growth: Option<Vec<u32>>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Partition,
    Sliding,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BackendArg {
    Permutation,
    Statevector,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn describe(spec: &MachineSpec) -> String {
    format!("m={} n={} d={} c={} z={}", spec.states(), spec.symbols(), spec.dims(), spec.tape_len(), spec.steps())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let out = io::stdout();
    let mut out = BufWriter::new(out.lock());
    let plain = cli.plain;
    match cli.cmd {
        Cmd::Count { states, symbols, dims } => {
            let spec = MachineSpec::new(states, symbols, dims, 1, 1)?;
            let p = count_programs(&spec);
            if plain {
                writeln!(out, "{p}")?;
            } else {
                writeln!(out, "programs for m={states} n={symbols} d={dims}: {p} (2^{})", spec.program_bits())?;
            }
        }
        Cmd::Enumerate { class, workers, output, checkpoint, shard_size, json } => {
            let spec = class.spec()?;
            eprintln!(
                "config: {} workers={workers} shard_size={shard_size} checkpoint={}",
                describe(&spec),
                checkpoint.as_ref().map_or("none".into(), |p| p.display().to_string())
            );
            let dist = match &checkpoint {
                Some(path) => enumerate_resumable(&spec, workers, path, u128::from(shard_size.max(1)))?,
                None => enumerate(&spec, workers)?,
            };
            let table = CtmTable::from_distribution(&dist)?;
            save_table(&table, &output).with_context(|| format!("writing {}", output.display()))?;
            if let Some(path) = json {
                write_json_lines(&table, BufWriter::new(File::create(&path)?))?;
            }
            if plain {
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}",
                    dist.programs(),
                    dist.halting_total,
                    dist.nonhalting_total,
                    dist.frozen_total,
                    table.entries.len()
                )?;
            } else {
                writeln!(out, "programs   {}", dist.programs())?;
                writeln!(out, "halting    {}", dist.halting_total)?;
                writeln!(out, "nonhalting {}", dist.nonhalting_total)?;
                writeln!(out, "frozen     {}", dist.frozen_total)?;
                writeln!(
                    out,
                    "strings    {} ({:.1}% of 2^{})",
                    table.entries.len(),
                    100.0 * table.coverage(),
                    spec.tape_len()
                )?;
                if let Ok(fit) = fit_decay(&dist) {
                    writeln!(
                        out,
                        "halting-time decay: lambda={:.4}, tail beyond z ~ {:.3e}",
                        fit.lambda,
                        fit.tail_probability(spec.steps())
                    )?;
                }
                writeln!(out, "wrote {}", output.display())?;
            }
        }
        Cmd::Ctm { table, strings } => {
            let table = load_table(&table).with_context(|| format!("reading {}", table.display()))?;
            eprintln!("config: {}", describe(&table.spec));
            let strings: Vec<BitString> = if strings.is_empty() {
                table.entries.keys().copied().collect()
            } else {
                strings.iter().map(|s| s.parse()).collect::<Result<_, _>>()?
            };
            if !plain {
                writeln!(out, "string\tcount\td\tctm")?;
            }
            for s in strings {
                match table.get(&s) {
                    Some(e) => writeln!(out, "{s}\t{}\t{}\t{:.6}", e.count, e.d_value, e.ctm)?,
                    None if s.len() != table.block_len() => {
                        bail!("{s} has length {}, table has {}", s.len(), table.block_len())
                    }
                    None => writeln!(out, "{s}\t0\t0\tinf")?,
                }
            }
        }
        Cmd::Bdm { table, input, mode, stride, multiplicity, lenient, verbose } => {
            let table = load_table(&table).with_context(|| format!("reading {}", table.display()))?;
            let text = match input {
                Some(s) => s,
                None => {
                    let mut s = String::new();
                    io::stdin().read_to_string(&mut s)?;
                    s
                }
            };
            let symbols = parse_symbols(text.trim())?;
            let opts = BdmOptions {
                block: table.block_len(),
                mode: match mode {
                    Mode::Partition => BlockMode::Partition,
                    Mode::Sliding => BlockMode::Sliding { stride },
                },
                multiplicity,
                missing: if lenient { MissingPolicy::Lenient } else { MissingPolicy::Strict },
            };
            eprintln!("config: {} len={} {:?}", describe(&table.spec), symbols.len(), opts);
            let report = bdm(&symbols, &table, &opts)?;
            if plain {
                writeln!(out, "{}", report.total)?;
            } else {
                if verbose {
                    for t in &report.blocks {
                        writeln!(out, "{:>6}  {}  {:.6}", t.offset, t.block, t.ctm)?;
                    }
                }
                writeln!(out, "bdm        {:.6}", report.total)?;
                writeln!(out, "blocks     {} ({} distinct)", report.blocks.len(), report.distinct.len())?;
                writeln!(out, "remainder  {}", report.remainder)?;
                if !report.skipped.is_empty() {
                    writeln!(out, "skipped    {}", report.skipped.len())?;
                }
            }
        }
        Cmd::Qsim { class, stage, backend, max_qubits, sample_seed, verify, workers, trace: program } => {
            let spec = class.spec()?;
            let stage = stage.unwrap_or(spec.steps());
            let layout = build_layout(&spec, stage, 0)?;
            let backend = match backend {
                BackendArg::Permutation => Backend::Permutation,
                BackendArg::Statevector => Backend::StateVector { max_qubits },
            };
            let staging = sample_seed.map_or(Staging::Carry, |seed| Staging::Sample { seed });
            eprintln!("config: {} stage={stage} qubits={} {backend:?} {staging:?}", describe(&spec), layout.total);
            if let Some(p) = program {
                write!(out, "{}", trace(&spec, ProgramIndex(p), stage)?)?;
                return Ok(());
            }
            let report = run_staged(&spec, stage, backend, staging)?;
            if !plain {
                writeln!(out, "p_h = {:.12}", report.p_h)?;
                writeln!(out, "string\tp_s\tctm")?;
            }
            for (s, p) in &report.p_s {
                let c = report.ctm_estimate(s).unwrap_or_else(|| -(p / report.p_h).log2());
                writeln!(out, "{s}\t{p:.12}\t{c:.6}")?;
            }
            if verify {
                let dist = enumerate(&spec, workers)?;
                let table = CtmTable::from_distribution(&dist)?;
                let mut worst = 0f64;
                for (s, e) in &table.entries {
                    let est = report.ctm_estimate(s).unwrap_or(f64::INFINITY);
                    worst = worst.max((est - bits_of(e.d_value)).abs());
                }
                let p_h = dist.halting_total as f64 / dist.programs() as f64;
                writeln!(
                    out,
                    "verify: |p_h - census| = {:.3e}, max |ctm - census| = {worst:.3e}",
                    (report.p_h - p_h).abs()
                )?;
                if let Backend::StateVector { max_qubits } = backend {
                    let Terminal::Ensemble(ens) = simulate(&spec, stage, Backend::Permutation, Staging::Carry)? else {
                        unreachable!()
                    };
                    let Terminal::Dense(sv) =
                        simulate(&spec, stage, Backend::StateVector { max_qubits }, Staging::Carry)?
                    else {
                        unreachable!()
                    };
                    writeln!(out, "verify: backend amplitude deviation = {:.3e}", compare_states(&ens, &sv)?)?;
                }
            }
        }
        Cmd::Resources { class, symbols, dims, ancilla, growth, csv } => {
            let est = ResourceEstimate::new(class.states, symbols, dims, class.tape_len, ancilla);
            let z = u64::from(class.steps);
            eprintln!("config: m={} n={symbols} d={dims} c={} z={z} ancilla={ancilla}", class.states, class.tape_len);
            if let Some(g) = growth {
                let rows = growth_table(1..=g[0], 1..=g[1], z, ancilla);
                match csv {
                    Some(path) => write_csv(&rows, BufWriter::new(File::create(&path)?))?,
                    None => write_csv(&rows, &mut out)?,
                }
            } else if plain {
                writeln!(out, "{}", est.total(z))?;
            } else {
                writeln!(out, "program      {}", est.program)?;
                writeln!(out, "state        {}", est.state)?;
                writeln!(out, "move         {}", est.moves)?;
                writeln!(out, "head         {}", est.head)?;
                writeln!(out, "read         {}", est.read)?;
                writeln!(out, "write        {}", est.write)?;
                writeln!(out, "tape         {}", est.tape)?;
                writeln!(out, "history/step {}", est.history_slot)?;
                writeln!(out, "ancilla      {}", est.ancilla)?;
                writeln!(
                    out,
                    "total        {} = {} + {} * {}",
                    est.total(z),
                    est.base(),
                    est.slope(),
                    z.saturating_sub(1)
                )?;
            }
        }
    }
    out.flush()?;
    Ok(())
}
