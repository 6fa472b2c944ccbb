//! Canonical text formats: CTM tables, JSON-lines export and census
//! checkpoints.
//!
//! A table file is a header of `key value` lines, a column line, then one row
//! per string in ascending order:
//!
//! ```text
//! acssq-table 1
//! layout 1
//! spec m=2 n=2 d=1 c=4 z=50
//! generator acssq 0.1.0
//! programs 4096
//! halting 2560
//! nonhalting 1536
//! frozen 0
//! rows 4
//! sha256 <hex digest of every line after this one>
//! string count d_num d_den ctm
//! 0000 1024 2 5 1.32192809489
//! ```
//!
//! Nothing in the file depends on time or on how the census was scheduled, so
//! equal tables serialize to equal bytes.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;
use std::sync::Mutex;

use acssq_core::complexity::{bits_of, CtmEntry};
use acssq_core::{BitString, CtmTable, FrequencyDistribution, MachineSpec};
use num_rational::Ratio;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const TABLE_VERSION: u32 = 1;
pub const CHECKPOINT_VERSION: u32 = 1;
/// Version of the description-number layout a table was produced with.
pub const ENCODING_LAYOUT: u32 = 1;
const GENERATOR: &str = concat!("acssq ", env!("CARGO_PKG_VERSION"));
const COLUMNS: &str = "string count d_num d_den ctm";

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Core(#[from] acssq_core::Error),
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("unsupported {what} version {found}")]
    Version { what: &'static str, found: u32 },
    #[error("checksum mismatch: header {expected}, body {actual}")]
    Checksum { expected: String, actual: String },
    #[error("table does not reconcile: {0}")]
    Reconcile(String),
    #[error("checkpoint was written for a different machine class ({found}, expected {expected})")]
    SpecHash { expected: String, found: String },
}

fn fmt_err(line: usize, msg: impl Into<String>) -> StoreError {
    StoreError::Format { line, msg: msg.into() }
}

/// `x` with exactly `digits` significant digits, fixed notation.
pub fn render_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", digits - 1, x.abs());
    let (mant, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("exponent");
    let ds: String = mant.chars().filter(char::is_ascii_digit).collect();
    let sign = if x < 0.0 { "-" } else { "" };
    if exp < 0 {
        return format!("{sign}0.{}{ds}", "0".repeat((-exp - 1) as usize));
    }
    let int_len = exp as usize + 1;
    if int_len >= ds.len() {
        format!("{sign}{ds}{}", "0".repeat(int_len - ds.len()))
    } else {
        format!("{sign}{}.{}", &ds[..int_len], &ds[int_len..])
    }
}

fn spec_line(spec: &MachineSpec) -> String {
    format!("m={} n={} d={} c={} z={}", spec.states(), spec.symbols(), spec.dims(), spec.tape_len(), spec.steps())
}

fn parse_spec(s: &str, line: usize) -> Result<MachineSpec, StoreError> {
    let mut vals = [0u32; 5];
    let keys = ["m", "n", "d", "c", "z"];
    let parts: Vec<&str> = s.split(' ').collect();
    if parts.len() != 5 {
        return Err(fmt_err(line, "spec needs m, n, d, c, z"));
    }
    for ((part, key), slot) in parts.iter().zip(keys).zip(&mut vals) {
        let v = part
            .strip_prefix(key)
            .and_then(|r| r.strip_prefix('='))
            .ok_or_else(|| fmt_err(line, format!("expected {key}=")))?;
        *slot = v.parse().map_err(|_| fmt_err(line, format!("bad value for {key}")))?;
    }
    Ok(MachineSpec::new(vals[0], vals[1], vals[2], vals[3], vals[4])?)
}

/// Short digest identifying a machine class and encoding layout.
pub fn spec_hash(spec: &MachineSpec) -> String {
    let digest = Sha256::digest(format!("acssq layout={ENCODING_LAYOUT} {}", spec_line(spec)).as_bytes());
    hex::encode(&digest[..8])
}

fn table_body(table: &CtmTable) -> String {
    let mut body = String::new();
    body.push_str(COLUMNS);
    body.push('\n');
    for (s, e) in &table.entries {
        body.push_str(&format!(
            "{s} {} {} {} {}\n",
            e.count,
            e.d_value.numer(),
            e.d_value.denom(),
            render_sig(e.ctm, 12)
        ));
    }
    body
}

/// Serialized form of `table`.
pub fn table_bytes(table: &CtmTable) -> Vec<u8> {
    let body = table_body(table);
    let mut out = String::new();
    out.push_str(&format!("acssq-table {TABLE_VERSION}\n"));
    out.push_str(&format!("layout {ENCODING_LAYOUT}\n"));
    out.push_str(&format!("spec {}\n", spec_line(&table.spec)));
    out.push_str(&format!("generator {GENERATOR}\n"));
    out.push_str(&format!("programs {}\n", table.programs));
    out.push_str(&format!("halting {}\n", table.halting_total));
    out.push_str(&format!("nonhalting {}\n", table.nonhalting_total));
    out.push_str(&format!("frozen {}\n", table.frozen_total));
    out.push_str(&format!("rows {}\n", table.entries.len()));
    out.push_str(&format!("sha256 {}\n", hex::encode(Sha256::digest(body.as_bytes()))));
    out.push_str(&body);
    out.into_bytes()
}

pub fn save_table(table: &CtmTable, path: &Path) -> Result<(), StoreError> {
    fs::write(path, table_bytes(table))?;
    Ok(())
}

fn header<'a>(lines: &[&'a str], idx: usize, key: &str) -> Result<&'a str, StoreError> {
    lines
        .get(idx)
        .and_then(|l| l.strip_prefix(key))
        .and_then(|r| r.strip_prefix(' '))
        .ok_or_else(|| fmt_err(idx + 1, format!("expected `{key}`")))
}

fn number<T: std::str::FromStr>(s: &str, line: usize, what: &str) -> Result<T, StoreError> {
    s.parse().map_err(|_| fmt_err(line, format!("bad {what}: {s:?}")))
}

/// Parses and validates a table file: checksum, row order, totals and every
/// d-value against its count. Complexities are recomputed from the exact
/// d-values rather than taken from the text.
pub fn parse_table(text: &str) -> Result<CtmTable, StoreError> {
    let lines: Vec<&str> = text.lines().collect();
    let version: u32 = number(header(&lines, 0, "acssq-table")?, 1, "version")?;
    if version != TABLE_VERSION {
        return Err(StoreError::Version { what: "table", found: version });
    }
    let layout: u32 = number(header(&lines, 1, "layout")?, 2, "layout")?;
    if layout != ENCODING_LAYOUT {
        return Err(StoreError::Version { what: "encoding layout", found: layout });
    }
    let spec = parse_spec(header(&lines, 2, "spec")?, 3)?;
    header(&lines, 3, "generator")?;
    let programs: u128 = number(header(&lines, 4, "programs")?, 5, "programs")?;
    let halting: u64 = number(header(&lines, 5, "halting")?, 6, "halting")?;
    let nonhalting: u64 = number(header(&lines, 6, "nonhalting")?, 7, "nonhalting")?;
    let frozen: u64 = number(header(&lines, 7, "frozen")?, 8, "frozen")?;
    let rows: usize = number(header(&lines, 8, "rows")?, 9, "rows")?;
    let expected = header(&lines, 9, "sha256")?.to_string();

    let body_start = text.match_indices('\n').nth(9).map(|(i, _)| i + 1).ok_or_else(|| fmt_err(10, "truncated"))?;
    let actual = hex::encode(Sha256::digest(&text.as_bytes()[body_start..]));
    if actual != expected {
        return Err(StoreError::Checksum { expected, actual });
    }
    if lines.get(10) != Some(&COLUMNS) {
        return Err(fmt_err(11, "missing column line"));
    }
    if lines.len() != 11 + rows {
        return Err(fmt_err(lines.len(), format!("expected {rows} rows, found {}", lines.len().saturating_sub(11))));
    }
    if halting == 0 {
        return Err(StoreError::Reconcile("no halting programs".into()));
    }

    let mut entries = BTreeMap::new();
    let mut sum = 0u64;
    let mut prev: Option<BitString> = None;
    for (i, line) in lines[11..].iter().enumerate() {
        let ln = 12 + i;
        let f: Vec<&str> = line.split(' ').collect();
        if f.len() != 5 {
            return Err(fmt_err(ln, "row needs 5 fields"));
        }
        let s: BitString = f[0].parse().map_err(|e| fmt_err(ln, format!("{e}")))?;
        if s.len() != spec.tape_len() {
            return Err(fmt_err(ln, "string length differs from tape length"));
        }
        if prev.is_some_and(|p| p >= s) {
            return Err(fmt_err(ln, "rows not in ascending order"));
        }
        prev = Some(s);
        let count: u64 = number(f[1], ln, "count")?;
        let num: u64 = number(f[2], ln, "d_num")?;
        let den: u64 = number(f[3], ln, "d_den")?;
        if count == 0 || den == 0 {
            return Err(fmt_err(ln, "zero count or denominator"));
        }
        let d_value = Ratio::new(count, halting);
        if (*d_value.numer(), *d_value.denom()) != (num, den) {
            return Err(StoreError::Reconcile(format!("{s}: d-value {num}/{den} does not equal {count}/{halting}")));
        }
        let ctm = bits_of(d_value);
        if f[4] != render_sig(ctm, 12) {
            return Err(StoreError::Reconcile(format!("{s}: complexity {} does not match d-value", f[4])));
        }
        sum = sum.checked_add(count).ok_or_else(|| StoreError::Reconcile("count overflow".into()))?;
        entries.insert(s, CtmEntry { count, d_value, ctm });
    }
    if sum != halting {
        return Err(StoreError::Reconcile(format!("row counts sum to {sum}, header says {halting}")));
    }
    if u128::from(halting) + u128::from(nonhalting) + u128::from(frozen) != programs {
        return Err(StoreError::Reconcile("halting + nonhalting + frozen != programs".into()));
    }
    Ok(CtmTable { spec, programs, halting_total: halting, nonhalting_total: nonhalting, frozen_total: frozen, entries })
}

pub fn load_table(path: &Path) -> Result<CtmTable, StoreError> {
    parse_table(&fs::read_to_string(path)?)
}

#[derive(Serialize)]
struct JsonHeader<'a> {
    kind: &'static str,
    version: u32,
    layout: u32,
    m: u32,
    n: u32,
    d: u32,
    c: u32,
    z: u32,
    generator: &'a str,
    programs: String,
    halting: u64,
    nonhalting: u64,
    frozen: u64,
    rows: usize,
}

#[derive(Serialize)]
struct JsonRow {
    kind: &'static str,
    string: String,
    count: u64,
    d_num: u64,
    d_den: u64,
    ctm: f64,
}

/// JSON-lines export: one header object, then one object per row.
pub fn write_json_lines<W: Write>(table: &CtmTable, mut out: W) -> Result<(), StoreError> {
    let spec = &table.spec;
    let head = JsonHeader {
        kind: "header",
        version: TABLE_VERSION,
        layout: ENCODING_LAYOUT,
        m: spec.states(),
        n: spec.symbols(),
        d: spec.dims(),
        c: spec.tape_len(),
        z: spec.steps(),
        generator: GENERATOR,
        programs: table.programs.to_string(),
        halting: table.halting_total,
        nonhalting: table.nonhalting_total,
        frozen: table.frozen_total,
        rows: table.entries.len(),
    };
    serde_json::to_writer(&mut out, &head).map_err(io::Error::from)?;
    out.write_all(b"\n")?;
    for (s, e) in &table.entries {
        let row = JsonRow {
            kind: "row",
            string: s.to_string(),
            count: e.count,
            d_num: *e.d_value.numer(),
            d_den: *e.d_value.denom(),
            ctm: e.ctm,
        };
        serde_json::to_writer(&mut out, &row).map_err(io::Error::from)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

fn shard_line(shard: &FrequencyDistribution) -> String {
    let ranges: Vec<String> = shard.ranges.iter().map(|(lo, hi)| format!("{lo}..{hi}")).collect();
    let steps: Vec<String> = shard.halted_by_step.iter().map(|(k, n)| format!("{k}:{n}")).collect();
    let outputs: Vec<String> = shard.output_counts.iter().map(|(s, n)| format!("{s}:{n}")).collect();
    let or_dash = |v: Vec<String>| if v.is_empty() { "-".to_string() } else { v.join(",") };
    format!(
        "shard {} {} {} {} {} {}",
        or_dash(ranges),
        shard.halting_total,
        shard.nonhalting_total,
        shard.frozen_total,
        or_dash(steps),
        or_dash(outputs)
    )
}

fn pairs<K: std::str::FromStr, V: std::str::FromStr>(s: &str, sep: &str, ln: usize) -> Result<Vec<(K, V)>, StoreError> {
    if s == "-" {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|item| {
            let (a, b) = item.split_once(sep).ok_or_else(|| fmt_err(ln, format!("bad item {item:?}")))?;
            Ok((number(a, ln, "key")?, number(b, ln, "value")?))
        })
        .collect()
}

fn parse_shard(spec: &MachineSpec, line: &str, ln: usize) -> Result<FrequencyDistribution, StoreError> {
    let f: Vec<&str> = line.split(' ').collect();
    if f.len() != 7 || f[0] != "shard" {
        return Err(fmt_err(ln, "expected a shard record"));
    }
    let mut shard = FrequencyDistribution::empty(*spec);
    shard.ranges = pairs(f[1], "..", ln)?;
    shard.halting_total = number(f[2], ln, "halting")?;
    shard.nonhalting_total = number(f[3], ln, "nonhalting")?;
    shard.frozen_total = number(f[4], ln, "frozen")?;
    shard.halted_by_step = pairs(f[5], ":", ln)?.into_iter().collect();
    let outputs: Vec<(String, u64)> = pairs(f[6], ":", ln)?;
    for (s, n) in outputs {
        let s: BitString = s.parse().map_err(|e| fmt_err(ln, format!("{e}")))?;
        shard.output_counts.insert(s, n);
    }
    if !shard.is_consistent() || shard.ranges.iter().any(|(lo, hi)| lo >= hi) {
        return Err(fmt_err(ln, "shard totals do not reconcile"));
    }
    Ok(shard)
}

/// Reads every shard from a checkpoint. Fails if the checkpoint belongs to a
/// different machine class or if two shards overlap.
pub fn load_checkpoint(path: &Path, spec: &MachineSpec) -> Result<Vec<FrequencyDistribution>, StoreError> {
    let reader = BufReader::new(File::open(path)?);
    let mut shards = Vec::new();
    let mut covered: Vec<(u128, u128)> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let ln = i + 1;
        match ln {
            1 => {
                let v: u32 = number(
                    line.strip_prefix("acssq-checkpoint ").ok_or_else(|| fmt_err(1, "not a checkpoint"))?,
                    1,
                    "version",
                )?;
                if v != CHECKPOINT_VERSION {
                    return Err(StoreError::Version { what: "checkpoint", found: v });
                }
            }
            2 => {
                let found = line.strip_prefix("spec_hash ").ok_or_else(|| fmt_err(2, "missing spec_hash"))?;
                let expected = spec_hash(spec);
                if found != expected {
                    return Err(StoreError::SpecHash { expected, found: found.to_string() });
                }
            }
            3 => {
                let s = line.strip_prefix("spec ").ok_or_else(|| fmt_err(3, "missing spec"))?;
                if parse_spec(s, 3)? != *spec {
                    return Err(fmt_err(3, "spec line does not match spec_hash"));
                }
            }
            _ if line.is_empty() => {}
            _ => {
                let shard = parse_shard(spec, &line, ln)?;
                covered = acssq_core::enumerate::union_ranges(&covered, &shard.ranges)?;
                shards.push(shard);
            }
        }
    }
    Ok(shards)
}

/// Append-only checkpoint file, safe to share between worker threads.
pub struct CheckpointWriter {
    file: Mutex<File>,
}

impl CheckpointWriter {
    /// Opens `path` for appending, writing the header if the file is new or
    /// empty.
    pub fn open(path: &Path, spec: &MachineSpec) -> Result<Self, StoreError> {
        let mut file = OpenOptions::new().create(true).append(true).open(path)?;
        if file.metadata()?.len() == 0 {
            writeln!(file, "acssq-checkpoint {CHECKPOINT_VERSION}")?;
            writeln!(file, "spec_hash {}", spec_hash(spec))?;
            writeln!(file, "spec {}", spec_line(spec))?;
            file.sync_data()?;
        }
        Ok(Self { file: Mutex::new(file) })
    }

    pub fn append(&self, shard: &FrequencyDistribution) -> Result<(), StoreError> {
        let line = shard_line(shard) + "\n";
        let mut file = self.file.lock().expect("checkpoint lock");
        file.write_all(line.as_bytes())?;
        file.sync_data()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(render_sig(1.0, 12), "1.00000000000");
        assert_eq!(render_sig(1.3219280948873623, 12), "1.32192809489");
        assert_eq!(render_sig(12.5, 4), "12.50");
        assert_eq!(render_sig(123456.0, 3), "123000");
        assert_eq!(render_sig(0.00123, 3), "0.00123");
        assert_eq!(render_sig(0.0, 12), "0");
    }

    #[test]
    fn shard_line_roundtrip() {
        let spec = MachineSpec::binary(2, 4, 50).unwrap();
        let shard = acssq_core::enumerate_range(&spec, 100, 900).unwrap();
        let back = parse_shard(&spec, &shard_line(&shard), 4).unwrap();
        assert_eq!(back, shard);
    }
}
