//! Multi-threaded census over fixed-size index shards.

use std::path::Path;

use acssq_core::enumerate::{missing_ranges, union_ranges};
use acssq_core::machine::program_count_u128;
use acssq_core::{enumerate_range, merge, FrequencyDistribution, MachineSpec};
use rayon::prelude::*;

use crate::store::{load_checkpoint, CheckpointWriter, StoreError};

/// Programs per shard. Fixed so that checkpoints do not depend on the worker
/// count.
pub const DEFAULT_SHARD: u128 = 1 << 16;

fn shards(lo: u128, hi: u128, size: u128) -> Vec<(u128, u128)> {
    let mut out = Vec::new();
    let mut cursor = lo;
    while cursor < hi {
        let end = hi.min(cursor + size);
        out.push((cursor, end));
        cursor = end;
    }
    out
}

fn pool(workers: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build().expect("thread pool")
}

/// Census of every program of `spec` on `workers` threads. The result does
/// not depend on `workers`.
pub fn enumerate(spec: &MachineSpec, workers: usize) -> acssq_core::Result<FrequencyDistribution> {
    let count = program_count_u128(spec)?;
    enumerate_ranges(spec, &[(0, count)], workers, DEFAULT_SHARD, |_| Ok(())).map_err(|e| match e {
        StoreError::Core(e) => e,
        other => unreachable!("{other}"),
    })
}

fn enumerate_ranges(
    spec: &MachineSpec,
    ranges: &[(u128, u128)],
    workers: usize,
    shard_size: u128,
    on_shard: impl Fn(&FrequencyDistribution) -> Result<(), StoreError> + Sync,
) -> Result<FrequencyDistribution, StoreError> {
    let plan: Vec<(u128, u128)> = ranges.iter().flat_map(|&(lo, hi)| shards(lo, hi, shard_size)).collect();
    let results: Vec<Result<FrequencyDistribution, StoreError>> = pool(workers).install(|| {
        plan.par_iter()
            .map(|&(lo, hi)| {
                let shard = enumerate_range(spec, lo, hi)?;
                on_shard(&shard)?;
                Ok(shard)
            })
            .collect()
    });
    let mut total = FrequencyDistribution::empty(*spec);
    for shard in results {
        total = merge(&total, &shard?)?;
    }
    Ok(total)
}

/// Census that appends every finished shard to `checkpoint` and, when the
/// file already holds shards for this spec, only runs the missing ranges.
pub fn enumerate_resumable(
    spec: &MachineSpec,
    workers: usize,
    checkpoint: &Path,
    shard_size: u128,
) -> Result<FrequencyDistribution, StoreError> {
    let count = program_count_u128(spec)?;
    let done = if checkpoint.exists() { load_checkpoint(checkpoint, spec)? } else { Vec::new() };
    let mut covered = Vec::new();
    let mut acc = FrequencyDistribution::empty(*spec);
    for shard in &done {
        covered = union_ranges(&covered, &shard.ranges)?;
        acc = merge(&acc, shard)?;
    }
    let todo = missing_ranges(&covered, count);
    let writer = CheckpointWriter::open(checkpoint, spec)?;
    let fresh = enumerate_ranges(spec, &todo, workers, shard_size, |shard| writer.append(shard))?;
    Ok(merge(&acc, &fresh)?)
}
