//! Persistence, parallel census and export utilities around [`acssq_core`].

pub mod census;
pub mod growth;
pub mod store;

pub use census::{enumerate, enumerate_resumable, DEFAULT_SHARD};
pub use store::{load_checkpoint, load_table, save_table, spec_hash, table_bytes, CheckpointWriter, StoreError};
