//! Corpus handling: SDF ingestion, Stage-1 filtering and corpus statistics.

mod filter;
mod sdf;
mod stats;

pub use filter::{stage1_filter, RejectReason, Stage1Report};
pub use sdf::{ingest_sdf, IngestReport, SdfRecord, SkipReason};
pub use stats::{corpus_stats, CorpusStats, KStats};
