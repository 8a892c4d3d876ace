//! Criterion benchmarks for the minpair pipeline stages; see `benches/pipeline.rs`.
