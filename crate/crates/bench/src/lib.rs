//! Criterion benchmarks for `bivirus-core`; see `benches/core.rs`.
