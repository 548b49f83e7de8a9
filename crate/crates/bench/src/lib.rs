//! Criterion benchmarks for `acs-core`; see `benches/engine.rs`.
