//! Criterion benchmarks for `sfl-core`; see `benches/kernels.rs`.
