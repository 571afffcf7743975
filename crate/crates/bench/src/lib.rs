//! Criterion benchmarks for `hk-core`; see `benches/kernels.rs`.
