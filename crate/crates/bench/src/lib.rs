//! Criterion benchmarks for the `realcollatz` kernels; see `benches/`.
