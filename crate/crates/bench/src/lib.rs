//! Criterion benchmarks for the symbolic engine and the path simulator; see `benches/`.
