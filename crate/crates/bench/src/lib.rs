//! Criterion benchmarks for `monadlab`; see `benches/`.
