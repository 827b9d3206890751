//! Criterion benchmarks for the matchers live in `benches/`.
