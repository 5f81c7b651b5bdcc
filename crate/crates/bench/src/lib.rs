//! Criterion benchmarks for `weyl-core`; the targets live in `benches/`.
