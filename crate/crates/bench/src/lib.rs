//! Criterion benchmarks for the series routes and the oracle operators live in `benches/`.
