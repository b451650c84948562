//! Criterion benchmarks for `photon-arena`; see `benches/`.
