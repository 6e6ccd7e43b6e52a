//! Criterion benchmarks for the simulator and protocol layers; see `benches/`.
