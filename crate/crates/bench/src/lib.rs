//! Criterion benchmarks for the series, special-function, integral and
//! lattice kernels; see `benches/kernels.rs`.
