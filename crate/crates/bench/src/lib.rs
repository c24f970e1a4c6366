//! Benchmark-only crate. See `benches/kernels.rs`.
