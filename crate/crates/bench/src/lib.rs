//! Benchmark-only crate; see `benches/hetsim.rs`.
