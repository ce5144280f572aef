//! Benchmark-only crate.
