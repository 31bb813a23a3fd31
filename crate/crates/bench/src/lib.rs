//! Benchmark helpers; the interesting code lives in the core crate.
