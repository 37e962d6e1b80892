//! Benchmark-only crate; see the `benches/` directory. The workspace keeps
//! timings out of the library crates so criterion and its tree stay a
//! dev-only cost.
