//! Criterion benchmarks for the check, translate, evaluate and erase
//! pipeline. Run with `cargo bench -p dsc-bench`.
