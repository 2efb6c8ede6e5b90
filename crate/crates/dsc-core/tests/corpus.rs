//! Runs every corpus program through both back ends.

use std::fs;
use std::path::{Path, PathBuf};

use dsc_core::dot::eval::Outcome;
use dsc_core::erasure::ErasurePolicy;
use dsc_core::fjd::eval::FjdOutcome;
use dsc_core::pipeline::{corpus_files, run_both, CORPUS_STEPS};

fn corpus_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

/// Files expected to fall inside the erasable fragment.
const ERASABLE: &[&str] = &[
    "sec3.2-translation",
    "sec4.1-override-env",
    "sec4.3.1-and-bind",
    "sec5.3.2-reabstraction",
    "sec5.3.2-linearization",
    "sec6.3-intersection-selection",
    "secA.3-bridges",
];

#[test]
fn every_corpus_directory_is_populated() {
    let files = corpus_files(&corpus_root());
    for dir in ["ch3", "ch4", "ch5", "ch6", "ch7", "appA"] {
        assert!(files.iter().any(|f| f.parent().unwrap().ends_with(dir)), "no corpus file in {dir}");
    }
}

#[test]
fn corpus_checks_and_never_gets_stuck() {
    for f in corpus_files(&corpus_root()) {
        let src = fs::read_to_string(&f).unwrap();
        let r = run_both(&src, ErasurePolicy::Scala3, CORPUS_STEPS).unwrap_or_else(|ds| panic!("{}: {ds:?}", f.display()));
        assert!(matches!(r.dot.outcome, Outcome::Value(_) | Outcome::OutOfFuel(_)), "{}: {}", f.display(), r.dot.summary());
        let stem = f.file_stem().unwrap().to_str().unwrap();
        assert_eq!(r.erased.is_some(), ERASABLE.contains(&stem), "{stem}: erasability");
        if let Some((p, run)) = &r.erased {
            assert!(p.typecheck().is_ok(), "{stem}: {:?}", p.typecheck());
            assert!(!matches!(run.outcome, FjdOutcome::Stuck { .. } | FjdOutcome::ClassCastFailure { .. }), "{stem}: {}", run.summary());
            assert_eq!(r.dot_class(), r.fjd_class(), "{stem}: back ends disagree");
        }
    }
}

#[test]
fn linearization_example_returns_two() {
    let src = fs::read_to_string(corpus_root().join("ch5/sec5.3.2-linearization.dsc")).unwrap();
    let r = run_both(&src, ErasurePolicy::Scala3, CORPUS_STEPS).unwrap();
    assert_eq!(r.dot_class(), Some("Two"));
}
