use std::fs;
use std::path::Path;

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use dsc_core::dot::eval::evaluate;
use dsc_core::erasure::{erase_program, ErasurePolicy};
use dsc_core::fjd::eval::evaluate as fjd_evaluate;
use dsc_core::gen;
use dsc_core::pipeline::{check_source, CORPUS_STEPS};
use dsc_core::translate::translate_program;

fn corpus(rel: &str) -> String {
    fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(rel)).unwrap()
}

fn pipeline(c: &mut Criterion) {
    let fj_table = corpus("ch3/sec3.2-translation.dsc");
    let bridges = corpus("appA/secA.3-bridges.dsc");
    let dealias = corpus("ch7/sec7.4.1-dealias.dsc");

    c.bench_function("check FJ table", |b| b.iter(|| check_source(black_box(&fj_table), None).unwrap()));
    c.bench_function("check dealias", |b| b.iter(|| check_source(black_box(&dealias), None).unwrap()));

    let tp = check_source(&fj_table, None).unwrap();
    c.bench_function("translate FJ table", |b| b.iter(|| translate_program(black_box(&tp)).unwrap()));
    let term = translate_program(&tp).unwrap();
    c.bench_function("evaluate FJ table in DOT", |b| b.iter(|| evaluate(black_box(&term), CORPUS_STEPS)));

    let tp = check_source(&bridges, None).unwrap();
    c.bench_function("erase bridges", |b| b.iter(|| erase_program(ErasurePolicy::Scala3, black_box(&tp.program), false).unwrap()));
    let fjd = erase_program(ErasurePolicy::Scala3, &tp.program, false).unwrap();
    c.bench_function("evaluate bridges in FJD", |b| b.iter(|| fjd_evaluate(black_box(&fjd), CORPUS_STEPS)));
}

fn suites(c: &mut Criterion) {
    let mut g = c.benchmark_group("suites");
    g.sample_size(10);
    g.bench_function("soundness x100", |b| b.iter(|| gen::soundness_suite(black_box(1), 100, 4, 3, 6)));
    g.bench_function("erasure laws x100", |b| b.iter(|| gen::erasure_law_suite(black_box(1), 100)));
    g.finish();
}

criterion_group!(benches, pipeline, suites);
criterion_main!(benches);
