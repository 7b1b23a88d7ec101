use std::hint::black_box;
use std::path::Path;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mcdsqs::algebra::moebius_rds_with;
use mcdsqs::codes::{emit_code, min_distance_buckets, min_distance_full};
use mcdsqs::constructions::ConstructOptions;
use mcdsqs::data::{dataset_entry, load_dataset};
use mcdsqs::exec::Exec;
use mcdsqs::group::{expand_orbits, PermGroup};
use mcdsqs::model::Block;
use mcdsqs::recipes::{builtin, run_recipe};
use mcdsqs::verify::verify_certificate_with;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn verification(c: &mut Criterion) {
    let rdsqs34 = run_recipe(&builtin("rdsqs34").unwrap(), Path::new("."), &ConstructOptions::default()).unwrap();
    let mcdsqs32 = load_dataset("mcdsqs_32").unwrap();
    let mut g = c.benchmark_group("verify_certificate");
    for (name, cert) in [("rdsqs34", &rdsqs34), ("mcdsqs32", &mcdsqs32)] {
        for (mode, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(mode, name), cert, |b, cert| {
                b.iter(|| verify_certificate_with(black_box(cert), exec))
            });
        }
    }
    g.finish();
}

fn orbits(c: &mut Criterion) {
    let e = dataset_entry("mcdsqs_32").unwrap();
    let base: Vec<Block> = e.base_blocks.iter().map(|(b, _)| b.clone()).collect();
    let group = PermGroup::new(e.generators.clone());
    let mut g = c.benchmark_group("expand_orbits");
    for (mode, exec) in MODES {
        g.bench_function(BenchmarkId::new(mode, "mcdsqs32"), |b| {
            b.iter(|| expand_orbits(e.v, black_box(&base), &group, exec).unwrap())
        });
    }
    g.finish();
}

fn circles(c: &mut Criterion) {
    let mut g = c.benchmark_group("moebius_rds");
    g.sample_size(10);
    for q in [3, 9] {
        for (mode, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(mode, q), &q, |b, &q| b.iter(|| moebius_rds_with(q, exec).unwrap()));
        }
    }
    g.finish();
}

fn code_scans(c: &mut Criterion) {
    let code = emit_code(&load_dataset("mcdsqs_32").unwrap()).unwrap();
    let mut g = c.benchmark_group("code_scan");
    g.sample_size(10);
    for (mode, exec) in MODES {
        g.bench_function(BenchmarkId::new(mode, "full/mcdsqs32"), |b| {
            b.iter(|| min_distance_full(black_box(&code.codewords), exec))
        });
        g.bench_function(BenchmarkId::new(mode, "buckets/mcdsqs32"), |b| {
            b.iter(|| min_distance_buckets(black_box(&code.codewords), exec))
        });
    }
    g.finish();
}

criterion_group!(benches, verification, orbits, circles, code_scans);
criterion_main!(benches);
