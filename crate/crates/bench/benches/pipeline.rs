use criterion::{criterion_group, criterion_main, Criterion};
use qtheta::brandt::brandt_matrix;
use qtheta::pipeline::class_set;
use qtheta::thetalift::LiftEngine;
use qtheta::LocalWeightTable;
use qtheta_bench::{base_lattice, config_37, space};
use std::hint::black_box;

fn classes(c: &mut Criterion) {
    for n in [11u64, 37, 101] {
        c.bench_function(&format!("class_set/{n}"), |b| {
            b.iter(|| class_set(black_box(n), &[n]).unwrap())
        });
    }
}

fn brandt(c: &mut Criterion) {
    let sp = space(101, 0);
    for p in [2u64, 13, 47] {
        c.bench_function(&format!("brandt/101/T{p}"), |b| {
            b.iter(|| brandt_matrix(&sp, black_box(p)))
        });
    }
    let sp = space(11, 2);
    c.bench_function("brandt/11/k2/T7", |b| {
        b.iter(|| brandt_matrix(&sp, black_box(7)))
    });
}

fn weights(c: &mut Criterion) {
    let lat = base_lattice(37);
    for p in [7u64, 13] {
        c.bench_function(&format!("weight_table/37/p{p}"), |b| {
            b.iter(|| LocalWeightTable::build(&lat, black_box(p), None).unwrap())
        });
    }
}

fn lift(c: &mut Criterion) {
    let sp = space(37, 0);
    let cfg = config_37();
    let f = sp.basis()[0].clone();
    let mut g = c.benchmark_group("lift");
    g.sample_size(10);
    g.bench_function("engine/37/l5/200", |b| {
        b.iter(|| LiftEngine::new(&sp, &cfg, black_box(200)).unwrap())
    });
    let eng = LiftEngine::new(&sp, &cfg, 200).unwrap();
    g.bench_function("table/37/l5/200", |b| b.iter(|| eng.lift(black_box(&f))));
    g.finish();
}

criterion_group!(benches, classes, brandt, weights, lift);
criterion_main!(benches);
