use std::sync::Arc;

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use unitary_periods::character::{character_table, conjugacy_classes};
use unitary_periods::field::ExtensionContext;
use unitary_periods::group::{enumerate_unitary_group, DEFAULT_ORDER_BOUND};
use unitary_periods::siegel::SiegelData;
use unitary_periods::spaces::{build_space, DiscChoice, Epsilon};
use unitary_periods::verify::{build_model, SplittingChoice};

fn ctx(p: u32) -> Arc<ExtensionContext> {
    Arc::new(ExtensionContext::new(p, 1).unwrap())
}

fn groups(c: &mut Criterion) {
    let f3 = ctx(3);
    let v2 = build_space(&f3, Epsilon::Hermitian, 2, DiscChoice::Split);
    let u2 = enumerate_unitary_group(&v2, DEFAULT_ORDER_BOUND).unwrap();
    c.bench_function("character table of U(2) over F_9", |b| {
        b.iter(|| {
            let classes = conjugacy_classes(&u2).unwrap();
            character_table(&u2, &classes, 3).unwrap()
        })
    });

    let f5 = ctx(5);
    let v5 = build_space(&f5, Epsilon::Hermitian, 2, DiscChoice::Split);
    let u5 = enumerate_unitary_group(&v5, DEFAULT_ORDER_BOUND).unwrap();
    let mut group = c.benchmark_group("large");
    group.sample_size(10);
    let v3 = build_space(&f3, Epsilon::Hermitian, 3, DiscChoice::Split);
    group.bench_function("enumerate U(3) over F_9", |b| {
        b.iter(|| enumerate_unitary_group(black_box(&v3), DEFAULT_ORDER_BOUND).unwrap())
    });
    group.bench_function("character table of U(2) over F_25", |b| {
        b.iter(|| {
            let classes = conjugacy_classes(&u5).unwrap();
            character_table(&u5, &classes, 5).unwrap()
        })
    });
    group.finish();
}

fn weil(c: &mut Criterion) {
    let f3 = ctx(3);
    let siegel = Arc::new(SiegelData::split(&f3, Epsilon::Skew, 1, DEFAULT_ORDER_BOUND).unwrap());
    let model = build_model(&siegel, 2, SplittingChoice::default()).unwrap();
    let u = model.unitary_group(DEFAULT_ORDER_BOUND).unwrap();
    let ps = siegel.parabolic_elements();
    c.bench_function("Weil character on U(2) x P over F_9", |b| {
        b.iter(|| {
            let mut acc = 0.0;
            for h in u.elements() {
                for p in &ps {
                    acc += model.character(h, p).unwrap().re;
                }
            }
            acc
        })
    });
}

criterion_group!(benches, groups, weil);
criterion_main!(benches);
