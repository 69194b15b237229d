use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use chainmail::enumeration::{count_chainmails, enumerate_posets};
use chainmail::sources::seven_element_chainmail;
use chainmail::{canonical_code, EnumerationTask, Filter};

fn counting(c: &mut Criterion) {
    let mut group = c.benchmark_group("count");
    group.sample_size(10);
    for n in [6, 7, 8] {
        group.bench_with_input(BenchmarkId::new("mail-connected", n), &n, |b, &n| {
            b.iter(|| count_chainmails(&EnumerationTask::new(n, Filter::MailConnectedChainmails)).unwrap())
        });
    }
    for n in [6, 7] {
        group.bench_with_input(BenchmarkId::new("all-posets", n), &n, |b, &n| {
            b.iter(|| count_chainmails(&EnumerationTask::new(n, Filter::AllPosets)).unwrap())
        });
    }
    group.finish();
}

fn canonical_labelling(c: &mut Criterion) {
    let posets = enumerate_posets(6).unwrap();
    c.bench_function("canonical code, all 318 posets of size 6", |b| {
        b.iter(|| posets.iter().for_each(|p| drop(black_box(canonical_code(black_box(p))))))
    });
    let seven = seven_element_chainmail().poset().clone();
    c.bench_function("canonical code, seven-element chainmail", |b| b.iter(|| canonical_code(black_box(&seven))));
}

criterion_group!(benches, counting, canonical_labelling);
criterion_main!(benches);
