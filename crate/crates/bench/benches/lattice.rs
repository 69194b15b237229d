use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use chainmail::category::{check_hom_set_bijection, k_chainmail};
use chainmail::sources::{powerset_lattice, search_connectivity_representation, seven_element_chainmail};
use chainmail::{as_chainmail, as_complete_lattice, d_lattice, Poset};

fn lattice_checks(c: &mut Criterion) {
    let b6 = powerset_lattice(6).unwrap();
    let p = b6.poset().clone();
    c.bench_function("validate 64-element powerset lattice", |b| {
        b.iter(|| as_complete_lattice(black_box(&p)).unwrap())
    });
    c.bench_function("connected elements of 64-element powerset", |b| {
        b.iter(|| {
            let l = as_complete_lattice(&p).unwrap();
            l.connected_elements().len()
        })
    });
    let chain = Poset::chain(200);
    c.bench_function("pairwise chainmail test, 200-chain", |b| b.iter(|| as_chainmail(black_box(&chain)).unwrap()));
}

fn functors(c: &mut Criterion) {
    let seven = seven_element_chainmail();
    c.bench_function("D of the seven-element chainmail", |b| b.iter(|| d_lattice(black_box(&seven)).unwrap().size()));
    let d = d_lattice(&seven).unwrap();
    c.bench_function("K of its D-lattice", |b| b.iter(|| k_chainmail(black_box(d.lattice())).unwrap()));
    let b3 = powerset_lattice(3).unwrap();
    let g = k_chainmail(&b3).unwrap().chainmail().clone();
    let small = powerset_lattice(2).unwrap();
    c.bench_function("hom-set bijection, 3 points against 4-element powerset", |b| {
        b.iter(|| check_hom_set_bijection(black_box(&g), black_box(&small)).unwrap())
    });
}

fn representation(c: &mut Criterion) {
    let seven = seven_element_chainmail();
    let mut group = c.benchmark_group("representation search");
    group.sample_size(10);
    group.bench_function("seven-element chainmail, 6 points", |b| {
        b.iter(|| search_connectivity_representation(black_box(&seven), 6).unwrap())
    });
    group.finish();
}

criterion_group!(benches, lattice_checks, functors, representation);
criterion_main!(benches);
