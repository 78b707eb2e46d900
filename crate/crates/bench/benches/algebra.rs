use std::sync::Arc;

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use bsfh::arc_diagram::canonical::{z2, z_two_arcs};
use bsfh::join::Joiner;
use bsfh::models::{alg_as_aa, alg_one_sided, elementary_d, Hand};
use bsfh::nice::{build_twisting_slice_diagram, count_domains};
use bsfh::sfh::{homology_blocks, mu_h_via_join};
use bsfh::strands::check_dga;
use bsfh::tensor::box_product;
use bsfh::{AlgebraModel, PairSet};

fn algebra(c: &mut Criterion) {
    let z = z2();
    c.bench_function("enumerate A(Z2)", |b| b.iter(|| AlgebraModel::new(black_box(&z)).unwrap()));
    let am = AlgebraModel::new(&z).unwrap();
    c.bench_function("check_dga A(Z2)", |b| b.iter(|| check_dga(black_box(&am)).unwrap()));
    c.bench_function("homology blocks A(Z2)", |b| b.iter(|| homology_blocks(black_box(&am)).unwrap()));
}

fn tensor(c: &mut Criterion) {
    let am = Arc::new(AlgebraModel::new(&z_two_arcs()).unwrap());
    let a = alg_as_aa(&am);
    let x = elementary_d(&am, PairSet::full(am.rank()), Hand::Left);
    c.bench_function("A ⊠ x over two arcs", |b| b.iter(|| box_product(black_box(&a), black_box(&x)).unwrap()));
}

fn join(c: &mut Criterion) {
    let am = Arc::new(AlgebraModel::new(&z2()).unwrap());
    let j = Joiner::new(am.clone()).unwrap();
    let full = PairSet::full(2);
    let u = box_product(&alg_one_sided(&am, full, Hand::Right), &j.dd).unwrap();
    let m = alg_one_sided(&am, full, Hand::Left);
    let v = elementary_d(&am, full, Hand::Left);
    c.bench_function("join_general Z2", |b| b.iter(|| j.join_general(&u, &m, &v).unwrap()));
    let s = PairSet::EMPTY.with(0);
    c.bench_function("glued multiplication Z2", |b| b.iter(|| mu_h_via_join(&j, s, s, full).unwrap()));
}

fn nice(c: &mut Criterion) {
    let z = z2();
    let am = Arc::new(AlgebraModel::new(&z).unwrap());
    let d = build_twisting_slice_diagram(&z).unwrap();
    c.bench_function("count domains Z2 slice", |b| b.iter(|| count_domains(black_box(&d), &am).unwrap()));
}

criterion_group!(benches, algebra, tensor, join, nice);
criterion_main!(benches);
