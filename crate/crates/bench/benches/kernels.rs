use criterion::{criterion_group, criterion_main, Criterion};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use tofh_core::equiv::{finite_subgroup_probe, normalize_h, word_matrix};
use tofh_core::exact::Matrix;
use tofh_core::gates::GateSymbol;
use tofh_core::schemas::{instantiate_into, sigma_2_tokens, SchemaId};
use tofh_core::words::{derive_search, Alphabet, SearchLimits, Word};

fn gate(tok: &str) -> Matrix {
    GateSymbol::parse(tok).unwrap().matrix(3).unwrap()
}

fn bench_mat_mul(c: &mut Criterion) {
    let a = gate("K12").mul(&gate("CCX01")).mul(&gate("H2"));
    let b = gate("TLK[0,1,2,3]").mul(&gate("CZ12"));
    c.bench_function("mat_mul_8x8", |bench| {
        bench.iter(|| std::hint::black_box(a.mul(&b)))
    });
}

fn bench_word_matrix(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let alphabet: Vec<String> = sigma_2_tokens().iter().map(|t| t.to_string()).collect();
    let word: Vec<String> = (0..200)
        .map(|_| alphabet[rng.random_range(0..alphabet.len())].clone())
        .collect();
    c.bench_function("word_matrix_200", |bench| {
        bench.iter(|| std::hint::black_box(word_matrix(&word).unwrap()))
    });
}

fn bench_normalize(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let alphabet: Vec<String> = sigma_2_tokens().iter().map(|t| t.to_string()).collect();
    let word: Vec<String> = (0..50)
        .map(|_| alphabet[rng.random_range(0..alphabet.len())].clone())
        .collect();
    c.bench_function("normalize_h_50", |bench| {
        bench.iter(|| std::hint::black_box(normalize_h(&word).unwrap()))
    });
}

fn bench_derive_search(c: &mut Criterion) {
    let mut alph = Alphabet::new();
    let mut rels = instantiate_into(SchemaId::RE8, 8, &mut alph).unwrap();
    rels.extend(instantiate_into(SchemaId::RE8D, 8, &mut alph).unwrap());
    rels.extend(instantiate_into(SchemaId::RD, 8, &mut alph).unwrap());
    let r1 = alph.lookup("r1").unwrap();
    let u = Word::new(vec![r1, r1]);
    c.bench_function("derive_search_r1r1", |bench| {
        bench.iter(|| {
            std::hint::black_box(derive_search(
                &u,
                &Word::empty(),
                &rels,
                SearchLimits::default(),
            ))
        })
    });
}

fn bench_closure(c: &mut Criterion) {
    let gens = vec![gate("X0"), gate("SW01"), gate("SW12"), gate("Z2")];
    c.bench_function("closure_order_96", |bench| {
        bench.iter(|| std::hint::black_box(finite_subgroup_probe(&gens, 10_000)))
    });
}

criterion_group!(
    benches,
    bench_mat_mul,
    bench_word_matrix,
    bench_normalize,
    bench_derive_search,
    bench_closure
);
criterion_main!(benches);
