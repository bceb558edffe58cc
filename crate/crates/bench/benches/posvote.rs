use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use posvote::birkhoff::{bvn_decompose, expand_in_permutations};
use posvote::linalg::{RatMatrix, RatVector};
use posvote::paradox::{saari_profile, synthesize_profile, TargetSpec};
use posvote::reachability::{enumerate_reachable, random_explore};
use posvote::voting::{build_tally_matrix, perm_unrank, permutation_matrix, Permutation};
use posvote::{Profile, Rational, WeightVector};

fn election() -> Profile {
    let ballots: Vec<(Permutation, Rational)> = [
        (vec![2, 3, 4, 1], 8),
        (vec![1, 3, 2, 4], 5),
        (vec![4, 3, 2, 1], 10),
        (vec![2, 3, 1, 4], 8),
        (vec![4, 1, 3, 2], 7),
    ]
    .into_iter()
    .map(|(s, c)| (Permutation::new(s).unwrap(), Rational::from_integer(c)))
    .collect();
    Profile::from_ballots(4, ballots.iter().map(|(s, c)| (s, c))).unwrap()
}

fn stochastic(n: usize) -> RatMatrix {
    let mut m = RatMatrix::zeros(n, n);
    let picks = [3u64, 17, 101, 250, 377, 444, 512, 600, 688, 719];
    for (k, idx) in picks.iter().enumerate() {
        let sigma = perm_unrank(n, idx % 720 + 1).unwrap();
        m.add_scaled(&Rational::new(k as i64 + 1, 55), &permutation_matrix(&sigma)).unwrap();
    }
    m
}

fn worked_spec() -> TargetSpec {
    let wv = |v: &[i64]| WeightVector::new(RatVector::from_integers(v)).unwrap();
    TargetSpec::new(
        vec![wv(&[3, 1, -1, -3]), wv(&[1, 1, 1, -3]), wv(&[17, 1, -7, -11])],
        vec![
            RatVector::from_integers(&[-2, -11, 4, 9]),
            RatVector::from_integers(&[4, 5, 3, -12]),
            RatVector::from_integers(&[13, -2, -6, -5]),
        ],
    )
    .unwrap()
}

fn birkhoff(c: &mut Criterion) {
    let p = stochastic(6);
    c.bench_function("bvn_decompose 6x6", |b| b.iter(|| bvn_decompose(black_box(&p)).unwrap()));
    let q = build_tally_matrix(&election());
    c.bench_function("expand election Q", |b| b.iter(|| expand_in_permutations(black_box(q.matrix())).unwrap()));
}

fn paradox(c: &mut Criterion) {
    let spec = worked_spec();
    c.bench_function("synthesize n=4", |b| b.iter(|| synthesize_profile(black_box(&spec)).unwrap()));
    c.bench_function("saari n=4", |b| b.iter(|| saari_profile(black_box(4), None).unwrap()));
}

fn reachability(c: &mut Criterion) {
    let q = build_tally_matrix(&election());
    c.bench_function("enumerate strict n=4", |b| b.iter(|| enumerate_reachable(black_box(&q), true).unwrap()));
    c.bench_function("enumerate faces n=4", |b| b.iter(|| enumerate_reachable(black_box(&q), false).unwrap()));
    c.bench_function("explore 1000 trials", |b| b.iter(|| random_explore(black_box(&q), 1000, 42).unwrap()));
}

criterion_group!(benches, birkhoff, paradox, reachability);
criterion_main!(benches);
