use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use proxlaw::rng::Stream;
use proxlaw::stats::{permutation_test, CountingRule, PermutationMode};
use proxlaw::HubVector;

fn vectors(n: usize) -> (HubVector, HubVector) {
    let mut s = Stream::new(7);
    let a: Vec<f64> = (0..n).map(|_| s.below(20) as f64).collect();
    let b: Vec<f64> = a.iter().map(|x| x + s.below(10) as f64).collect();
    (HubVector::from_values("a", a), HubVector::from_values("b", b))
}

fn bench(c: &mut Criterion) {
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let mut group = c.benchmark_group("permutation_test");
    for &n in &[12usize, 200] {
        let (a, b) = vectors(n);
        let run = || {
            permutation_test(&a, &b, 10_000, 42, PermutationMode::Sampled, CountingRule::GreaterOrEqual).unwrap()
        };
        group.bench_with_input(BenchmarkId::new("one_thread", n), &n, |bch, _| {
            bch.iter(|| single.install(run))
        });
        group.bench_with_input(BenchmarkId::new("default_pool", n), &n, |bch, _| bch.iter(run));
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
