use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use formcalc_core::batch::{self, Exec};
use formcalc_core::{random, Coords, Form, Probe};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn forms(count: usize) -> Vec<Form> {
    let c = Coords::standard(4);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    (0..count).map(|i| random::form(&mut rng, &c, 1 + i % 3, 3)).collect()
}

fn flat_closure(c: &mut Criterion) {
    let probe = Probe::default();
    let mut group = c.benchmark_group("flat_closure");
    for count in [64, 256] {
        let input = forms(count);
        for exec in [Exec::Sequential, Exec::Parallel] {
            group.bench_with_input(BenchmarkId::new(format!("{exec:?}"), count), &input, |b, input| {
                b.iter(|| batch::flat_closure(exec, input, &probe))
            });
        }
    }
    group.finish();
}

fn closure_on(c: &mut Criterion) {
    let probe = Probe::default();
    let amb = Coords::standard(4);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let cases: Vec<_> = forms(128)
        .into_iter()
        .map(|f| (random::pseudostructure(&mut rng, &amb, 2, 2), f))
        .collect();
    let mut group = c.benchmark_group("closure_on_pseudostructure");
    for exec in [Exec::Sequential, Exec::Parallel] {
        group.bench_function(format!("{exec:?}"), |b| b.iter(|| batch::closure_on(exec, &cases, &probe)));
    }
    group.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = flat_closure, closure_on
}
criterion_main!(benches);
