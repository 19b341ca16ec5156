use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use decaysum::{build_mechanism, DecayFunction, MechanismKind, PrivacyParams};
use decaysum_bench::stream;

fn streaming(c: &mut Criterion) {
    let privacy = PrivacyParams::new(1.0, 1e-5, 1.0).unwrap();
    let mut group = c.benchmark_group("stream");
    group.sample_size(20);
    for horizon in [256, 1024, 4096] {
        let x = stream(horizon);
        let cases = [
            (MechanismKind::Factorization, DecayFunction::Polynomial { c: 1 }),
            (MechanismKind::GaussianBaseline, DecayFunction::Polynomial { c: 1 }),
            (MechanismKind::SlidingWindow, DecayFunction::SlidingWindow { w: 64 }),
        ];
        for (kind, f) in cases {
            group.bench_with_input(BenchmarkId::new(kind.name(), horizon), &x, |b, x| {
                b.iter(|| {
                    let mut m = build_mechanism(kind, &f, x.len(), privacy, 7).unwrap();
                    m.run(black_box(x)).unwrap()
                })
            });
        }
    }
    group.finish();
}

criterion_group!(benches, streaming);
criterion_main!(benches);
