use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use gid_core::engine::replay;
use gid_core::generators::{generate, Family, GenSpec, Order, Variant};
use gid_core::EngineKind;

// naive and firstcut are quadratic on these shapes; kept to the small size
fn reversed(c: &mut Criterion) {
    for family in [Family::Line, Family::Cycle] {
        let mut group = c.benchmark_group(format!("{family}-bwd"));
        group.sample_size(10);
        for n in [1_000u32, 10_000] {
            let trace = generate(&GenSpec::basic(family, n, Order::Bwd, Variant::Dead)).unwrap();
            for kind in EngineKind::ALL {
                if n > 1_000 && matches!(kind, EngineKind::Naive | EngineKind::FirstCut) {
                    continue;
                }
                group.bench_with_input(BenchmarkId::new(kind.name(), n), &trace, |b, t| {
                    b.iter(|| black_box(replay(kind.build().as_mut(), t).unwrap().events.len()))
                });
            }
        }
        group.finish();
    }
}

fn random(c: &mut Criterion) {
    let mut group = c.benchmark_group("sparse-d3");
    group.sample_size(10);
    let trace = generate(&GenSpec::sparse(10_000, 3, 0)).unwrap();
    for kind in [EngineKind::Simple, EngineKind::Bfgt, EngineKind::Log, EngineKind::Lazy] {
        group.bench_with_input(BenchmarkId::new(kind.name(), 10_000), &trace, |b, t| {
            b.iter(|| black_box(replay(kind.build().as_mut(), t).unwrap().events.len()))
        });
    }
    group.finish();
}

criterion_group!(benches, reversed, random);
criterion_main!(benches);
