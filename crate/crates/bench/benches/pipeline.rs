use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use skelembed::{compute_straight_skeleton, embed, partition, validate_embedding};
use skelembed_bench::fixtures;

fn stages(c: &mut Criterion) {
    let fx = fixtures();
    let mut g = c.benchmark_group("skeleton");
    for (name, inst) in &fx {
        g.bench_with_input(BenchmarkId::from_parameter(name), inst, |b, i| {
            b.iter(|| compute_straight_skeleton(&i.polygon).unwrap())
        });
    }
    g.finish();

    let mut g = c.benchmark_group("partition");
    for (name, inst) in &fx {
        g.bench_with_input(BenchmarkId::from_parameter(name), inst, |b, i| {
            b.iter(|| partition(&i.polygon, &i.points, &i.tree).unwrap())
        });
    }
    g.finish();

    let mut g = c.benchmark_group("embed");
    g.sample_size(10);
    for (name, inst) in &fx {
        g.bench_with_input(BenchmarkId::from_parameter(name), inst, |b, i| {
            b.iter(|| embed(&i.polygon, &i.points, &i.tree).unwrap())
        });
    }
    g.finish();

    let mut g = c.benchmark_group("validate");
    g.sample_size(10);
    for (name, inst) in &fx {
        let e = embed(&inst.polygon, &inst.points, &inst.tree).unwrap();
        let budget = 4 * inst.polygon.len();
        g.bench_with_input(BenchmarkId::from_parameter(name), inst, |b, i| {
            b.iter(|| validate_embedding(&i.polygon, &i.points, &i.tree, &e, budget))
        });
    }
    g.finish();
}

criterion_group!(benches, stages);
criterion_main!(benches);
