use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use curvlab::dsl::{CompiledMetric, Params};
use curvlab::geometry::{catalog_lookup, GridSpec};
use curvlab::parallel::{map_points, Execution};
use curvlab::symmetry::classify_point;
use curvlab::tensor::curvature;
use curvlab::Tolerances;

fn classification_sweep(c: &mut Criterion) {
    let entry = catalog_lookup("sol3", &Params::new()).unwrap();
    let metric = CompiledMetric::new(entry.spec.clone(), 2);
    let tol = Tolerances::default();
    let mut group = c.benchmark_group("classify_sweep");
    group.sample_size(20);
    for n in [5usize, 9, 13] {
        let points = GridSpec {
            bounds: entry.default_box,
            counts: [n; 3],
        }
        .points();
        for (label, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            group.bench_with_input(BenchmarkId::new(label, n * n * n), &points, |b, pts| {
                b.iter(|| {
                    map_points(exec, pts, |p| {
                        let bundle = curvature(&metric.jet(*p, 2).unwrap()).unwrap();
                        classify_point(&bundle, &tol).l()
                    })
                    .into_iter()
                    .flatten()
                    .sum::<f64>()
                })
            });
        }
    }
    group.finish();
}

criterion_group!(benches, classification_sweep);
criterion_main!(benches);
