use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use ncdc_core::sde::{p_variation, product_rule_residual, simulate_wiener, Catalog, ItoIntegrand, SdeConfig};

fn simulation(c: &mut Criterion) {
    let mut g = c.benchmark_group("simulate_wiener");
    g.sample_size(10);
    for steps in [1usize << 12, 1 << 16] {
        let cfg = SdeConfig { gamma: 1.0, horizon: 1.0, steps, paths: 16, seed: 3 };
        g.bench_with_input(BenchmarkId::from_parameter(steps), &cfg, |b, cfg| {
            b.iter(|| simulate_wiener(black_box(cfg)).unwrap())
        });
    }
    g.finish();
}

fn statistics(c: &mut Criterion) {
    let cfg = SdeConfig { gamma: 1.0, horizon: 1.0, steps: 1 << 16, paths: 1, seed: 4 };
    let path = simulate_wiener(&cfg).unwrap().remove(0);
    let meshes = [1usize << 16, 1 << 14, 1 << 12, 1 << 10];
    let ito = ItoIntegrand::new(&Catalog::XCubedPlusTX.expr(), 1.0).unwrap();
    c.bench_function("p_variation/cubic_4_levels", |b| b.iter(|| p_variation(black_box(&path), 3, &meshes).unwrap()));
    c.bench_function("product_rule/2^16", |b| b.iter(|| product_rule_residual(black_box(&path))));
    c.bench_function("ito_residual/2^16", |b| b.iter(|| ito.residual(black_box(&path), 1 << 16).unwrap()));
}

criterion_group!(benches, simulation, statistics);
criterion_main!(benches);
