use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use triangulab_core::grid::Grid;
use triangulab_core::operators::{build_ebeta_operator, build_fractional, build_fractional_imaginary, build_multiplication, SplitPair};
use triangulab_core::resolvent::{self, ProfileOptions, YLadder};
use triangulab_core::{spectral, symbol, EbetaSpec, C64};

fn builders(c: &mut Criterion) {
    let mut group = c.benchmark_group("build");
    for n in [128, 512] {
        let g = Grid::new(1.0, n).unwrap();
        group.bench_with_input(BenchmarkId::new("fractional", n), &g, |b, g| b.iter(|| build_fractional(g, 0.5).unwrap()));
        let spec = EbetaSpec::new(2.0, 0.0).unwrap();
        group.bench_with_input(BenchmarkId::new("ebeta", n), &g, |b, g| b.iter(|| build_ebeta_operator(g, &spec).unwrap()));
        group.bench_with_input(BenchmarkId::new("jialpha", n), &g, |b, g| {
            b.iter(|| build_fractional_imaginary(g, 1.0).unwrap())
        });
    }
    group.finish();
}

fn spectrum(c: &mut Criterion) {
    let g = Grid::new(1.0, 128).unwrap();
    let t = build_multiplication(&g, |x| x).unwrap().add(&build_fractional(&g, 0.5).unwrap()).unwrap();
    c.bench_function("spectrum/n128", |b| b.iter(|| spectral::spectrum(&t).unwrap()));
}

fn profile(c: &mut Criterion) {
    let g = Grid::new(1.0, 64).unwrap();
    let split =
        SplitPair::from_construction(build_multiplication(&g, |_| 0.5).unwrap(), build_fractional(&g, 0.5).unwrap())
            .unwrap();
    let opts = ProfileOptions {
        y_ladder: YLadder::Explicit(vec![0.5, 0.2, 0.1, 0.05]),
        x_points: 16,
        ..ProfileOptions::default()
    };
    let mut group = c.benchmark_group("resolvent");
    group.sample_size(10);
    group.bench_function("profile/n64", |b| b.iter(|| resolvent::profile(&split, &opts).unwrap()));
    group.finish();
}

fn transform(c: &mut Criterion) {
    let s = |t: f64| C64::new(t.powf(-0.5), 0.0);
    let mut group = c.benchmark_group("symbol");
    for xi in [10.0, 1000.0] {
        group.bench_with_input(BenchmarkId::new("transform", xi), &xi, |b, &xi| {
            b.iter(|| symbol::transform(&s, 1.0, xi).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, builders, spectrum, profile, transform);
criterion_main!(benches);
