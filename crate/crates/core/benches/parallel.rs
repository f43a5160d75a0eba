use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use oufreq::cylinder::{cylinder_quantities, CylinderFunction};
use oufreq::frequency::{compute_curve, radius_grid, FreqSettings, ProductEigenfunction};
use oufreq::Exec;

fn frequency_curve(c: &mut Criterion) {
    let v = ProductEigenfunction::new(&[1, 0, 2]).unwrap();
    let grid = radius_grid(1.0, 12.0, 0.5).unwrap();
    let mut group = c.benchmark_group("frequency_curve_n3");
    group.sample_size(10);
    for exec in [Exec::Sequential, Exec::Parallel] {
        let s = FreqSettings::with_exec(exec);
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{exec:?}")),
            &s,
            |b, s| b.iter(|| compute_curve(&v, &grid, s).unwrap()),
        );
    }
    group.finish();
}

fn cylinder(c: &mut Criterion) {
    let v = CylinderFunction::exact(2, true).unwrap();
    let grid = radius_grid(4.0, 12.0, 0.25).unwrap();
    let mut group = c.benchmark_group("cylinder_quantities");
    for exec in [Exec::Sequential, Exec::Parallel] {
        let s = FreqSettings::with_exec(exec);
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{exec:?}")),
            &s,
            |b, s| b.iter(|| cylinder_quantities(&v, &grid, s).unwrap()),
        );
    }
    group.finish();
}

criterion_group!(benches, frequency_curve, cylinder);
criterion_main!(benches);
