//! Residual and field throughput, rayon pool against the sequential path.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use karman_core::boundary::SampledBoundary;
use karman_core::contour_functional::Functional;
use karman_core::exec;
use karman_core::periodic_field::StreetField;
use karman_core::{Complex64, RadialKernel, StreetGeometry};

fn residual(c: &mut Criterion) {
    let geom = StreetGeometry::new(1.0, 1.0, 0.5).unwrap();
    let kernels = [
        ("euler", RadialKernel::euler()),
        ("qgsw", RadialKernel::qgsw(1.0).unwrap()),
        ("gsqg", RadialKernel::gsqg(0.5).unwrap()),
    ];
    let mut group = c.benchmark_group("residual_n16_m128");
    group.sample_size(20);
    for (name, kernel) in kernels {
        let fnl = Functional::new(kernel, geom, 16, 128).unwrap();
        let coeffs: Vec<f64> = (1..=16).map(|n| 1e-3 / (n * n) as f64).collect();
        for sequential in [false, true] {
            let mode = if sequential { "sequential" } else { "parallel" };
            group.bench_with_input(BenchmarkId::new(mode, name), &coeffs, |b, coeffs| {
                exec::set_sequential(sequential);
                b.iter(|| fnl.residual_modes(black_box(0.05), coeffs).unwrap());
                exec::set_sequential(false);
            });
        }
    }
    group.finish();
}

fn field_grid(c: &mut Criterion) {
    let geom = StreetGeometry::new(1.0, 1.0, 0.5).unwrap();
    let b1 = SampledBoundary::circle(Complex64::new(0.0, 0.0), 0.1, 128).unwrap();
    let b2 = b1.partner(geom.a, geom.h);
    let field = StreetField::new(RadialKernel::qgsw(1.0).unwrap(), geom.l, b1, b2);
    let mut group = c.benchmark_group("field_grid_32x32");
    group.sample_size(10);
    for sequential in [false, true] {
        let mode = if sequential { "sequential" } else { "parallel" };
        group.bench_function(mode, |b| {
            exec::set_sequential(sequential);
            b.iter(|| field.sample_grid((-0.5, 0.5), (-1.4, 0.4), 32, 32));
            exec::set_sequential(false);
        });
    }
    group.finish();
}

criterion_group!(benches, residual, field_grid);
criterion_main!(benches);
