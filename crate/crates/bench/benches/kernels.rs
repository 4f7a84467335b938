use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use tdscatter_bench::{far_detector, gaussian_rod, modulated};
use tdscatter_core::greens::greens_tensor;
use tdscatter_core::photon::{photon_modulated, rod_nu, IncidentPhoton};
use tdscatter_core::quadrature::QuadratureSpec;
use tdscatter_core::special::{bessel_k0, cylinder_kernel, hankel1_0};
use tdscatter_core::vacuum::{
    monte_carlo_momentum, vacuum_modulated, vacuum_rod_covariant, CovariantKinematics, Detector, RodCovariantVacuum,
};
use tdscatter_core::{Complex64, Vec3};

fn special(c: &mut Criterion) {
    let mut g = c.benchmark_group("special");
    for x in [0.05, 1.0, 8.0] {
        g.bench_with_input(BenchmarkId::new("bessel_k0", x), &x, |b, &x| b.iter(|| bessel_k0(black_box(x))));
        g.bench_with_input(BenchmarkId::new("hankel1_0", x), &x, |b, &x| b.iter(|| hankel1_0(black_box(x))));
    }
    g.bench_function("cylinder_kernel/evanescent", |b| {
        b.iter(|| cylinder_kernel(black_box(1.3), black_box(2.5), black_box(1.0)))
    });
    g.bench_function("cylinder_kernel/propagating", |b| {
        b.iter(|| cylinder_kernel(black_box(1.3), black_box(0.4), black_box(1.0)))
    });
    g.bench_function("greens_tensor", |b| {
        b.iter(|| greens_tensor(black_box(1.0), black_box(Vec3::new(0.4, -1.1, 0.7))))
    });
    g.finish();
}

fn pipelines(c: &mut Criterion) {
    let spec = QuadratureSpec::default().with_rel_tol(1e-6);
    let rod = gaussian_rod(0.6, false);
    let cyl = Detector::cylindrical(1.0, 1.0).unwrap();
    let d = modulated();
    let far = far_detector(1.0);
    let photon =
        IncidentPhoton::new(Vec3::Z * 0.45, [Complex64::new(0.6, 0.2), Complex64::new(-0.3, 0.7)], 1.0).unwrap();

    let mut g = c.benchmark_group("pipelines");
    g.sample_size(10);
    g.bench_function("vacuum_rod_covariant", |b| {
        b.iter(|| vacuum_rod_covariant(&rod, &cyl, CovariantKinematics::Projected, &spec))
    });
    g.bench_function("vacuum_modulated", |b| b.iter(|| vacuum_modulated(&d, &far, &spec)));
    g.bench_function("photon_modulated", |b| b.iter(|| photon_modulated(&d, &far, &photon, &spec)));
    g.bench_function("rod_nu", |b| b.iter(|| rod_nu(&rod, &cyl, black_box(Vec3::new(0.3, 0.6, 0.2)), 1.0)));
    let it = RodCovariantVacuum::new(&rod, &cyl, CovariantKinematics::Projected).unwrap();
    g.bench_function("monte_carlo_momentum/1e5", |b| b.iter(|| monte_carlo_momentum(&it, 100_000, 1)));
    g.finish();
}

criterion_group!(benches, special, pipelines);
criterion_main!(benches);
