use criterion::{black_box, criterion_group, criterion_main, Criterion};
use num_complex::Complex64 as C;
use qindex_core::fixtures;
use qindex_core::index3d::{fourier_coefficients, lattice_index, FourierGrid};
use qindex_core::integrator::integrate;
use qindex_core::nzdata::{compile_integrand, select_quad, Peripheral};
use qindex_core::qseries::{tet_index_series, verify_pentagon_series};
use qindex_core::QContext;

fn series(c: &mut Criterion) {
    c.bench_function("tet_index_series(2,-3) order 40", |b| b.iter(|| tet_index_series(black_box(2), black_box(-3), 40)));
    c.bench_function("pentagon series O(q^6), bound 1", |b| b.iter(|| verify_pentagon_series(black_box(6), 1)));
}

fn special(c: &mut Criterion) {
    let ctx = QContext::real(0.1).unwrap();
    let z = C::new(1.3, 0.4);
    c.bench_function("G_q", |b| b.iter(|| ctx.gq(black_box(z))));
    c.bench_function("psi0", |b| b.iter(|| ctx.psi0(black_box(z), black_box(C::new(1.1, -0.2)))));
}

fn integrals(c: &mut Criterion) {
    let ctx = QContext::real(0.1).unwrap();
    let g = fixtures::gluing("fig8").unwrap();
    let bi = compile_integrand(&g, &select_quad(&g).unwrap()).unwrap();
    let p = Peripheral::from_st(&ctx, C::from_polar(1.0, 0.7), C::from_polar(1.0, -1.2));
    c.bench_function("fig8 integral tol 1e-10", |b| b.iter(|| integrate(&bi, &ctx, black_box(&p), 1e-10).unwrap()));
    let grid = FourierGrid { size: 8, tol: 1e-10 };
    c.bench_function("fig8 Fourier grid 8", |b| b.iter(|| fourier_coefficients(&g, &ctx, &[(0, 0)], &grid).unwrap()));
    c.bench_function("fig8 lattice (0,0) order 24", |b| b.iter(|| lattice_index(&g, black_box((0, 0)), 24).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = series, special, integrals
}
criterion_main!(benches);
