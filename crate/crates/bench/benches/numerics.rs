use cavity_cp::numerics::{adaptive_integrate, digamma, hurwitz_zeta3, polylog, QuadratureSpec};
use cavity_cp::Complex64;
use criterion::{black_box, criterion_group, criterion_main, Criterion};

fn special(c: &mut Criterion) {
    c.bench_function("digamma", |b| b.iter(|| digamma(black_box(0.37))));
    c.bench_function("hurwitz_zeta3", |b| b.iter(|| hurwitz_zeta3(black_box(0.25))));
    let z = Complex64::new(0.3, 0.9).scale(0.999);
    c.bench_function("polylog3_near_unit_circle", |b| b.iter(|| polylog(3, black_box(z))));
}

fn quadrature(c: &mut Criterion) {
    let spec = QuadratureSpec::default();
    // Oscillatory integrand with a near-pole, like the cavity kernels.
    let f = |x: f64| Complex64::new(0.0, 40.0 * x).exp() / Complex64::new(1.0 - x, 1e-4);
    c.bench_function("adaptive_integrate_near_pole", |b| {
        b.iter(|| adaptive_integrate(f, 0.0, black_box(1.0), &spec))
    });
}

criterion_group!(benches, special, quadrature);
criterion_main!(benches);
