use criterion::{criterion_group, criterion_main, Criterion};

use simlab_core::domain::{Field, PolarGrid, RadialDomain};
use simlab_core::model::lotka_volterra_constant;
use simlab_core::solver::{StatePair, Stepper};

fn bench_step(c: &mut Criterion) {
    let domain = RadialDomain::annulus(0.5, 1.0).unwrap();
    let spec =
        lotka_volterra_constant(domain, [1.0; 2], [1.0; 2], [1.0; 2], [0.8; 2]).unwrap();
    let grid = PolarGrid::new(domain, 48, 128).unwrap();
    let u1 = Field::from_fn(grid, 0.0, |r, th| 1.0 + 0.3 * r * th.cos()).unwrap();
    let u2 = Field::from_fn(grid, 0.0, |r, th| 1.0 - 0.3 * r * th.cos()).unwrap();
    c.bench_function("imex_step_48x128", |b| {
        let mut stepper = Stepper::new(&spec, grid, 2e-3).unwrap();
        let mut state = StatePair::new(u1.clone(), u2.clone()).unwrap();
        b.iter(|| stepper.step(&mut state).unwrap());
    });
}

fn bench_eigen(c: &mut Criterion) {
    use simlab_core::bifurcation::{sl_eigen, SLProblem};
    c.bench_function("sl_eigen_k3_n256_j3", |b| {
        let p = SLProblem::new(3, 0.05, 256).unwrap();
        b.iter(|| sl_eigen(&p, 3).unwrap());
    });
}

criterion_group!(benches, bench_step, bench_eigen);
criterion_main!(benches);
