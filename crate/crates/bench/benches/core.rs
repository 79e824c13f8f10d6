use criterion::{black_box, criterion_group, criterion_main, Criterion};

use twb_bench::{in_phase_bath, out_of_phase_bath};
use twb_core::fock::{lindblad_rhs, ppt_min_eigenvalue, twb_density};
use twb_core::{
    char_poly_profile, evolve, ppt_test, survival_time_closed, survival_time_numeric, twb_state,
    TwinBeamParams,
};

fn gaussian(c: &mut Criterion) {
    let bath = out_of_phase_bath();
    let s0 = twb_state(TwinBeamParams::new(1.0).unwrap());
    c.bench_function("evolve+ppt_test", |b| {
        b.iter(|| {
            let s = evolve(black_box(&s0), &bath, 0.6).unwrap();
            ppt_test(&s, 1e-10).unwrap()
        })
    });
    c.bench_function("char_poly_profile", |b| {
        b.iter(|| char_poly_profile(black_box(1.0), &bath, 0.55).unwrap())
    });
}

fn survival(c: &mut Criterion) {
    let in_phase = in_phase_bath();
    let out_of_phase = out_of_phase_bath();
    c.bench_function("survival_closed", |b| {
        b.iter(|| survival_time_closed(black_box(1.0), 1.0, 0.1).unwrap())
    });
    c.bench_function("survival_numeric_real_m", |b| {
        b.iter(|| survival_time_numeric(black_box(1.0), &in_phase).unwrap())
    });
    c.bench_function("survival_numeric_complex_m", |b| {
        b.iter(|| survival_time_numeric(black_box(1.0), &out_of_phase).unwrap())
    });
}

fn fock(c: &mut Criterion) {
    let bath = out_of_phase_bath();
    let mut group = c.benchmark_group("fock");
    group.sample_size(10);
    for d in [10usize, 25] {
        let (rho, _) = twb_density(0.8, d, 1e-3).unwrap();
        group.bench_function(format!("lindblad_rhs/d={d}"), |b| {
            b.iter(|| lindblad_rhs(black_box(&rho), &bath))
        });
    }
    let (rho, _) = twb_density(0.8, 15, 1e-3).unwrap();
    group.bench_function("ppt_min_eigenvalue/d=15", |b| {
        b.iter(|| ppt_min_eigenvalue(black_box(&rho)))
    });
    group.finish();
}

criterion_group!(gaussian_benches, gaussian);
criterion_group!(survival_benches, survival);
criterion_group!(fock_benches, fock);
criterion_main!(gaussian_benches, survival_benches, fock_benches);
