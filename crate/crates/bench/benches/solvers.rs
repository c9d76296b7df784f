//! Benchmarks for the robustness solvers and compressed constructions.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use romkit_core::pauli::QubitCount;
use romkit_core::rom::{self, CgParams};
use romkit_core::{cover, gen, product};

fn qc(n: u32) -> QubitCount {
    QubitCount::new(n).unwrap()
}

fn bench_rom_naive(c: &mut Criterion) {
    let mut g = c.benchmark_group("rom_naive");
    g.sample_size(10);
    for n in [2u32, 3] {
        let mut rng = gen::rng_from_seed(n as u64);
        let b = gen::haar_mixed_pauli(qc(n), &mut rng).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |bch, _| {
            bch.iter(|| rom::rom_naive(black_box(&b)).unwrap())
        });
    }
    g.finish();
}

fn bench_rom_cg(c: &mut Criterion) {
    let mut g = c.benchmark_group("rom_column_generation");
    g.sample_size(10);
    for n in [3u32, 4] {
        let mut rng = gen::rng_from_seed(10 + n as u64);
        let b = gen::haar_mixed_pauli(qc(n), &mut rng).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |bch, _| {
            bch.iter(|| rom::rom_column_generation(black_box(&b), &CgParams::default()).unwrap())
        });
    }
    g.finish();
}

fn bench_feasible_closed_form(c: &mut Criterion) {
    let mut g = c.benchmark_group("minimal_feasible_solution");
    for n in [6u32, 8] {
        let mut rng = gen::rng_from_seed(20 + n as u64);
        let b = gen::haar_mixed_pauli(qc(n), &mut rng).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |bch, _| {
            bch.iter(|| cover::minimal_feasible_solution(black_box(&b)).unwrap())
        });
    }
    g.finish();
}

fn bench_symmetric_basis(c: &mut Criterion) {
    let mut g = c.benchmark_group("symmetric_basis");
    g.sample_size(10);
    for n in [3u32, 4] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |bch, &n| {
            bch.iter(|| product::build_symmetric_basis(black_box(n)).unwrap())
        });
    }
    g.finish();
}

fn bench_symmetric_solve(c: &mut Criterion) {
    let mut g = c.benchmark_group("rom_symmetric_exact");
    g.sample_size(10);
    let h = gen::h_state();
    for copies in [3u32, 4] {
        g.bench_with_input(BenchmarkId::from_parameter(copies), &copies, |bch, &m| {
            bch.iter(|| product::rom_symmetric_exact(black_box(&h), m).unwrap())
        });
    }
    g.finish();
}

criterion_group!(
    solvers,
    bench_rom_naive,
    bench_rom_cg,
    bench_feasible_closed_form,
    bench_symmetric_basis,
    bench_symmetric_solve
);
criterion_main!(solvers);
