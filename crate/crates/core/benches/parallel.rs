use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dissipon::field::{self, FieldGrid, FieldRun, ModeAmplitudes};
use dissipon::oscillator::{self, OscillatorParams};
use dissipon::par::{self, Exec};
use dissipon::quadrature::QuadratureConfig;
use dissipon::reservoir::{self, CouplingFunction};
use dissipon::{Complex64, Vector3};

const STRATEGIES: [(&str, Exec); 2] = [("serial", Exec::Serial), ("parallel", Exec::Parallel)];

fn fft_round_trip(c: &mut Criterion) {
    let g = FieldGrid::new(64, 64, 0.1).unwrap();
    let n = g.modes().len();
    let a = ModeAmplitudes::from_values(&g, (0..n).map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos())).collect()).unwrap();
    let mut group = c.benchmark_group("hamiltonian_identity_64");
    group.sample_size(20);
    for (name, exec) in STRATEGIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| field::hamiltonian_identity_check(black_box(&a), &g, exec).unwrap())
        });
    }
    group.finish();
}

fn driven_field(c: &mut Criterion) {
    let p = OscillatorParams::new(1.0, 1.0, 0.1).unwrap();
    let g = FieldGrid::new(32, 32, 0.1).unwrap();
    let tr = oscillator::sample_mean_trajectory(&p, Vector3::new(1.0, 0.0, 0.0), Vector3::zeros(), 0.05, 200).unwrap();
    let coupling = CouplingFunction::canonical(p.beta).unwrap();
    let mut group = c.benchmark_group("driven_field_32");
    group.sample_size(10);
    for (name, exec) in STRATEGIES {
        let run = FieldRun { exec, record_every: usize::MAX, ..FieldRun::default() };
        group.bench_with_input(BenchmarkId::from_parameter(name), &run, |b, run| {
            b.iter(|| field::evolve_field_with_source(&tr, &coupling, &g, &ModeAmplitudes::zeros(&g), run).unwrap())
        });
    }
    group.finish();
}

fn kernel_sweep(c: &mut Criterion) {
    let coupling = CouplingFunction::canonical(0.1).unwrap().with_uv_cutoff(300.0);
    let cfg = QuadratureConfig::default();
    let ts: Vec<f64> = (0..64).map(|i| 1.0 + i as f64 / 16.0).collect();
    let mut group = c.benchmark_group("kernel_convolution_sweep");
    group.sample_size(10);
    for (name, exec) in STRATEGIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| par::map_range(exec, ts.len(), |i| reservoir::kernel_convolution(&coupling, f64::cos, ts[i], &cfg).unwrap()))
        });
    }
    group.finish();
}

fn thermal_mode_sum(c: &mut Criterion) {
    let p = OscillatorParams::new(1.0, 1.0, 0.1).unwrap();
    let mut group = c.benchmark_group("thermal_mode_sum");
    for (name, exec) in STRATEGIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| b.iter(|| oscillator::thermal_mode_sum(&p, black_box(2.0), exec)));
    }
    group.finish();
}

criterion_group!(benches, fft_round_trip, driven_field, kernel_sweep, thermal_mode_sum);
criterion_main!(benches);
