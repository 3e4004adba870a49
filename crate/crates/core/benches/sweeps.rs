//! Sequential against data-parallel evaluation of step-size sweeps.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use pseudosym::composition::recursive_family;
use pseudosym::diagnostics::{final_energy_error, successive_errors, sweep};
use pseudosym::exec::Execution;
use pseudosym::problems::{BaseMethod, FisherProblem, KeplerProblem};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn kepler_energy_sweep(c: &mut Criterion) {
    let kepler = KeplerProblem::new(0.6).unwrap();
    let family = recursive_family(&BaseMethod::Strang.build(&kepler), 2).unwrap();
    let method = family.levels[1].clone();
    let taus: Vec<f64> = (0..5).map(|j| 0.08 * 0.5f64.powi(j)).collect();
    let mut group = c.benchmark_group("kepler_energy_r2");
    group.sample_size(10);
    for (label, exec) in MODES {
        group.bench_function(label, |b| {
            b.iter(|| {
                sweep(black_box(&taus), exec, |tau| {
                    final_energy_error(&kepler, &method, tau, 20.0)
                })
            })
        });
    }
    group.finish();
}

fn fisher_successive_sweep(c: &mut Criterion) {
    let fisher = FisherProblem::new(128).unwrap();
    let family = recursive_family(&BaseMethod::Strang.build(&fisher), 1).unwrap();
    let method = family.levels[0].clone();
    let taus: Vec<f64> = (0..4).map(|j| 0.05 * 0.5f64.powi(j)).collect();
    let mut group = c.benchmark_group("fisher_successive_r1");
    group.sample_size(10);
    for (label, exec) in MODES {
        group.bench_function(label, |b| {
            b.iter(|| successive_errors(&fisher, &method, black_box(&taus), 1.0, exec))
        });
    }
    group.finish();
}

criterion_group!(benches, kepler_energy_sweep, fisher_successive_sweep);
criterion_main!(benches);
