use std::hint::black_box;

use chdbc::timestepping::{integrate, BdfScheme, BdfStepper, FieldState, History};
use chdbc::Problem;
use chdbc_bench::{convergence_disc, double_well, smooth_field};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn single_step(c: &mut Criterion) {
    let mut g = c.benchmark_group("bdf_step");
    for level in [2, 4] {
        let disc = convergence_disc(level);
        let problem = Problem::new(&disc, double_well(0.25));
        let init = problem.initial_state(smooth_field(&disc.mesh), 0.0).unwrap();
        for q in [1, 3] {
            let tau = 0.01;
            let states = (0..q).map(|k| FieldState { t: k as f64 * tau, ..init.clone() });
            let history = History::from_states(q, tau, states).unwrap();
            let stepper = BdfStepper::new(&problem, BdfScheme::new(q).unwrap(), tau).unwrap();
            let id = BenchmarkId::new(format!("bdf{q}"), disc.n());
            g.bench_with_input(id, &history, |b, h| b.iter(|| stepper.step(black_box(h)).unwrap()));
        }
    }
    g.finish();
}

fn short_run(c: &mut Criterion) {
    let disc = convergence_disc(3);
    let problem = Problem::new(&disc, double_well(0.25));
    let init = problem.initial_state(smooth_field(&disc.mesh), 0.0).unwrap();
    let scheme = BdfScheme::new(2).unwrap();
    c.bench_function("integrate_bdf2_817_nodes_20_steps", |b| {
        b.iter(|| {
            let mut quiet = |_: usize, _: &FieldState| Ok(());
            integrate(&problem, &scheme, 0.01, 20, init.clone(), &mut quiet).unwrap()
        })
    });
}

criterion_group!(benches, single_step, short_run);
criterion_main!(benches);
