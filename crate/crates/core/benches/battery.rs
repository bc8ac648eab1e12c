use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use imprand::analysis::{default_battery, gamma_family, run_battery_with, BatteryConfig, IntervalEstimator};
use imprand::martingale::{classify_process_with, from_multiplier, ConstantMultiplier, MultiplierProcess};
use imprand::par::Exec;
use imprand::sequence::{generate, GeneratorKind, GeneratorSpec};
use imprand::{ForecastingSystem, Gamble, LowerExpectation, Pmf, Rational, SampleSpace};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn space() -> SampleSpace {
    SampleSpace::letters(3)
}

fn pmf(w: &[(i64, i64)]) -> Pmf {
    Pmf::from_fracs(&space(), w).unwrap()
}

fn envelope() -> ForecastingSystem {
    let vertices = vec![pmf(&[(0, 1), (1, 2), (1, 2)]), pmf(&[(1, 2), (0, 1), (1, 2)]), pmf(&[(1, 2), (1, 2), (0, 1)])];
    ForecastingSystem::stationary(LowerExpectation::envelope(vertices).unwrap()).unwrap()
}

fn interval(c: &mut Criterion) {
    let f = Gamble::from_ints(&space(), &[1, -2, 3]).unwrap();
    let step = Rational::frac(1, 16);
    let kind = GeneratorKind::Cyclic(vec![pmf(&[(0, 1), (1, 2), (1, 2)]), pmf(&[(1, 2), (1, 2), (0, 1)])]);
    let prefix = generate(&GeneratorSpec { kind, length: 5000, seed: 1 }).unwrap();
    let estimator = IntervalEstimator::new(&f, gamma_family(&f).as_ref(), &step, &BatteryConfig::default()).unwrap();
    let mut group = c.benchmark_group("interval_scan");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new("scan", name), |b| b.iter(|| estimator.scan(&prefix, exec).unwrap()));
        group.bench_function(BenchmarkId::new("compile", name), |b| {
            b.iter(|| IntervalEstimator::new_with(exec, &f, gamma_family(&f).as_ref(), &step, &BatteryConfig::default()).unwrap())
        });
    }
    group.finish();
}

fn exact_battery(c: &mut Criterion) {
    let sys = ForecastingSystem::stationary(LowerExpectation::vacuous(&space())).unwrap();
    let f = Gamble::from_ints(&space(), &[1, -2, 3]).unwrap();
    let battery = default_battery(&sys, &BatteryConfig::with_gambles(vec![f])).unwrap();
    let p = pmf(&[(1, 2), (1, 4), (1, 4)]);
    let prefix = generate(&GeneratorSpec { kind: GeneratorKind::Iid(p), length: 500, seed: 2 }).unwrap();
    let mut group = c.benchmark_group("exact_battery");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| run_battery_with(exec, &prefix, &sys, &battery).unwrap()));
    }
    group.finish();
}

fn classify(c: &mut Criterion) {
    let sys = envelope();
    let d: MultiplierProcess = Arc::new(ConstantMultiplier::new(Gamble::from_fracs(&space(), &[(1, 2), (3, 2), (1, 2)]).unwrap()).unwrap());
    let mut group = c.benchmark_group("classify");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| classify_process_with(exec, &from_multiplier(d.clone()), &sys, 6).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, interval, exact_battery, classify);
criterion_main!(benches);
