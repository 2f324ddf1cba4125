//! Benchmarks for the hot paths: trace synthesis, density estimation, and
//! the closed-form layer.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use hetsim_core::analytic::{self, DetectorKind};
use hetsim_core::model::{NoiseHypothesis, PhaseMode};
use hetsim_core::scenario::{ScenarioDoc, SignalStateKey};
use hetsim_core::simulate::{synth_trace, Scenario};
use hetsim_core::spectral::{self, Window};

fn blocked_scenario(duration_s: f64) -> Scenario {
    let doc = ScenarioDoc {
        signal_power_w: 0.0,
        signal_state: SignalStateKey::Vacuum,
        duration_s,
        seed: 42,
        ..ScenarioDoc::default()
    };
    Scenario::from_doc(&doc).unwrap()
}

fn bench_synthesis(c: &mut Criterion) {
    let mut group = c.benchmark_group("synth_trace");
    for ms in [2u64, 10] {
        let sc = blocked_scenario(ms as f64 * 1e-3);
        let n = (sc.sample_rate_hz * sc.duration_s) as u64;
        group.throughput(Throughput::Elements(n));
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{ms}ms")),
            &sc,
            |b, sc| b.iter(|| synth_trace(sc).unwrap()),
        );
    }
    group.finish();
}

fn bench_psd(c: &mut Criterion) {
    let sc = blocked_scenario(0.01);
    let tr = synth_trace(&sc).unwrap();
    let mut group = c.benchmark_group("psd_estimate");
    group.throughput(Throughput::Elements(tr.len() as u64));
    for window in [Window::Hann, Window::Rect] {
        group.bench_with_input(
            BenchmarkId::from_parameter(window.name()),
            &window,
            |b, &w| b.iter(|| spectral::psd_estimate(&tr, 1e3, 2, w, sc.cfg.gain).unwrap()),
        );
    }
    group.finish();
}

fn bench_analytic(c: &mut Criterion) {
    c.bench_function("nf_prediction_matrix", |b| {
        b.iter(analytic::nf_prediction_matrix)
    });
    c.bench_function("nf_predicted_locked_cancel", |b| {
        b.iter(|| {
            analytic::nf_predicted(
                DetectorKind::BloHeterodyne,
                PhaseMode::Locked { k: 0 },
                NoiseHypothesis::VacuumCancellation,
            )
        })
    });
}

criterion_group!(benches, bench_synthesis, bench_psd, bench_analytic);
criterion_main!(benches);
