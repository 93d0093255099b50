use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use mmwave_sim::cli::sweep::{run_parallel, run_serial};
use mmwave_sim::cli::{Scenario, ScenarioConfig};
use mmwave_sim::mac::CellSim;
use mmwave_sim::sim::SimTime;

fn small_sweep() -> ScenarioConfig {
    let mut cfg = ScenarioConfig::preset(Scenario::MacLatency);
    cfg.users = vec![10, 50, 100];
    cfg.duration = SimTime::from_ms(200);
    cfg.validate().unwrap();
    cfg
}

fn bench_sweep(c: &mut Criterion) {
    let cfg = small_sweep();
    let cells = cfg.sweep();
    let run = |_: usize, &(u, us, m): &(usize, u64, _)| {
        let r = CellSim::new(cfg.cell(u, us, m)).unwrap().run();
        r.ul_latencies.len()
    };
    let mut g = c.benchmark_group("mac_latency_sweep");
    g.sample_size(10);
    g.bench_function("serial", |b| b.iter(|| black_box(run_serial(&cells, run))));
    g.bench_function("parallel", |b| b.iter(|| black_box(run_parallel(&cells, 0, run))));
    g.finish();
}

criterion_group!(benches, bench_sweep);
criterion_main!(benches);
