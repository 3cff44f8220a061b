//! Whole-run engine costs at a fixed small budget, per engine kind.

use boxde::{
    run, Crossover, DeParams, EngineConfig, EngineKind, FunctionId, InstrumentSet,
    ObjectiveFunction,
};
use criterion::{black_box, criterion_group, criterion_main, Criterion};

fn config(engine: EngineKind) -> EngineConfig {
    EngineConfig {
        engine,
        params: match engine {
            EngineKind::DeRand1 => {
                Some(DeParams::new(0.5, 0.3, Crossover::Bin).unwrap())
            }
            _ => None,
        },
        n: 50,
        sdis: boxde::SdisKind::Mir,
        max_evaluations: 2050,
        seed: 42,
        h: None,
        archive_size: None,
        p_min: None,
        cotn_sigma_factor: None,
    }
}

fn engine_runs(c: &mut Criterion) {
    let obj = ObjectiveFunction::new(FunctionId::Sphere, 30, 1).unwrap();
    let mut group = c.benchmark_group("run_sphere_n30_budget2050");
    group.sample_size(20);
    for engine in [EngineKind::DeRand1, EngineKind::Shade, EngineKind::Lshade] {
        let cfg = config(engine);
        group.bench_function(engine.to_string(), |b| {
            b.iter(|| run(black_box(&cfg), &obj, InstrumentSet::default()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, engine_runs);
criterion_main!(benches);
