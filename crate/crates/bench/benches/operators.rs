//! Per-operator costs: SDIS correction, cosine disruptiveness, objective
//! evaluation, and the closed-form recursion.

use boxde::theory::violation_recursion;
use boxde::{
    apply_sdis, cosine_similarity, FunctionId, Objective, ObjectiveFunction, RngStream, Sdis,
    SdisKind,
};
use boxde_bench::correction_fixture;
use criterion::{black_box, criterion_group, criterion_main, Criterion};

fn sdis_apply(c: &mut Criterion) {
    let (domain, target, trial) = correction_fixture(30, 0.2, 7);
    let mut group = c.benchmark_group("sdis_apply_n30");
    for kind in SdisKind::ALL {
        group.bench_function(kind.name(), |b| {
            let mut rng = RngStream::new(11);
            b.iter(|| {
                apply_sdis(
                    Sdis::new(kind),
                    black_box(&domain),
                    black_box(&target),
                    black_box(&trial),
                    &mut rng,
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

fn cosine(c: &mut Criterion) {
    let mut rng = RngStream::new(3);
    let u: Vec<f64> = (0..30).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
    let v: Vec<f64> = (0..30).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
    c.bench_function("cosine_similarity_n30", |b| {
        b.iter(|| cosine_similarity(black_box(&u), black_box(&v)).unwrap())
    });
}

fn objective_eval(c: &mut Criterion) {
    let mut group = c.benchmark_group("objective_eval_n30");
    for id in [FunctionId::F0, FunctionId::Sphere, FunctionId::Katsuura] {
        let obj = ObjectiveFunction::new(id, 30, 1).unwrap();
        let mut rng = RngStream::new(5);
        let x = obj.domain().sample_uniform(&mut rng);
        group.bench_function(id.name(), |b| {
            let mut eval_rng = RngStream::new(6);
            b.iter(|| obj.eval(black_box(&x), &mut eval_rng))
        });
    }
    group.finish();
}

fn recursion(c: &mut Criterion) {
    c.bench_function("violation_recursion_100", |b| {
        b.iter(|| violation_recursion(black_box(0.775), 100).unwrap())
    });
}

criterion_group!(benches, sdis_apply, cosine, objective_eval, recursion);
criterion_main!(benches);
