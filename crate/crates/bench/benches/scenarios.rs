use std::hint::black_box;

use agentloop::scenarios::{
    build_game_of_life, build_grid_world, build_opinion_spread, build_room, GolConfig, GridWorldConfig, OpinionConfig,
};
use agentloop::{shallow_merge, ValueRecord};
use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion};

fn room(c: &mut Criterion) {
    c.bench_function("room/20 ticks", |b| {
        b.iter_batched(
            build_room,
            |mut env| env.run(black_box(20)).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

fn life(c: &mut Criterion) {
    let mut group = c.benchmark_group("gol/10 ticks");
    for side in [10usize, 20, 40] {
        let cfg = GolConfig {
            width: side,
            height: side,
            seed: 5,
            ..Default::default()
        };
        group.bench_with_input(BenchmarkId::from_parameter(side), &cfg, |b, cfg| {
            b.iter_batched(
                || build_game_of_life(cfg).unwrap(),
                |mut env| env.run(10).unwrap(),
                BatchSize::SmallInput,
            )
        });
    }
    group.finish();
}

fn opinion(c: &mut Criterion) {
    let mut group = c.benchmark_group("opinion/20 ticks");
    group.sample_size(20);
    for bias in [0.0, 5.0] {
        let cfg = OpinionConfig {
            bias,
            seed: 42,
            ..Default::default()
        };
        group.bench_with_input(BenchmarkId::new("bias", bias), &cfg, |b, cfg| {
            b.iter_batched(
                || build_opinion_spread(cfg).unwrap(),
                |mut env| env.run(20).unwrap(),
                BatchSize::SmallInput,
            )
        });
    }
    group.finish();
}

fn gridworld(c: &mut Criterion) {
    let cfg = GridWorldConfig::default();
    c.bench_function("gridworld/100 ticks", |b| {
        b.iter_batched(
            || build_grid_world(&cfg).unwrap(),
            |mut env| env.run(100).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

fn merge(c: &mut Criterion) {
    let base: ValueRecord = (0..64).map(|i| (format!("k{i:02}"), i)).collect();
    let update: ValueRecord = (32..96).map(|i| (format!("k{i:02}"), -i)).collect();
    c.bench_function("shallow_merge/64+64", |b| {
        b.iter(|| shallow_merge(black_box(&base), black_box(&update)))
    });
}

criterion_group!(benches, room, life, opinion, gridworld, merge);
criterion_main!(benches);
