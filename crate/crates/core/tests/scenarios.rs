#[path = "support/opinion_oracle.rs"]
mod opinion_oracle;

use agentloop::scenarios::gridworld::Arena;
use agentloop::scenarios::life::grid_from_state;
use agentloop::scenarios::{
    build_game_of_life, build_grid_world, build_opinion_spread, build_room, conway_oracle, opinion_stats, GolConfig,
    GridWorldConfig, OpinionConfig, OpinionTick,
};

const ODD_TICK: [&str; 3] = [
    "paranoid: Thanks for locking the door!",
    "claustrophobe: Request: unlock door",
    "porter: Unlock door",
];
const EVEN_TICK: [&str; 3] = [
    "paranoid: Request: lock door",
    "claustrophobe: Thanks for unlocking the door!",
    "porter: Lock door",
];

#[test]
fn room_alternates_with_period_two() {
    let trace = build_room().run(20).unwrap();
    for record in &trace.ticks {
        let odd = record.tick % 2 == 1;
        let logs: Vec<_> = record.log_events().collect();
        assert_eq!(logs, if odd { ODD_TICK } else { EVEN_TICK }, "tick {}", record.tick);
        assert!(record.state_after["door"]["locked"] == !odd);
        assert_eq!(record.state_after["requests"].as_list().map(<[_]>::len), Some(0));
    }
}

#[test]
fn life_matches_oracle_on_random_boards() {
    for seed in [1, 2, 3] {
        let cfg = GolConfig {
            seed,
            ..Default::default()
        };
        let mut expected = cfg.initial_grid();
        let mut env = build_game_of_life(&cfg).unwrap();
        for _ in 0..20 {
            env.tick().unwrap();
            expected = conway_oracle(&expected);
            assert_eq!(grid_from_state(env.state()).unwrap(), expected, "seed {seed}");
        }
    }
}

#[test]
fn opinion_matches_golden_counts() {
    let golden: Vec<OpinionTick> =
        serde_json::from_str(include_str!("golden/opinion_seed42_bias5_ticks20.json")).unwrap();

    let oracle: Vec<(usize, usize)> = opinion_oracle::simulate(&opinion_oracle::default_society(), 5.0, 42, 20);
    let frozen: Vec<(usize, usize)> = golden.iter().map(|t| (t.true_count, t.false_count)).collect();
    assert_eq!(oracle, frozen, "golden file drifted from the oracle");

    let cfg = OpinionConfig {
        seed: 42,
        bias: 5.0,
        ..Default::default()
    };
    let trace = build_opinion_spread(&cfg).unwrap().run(20).unwrap();
    assert_eq!(opinion_stats(&trace).unwrap(), golden);
}

#[test]
fn opinion_matches_oracle_across_seeds_and_biases() {
    let society = opinion_oracle::default_society();
    for seed in 0..10 {
        for bias in [0.0, 0.5, 2.0] {
            let cfg = OpinionConfig {
                seed,
                bias,
                ..Default::default()
            };
            let stats = opinion_stats(&build_opinion_spread(&cfg).unwrap().run(15).unwrap()).unwrap();
            let got: Vec<_> = stats.iter().map(|t| (t.true_count, t.false_count)).collect();
            assert_eq!(
                got,
                opinion_oracle::simulate(&society, bias, seed, 15),
                "seed {seed} bias {bias}"
            );
        }
    }
}

#[test]
fn gridworld_ledger_balances() {
    let cfg = GridWorldConfig {
        seed: 11,
        ..Default::default()
    };
    let mut env = build_grid_world(&cfg).unwrap();
    let trace = env.run(300).unwrap();
    let arena = Arena::from_state(env.state()).unwrap();
    for (id, stats) in &arena.agents {
        let events: Vec<_> = trace.ticks.iter().flat_map(|t| t.log_events()).collect();
        let coins = events
            .iter()
            .filter(|e| **e == format!("{id}: collects a coin"))
            .count() as i64;
        let bankrupt = events
            .iter()
            .filter(|e| e.starts_with(&format!("{id}: bankrupt")))
            .count() as i64;
        assert_eq!(stats.coins, coins - 100 * bankrupt, "{id}");
    }
}
