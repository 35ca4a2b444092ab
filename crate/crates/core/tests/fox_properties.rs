use foxann::cli::{sphere, SPHERE_REFERENCE_SEED};
use foxann::fox::{self, move_agent, Branch, ExplorationRule, FoxParams, SearchBounds};
use foxann::seed;
use proptest::prelude::*;

fn small_params(pop: usize, iters: usize) -> FoxParams {
    FoxParams {
        population_size: pop,
        max_iterations: iters,
        ..FoxParams::default()
    }
}

fn rastrigin(x: &[f64]) -> f64 {
    x.iter()
        .map(|v| v * v - 10.0 * (2.0 * std::f64::consts::PI * v).cos() + 10.0)
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn every_agent_stays_inside_the_box(
        lo in -10.0f64..0.0,
        width in 0.1f64..10.0,
        dim in 1usize..6,
        seed in any::<u64>(),
        multiplicative in any::<bool>(),
    ) {
        let bounds = SearchBounds::uniform(dim, lo, lo + width).unwrap();
        let params = FoxParams {
            exploration: if multiplicative { ExplorationRule::Multiplicative } else { ExplorationRule::GaussianWalk },
            ..small_params(8, 12)
        };
        let mut seen = 0;
        fox::optimize_observed(rastrigin, &bounds, &params, seed, |_, pop| {
            seen += 1;
            for p in &pop.positions {
                assert!(bounds.contains(p), "{p:?} escaped [{lo}, {}]", lo + width);
            }
            assert!(bounds.contains(&pop.best_position));
        })
        .unwrap();
        prop_assert_eq!(seen, 12);
    }

    #[test]
    fn history_never_increases(seed in any::<u64>(), dim in 1usize..5) {
        let bounds = SearchBounds::uniform(dim, -5.12, 5.12).unwrap();
        let out = fox::optimize(rastrigin, &bounds, &small_params(10, 25), seed).unwrap();
        prop_assert_eq!(out.fitness_history.len(), 25);
        prop_assert!(out.fitness_history.windows(2).all(|w| w[1] <= w[0]));
        prop_assert_eq!(out.best_fitness, *out.fitness_history.last().unwrap());
        prop_assert_eq!(out.best_fitness, rastrigin(&out.best_position));
    }
}

#[test]
fn same_seed_same_bits_on_any_pool_size() {
    let bounds = SearchBounds::uniform(7, -3.0, 3.0).unwrap();
    let params = small_params(16, 40);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| fox::optimize(rastrigin, &bounds, &params, 99).unwrap())
    };
    let one = run(1);
    for threads in [2, 4, 7] {
        let other = run(threads);
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&one.best_position), bits(&other.best_position));
        assert_eq!(bits(&one.fitness_history), bits(&other.fitness_history));
    }
    assert_ne!(
        fox::optimize(rastrigin, &bounds, &params, 100).unwrap().fitness_history,
        one.fitness_history
    );
}

#[test]
fn origin_is_a_fixed_point_of_the_multiplicative_rule() {
    let params = FoxParams {
        exploration: ExplorationRule::Multiplicative,
        ..FoxParams::default()
    };
    let zero = vec![0.0; 4];
    for k in 0..500u64 {
        let mut rng = seed::rng(k);
        let m = move_agent(&zero, 0.37, (k % 100) as usize, 100, &params, &mut rng);
        assert!(m.position.iter().all(|&x| x == 0.0), "{m:?}");
    }
    // once the incumbent sits at the optimum nothing can displace it
    let bounds = SearchBounds::uniform(4, 0.0, 1.0).unwrap();
    let out = fox::optimize(|x| x.iter().sum::<f64>(), &bounds, &small_params(5, 30), 1).unwrap();
    assert!(out.best_fitness < 1e-6, "{}", out.best_fitness);
}

#[test]
fn branch_choice_is_a_fair_coin() {
    let params = FoxParams::default();
    let best = [1.0, -2.0, 0.5];
    let n = 20_000;
    let exploit = (0..n)
        .filter(|&k| {
            let mut rng = seed::rng(seed::derive(5, &[k]));
            move_agent(&best, 0.1, 3, 100, &params, &mut rng).branch == Branch::Exploitation
        })
        .count() as f64;
    let expected = n as f64 / 2.0;
    let explore = n as f64 - exploit;
    let chi2 = (exploit - expected).powi(2) / expected + (explore - expected).powi(2) / expected;
    // one degree of freedom, p = 0.001
    assert!(chi2 < 10.83, "chi2 = {chi2}, exploit = {exploit}");
}

#[test]
fn sphere_reference_run_is_reproduced() {
    let fixture = include_str!("fixtures/sphere_reference.csv");
    let bounds = SearchBounds::uniform(5, -5.0, 5.0).unwrap();
    let out = fox::optimize(sphere, &bounds, &FoxParams::default(), SPHERE_REFERENCE_SEED).unwrap();

    let mut lines = fixture.lines();
    assert_eq!(lines.next(), Some("iteration,best_fitness"));
    let recorded: Vec<f64> = lines
        .map(|l| l.split_once(',').unwrap().1.parse().unwrap())
        .collect();
    assert_eq!(recorded.len(), 100);
    for (i, (got, want)) in out.fitness_history.iter().zip(&recorded).enumerate() {
        assert_eq!(got.to_bits(), want.to_bits(), "iteration {}", i + 1);
    }
    assert!(out.best_fitness <= 1e-3, "{}", out.best_fitness);
}
