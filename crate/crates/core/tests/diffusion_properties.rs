mod common;

use common::{members, random_graph, random_prices, random_subset, rng};
use ltv_core::diffusion::{
    estimate_profit, exact_node_probabilities, exact_profit, simulate_traced, Campaign, NodeState,
};
use ltv_core::valuation::{ValuationModel, Valuations};
use rand::Rng;

fn model_for(r: &mut impl Rng) -> Valuations {
    if r.random_bool(0.5) {
        ValuationModel::Uniform01.into()
    } else {
        ValuationModel::normal(r.random_range(0.2..0.8), r.random_range(0.05..0.4))
            .unwrap()
            .into()
    }
}

#[test]
fn profit_is_submodular_and_influence_is_monotone() {
    let mut r = rng(11);
    for _ in 0..200 {
        let n = r.random_range(2..=5);
        let g = random_graph(&mut r, n, 0.5, n);
        let v = model_for(&mut r);
        let prices = random_prices(&mut r, n);
        let cost = r.random_range(0.0..0.2);
        let full = 1u32 << n;
        let mut profit = Vec::with_capacity(full as usize);
        let mut influenced = Vec::with_capacity(full as usize);
        for mask in 0..full {
            let c = Campaign::new(&g, &v, members(mask, n), prices.clone(), cost).unwrap();
            profit.push(exact_profit(&c).unwrap());
            let probs =
                exact_node_probabilities(&g, &c.seeds, &c.adoption_probabilities()).unwrap();
            influenced.push(probs.influenced);
        }
        for t in 0..full {
            // every subset s of t
            let mut s = t;
            loop {
                for x in (0..n).filter(|&x| t & (1 << x) == 0) {
                    let gain_s = profit[(s | 1 << x) as usize] - profit[s as usize];
                    let gain_t = profit[(t | 1 << x) as usize] - profit[t as usize];
                    assert!(gain_s >= gain_t - 1e-9, "S={s:b} T={t:b} x={x}");
                }
                for u in (0..n).filter(|&u| t & (1 << u) == 0) {
                    assert!(influenced[s as usize][u] <= influenced[t as usize][u] + 1e-12);
                }
                if s == 0 {
                    break;
                }
                s = (s - 1) & t;
            }
        }
    }
}

#[test]
fn monte_carlo_agrees_with_enumeration() {
    let mut r = rng(5);
    let trials = 30;
    let mut within = 0;
    for t in 0..trials {
        let n = r.random_range(2..=8);
        let g = random_graph(&mut r, n, 0.35, 3);
        let v = model_for(&mut r);
        let mut seeds = random_subset(&mut r, n);
        if seeds.is_empty() {
            seeds.push(0);
        }
        let c = Campaign::new(&g, &v, seeds, random_prices(&mut r, n), 0.01).unwrap();
        let exact = exact_profit(&c).unwrap();
        let est = estimate_profit(&c, 20_000, t).unwrap();
        if (est.mean - exact).abs() <= 4.0 * est.std_error {
            within += 1;
        }
    }
    assert!(within >= trials - 2, "{within}/{trials}");
}

#[test]
fn runs_are_progressive() {
    let mut r = rng(3);
    for k in 0..300 {
        let n = r.random_range(2..=8);
        let g = random_graph(&mut r, n, 0.5, 3);
        let v = model_for(&mut r);
        let seeds = random_subset(&mut r, n);
        let c = Campaign::new(&g, &v, seeds.clone(), random_prices(&mut r, n), 0.05).unwrap();
        let (run, trace) = simulate_traced(&c, k);
        assert!(run.steps <= n);
        let mut influenced_at = vec![None; n];
        let mut adopted_at = vec![None; n];
        for step in &trace {
            for &i in &step.influenced {
                assert!(influenced_at[i].is_none(), "node {i} influenced twice");
                influenced_at[i] = Some(step.step);
            }
            for &i in &step.adopting {
                assert!(adopted_at[i].is_none(), "node {i} adopted twice");
                let since = influenced_at[i].expect("adopts only once influenced");
                assert!(since <= step.step);
                adopted_at[i] = Some(step.step);
            }
        }
        for &s in &seeds {
            assert_eq!(influenced_at[s], Some(0));
        }
        for i in 0..n {
            let expected = match (influenced_at[i], adopted_at[i]) {
                (_, Some(_)) => NodeState::Adopting,
                (Some(_), None) => NodeState::Influenced,
                (None, None) => NodeState::Inactive,
            };
            assert_eq!(run.final_states[i], expected);
        }
        let revenue: f64 = run.adopters().map(|i| c.prices.get(i)).sum();
        assert!((run.realized_profit - (revenue - 0.05 * seeds.len() as f64)).abs() < 1e-12);
    }
}

#[test]
fn estimates_do_not_depend_on_worker_count() {
    let mut r = rng(17);
    let g = random_graph(&mut r, 8, 0.4, 3);
    let v: Valuations = ValuationModel::normal(0.53, 0.14).unwrap().into();
    let c = Campaign::new(&g, &v, vec![0, 3], random_prices(&mut r, 8), 0.01).unwrap();
    let on = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| estimate_profit(&c, 5_000, 99).unwrap())
    };
    let one = on(1);
    for threads in [2, 3, 8] {
        let other = on(threads);
        assert_eq!(one.mean.to_bits(), other.mean.to_bits());
        assert_eq!(one.std_error.to_bits(), other.std_error.to_bits());
    }
}
