//! Restricted profit maximization: every valuation equals one price `p`, so
//! every influenced node adopts and the objective depends only on the seeds.

use super::{
    u_greedy, EvalKey, Evaluation, GreedyOptions, GreedyState, MarginalProfit, OptimizationResult,
    ProfitOracle,
};
use crate::diffusion::{estimate_spread_distribution, PriceVector, ProfitEstimate};
use crate::error::{Error, Result};
use crate::graph::WeightedDigraph;

/// What seeds pay in the restricted setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedCharging {
    /// Seeds get free samples: `p h(S) - (p + c_a) |S|`.
    FreeSamples,
    /// Seeds pay `p` as well: `p h(S) - c_a |S|`.
    FullPrice,
}

fn check_price(price: f64) -> Result<()> {
    if !(price > 0.0 && price <= 1.0) {
        return Err(Error::argument(format!(
            "restricted price {price} is outside (0, 1]"
        )));
    }
    Ok(())
}

/// `p h_L(S) - (p + c_a) |S|`.
pub fn restricted_profit(
    graph: &WeightedDigraph,
    seeds: &[usize],
    price: f64,
    cost: f64,
    oracle: &ProfitOracle,
    key: EvalKey,
) -> Result<f64> {
    restricted_profit_charged(
        graph,
        seeds,
        price,
        cost,
        SeedCharging::FreeSamples,
        oracle,
        key,
    )
}

pub fn restricted_profit_charged(
    graph: &WeightedDigraph,
    seeds: &[usize],
    price: f64,
    cost: f64,
    charging: SeedCharging,
    oracle: &ProfitOracle,
    key: EvalKey,
) -> Result<f64> {
    check_price(price)?;
    if seeds.is_empty() {
        return Ok(0.0);
    }
    let spread = oracle.spread(graph, seeds, key)?;
    let per_seed = match charging {
        SeedCharging::FreeSamples => price + cost,
        SeedCharging::FullPrice => cost,
    };
    Ok(price * spread - per_seed * seeds.len() as f64)
}

/// Monte-Carlo estimate of the restricted profit with its standard error.
pub fn estimate_restricted_profit(
    graph: &WeightedDigraph,
    seeds: &[usize],
    price: f64,
    cost: f64,
    charging: SeedCharging,
    simulations: usize,
    rng_seed: u64,
) -> Result<ProfitEstimate> {
    check_price(price)?;
    let spread = estimate_spread_distribution(graph, seeds, simulations, rng_seed)?;
    let per_seed = match charging {
        SeedCharging::FreeSamples => price + cost,
        SeedCharging::FullPrice => cost,
    };
    Ok(ProfitEstimate {
        mean: price * spread.mean - per_seed * seeds.len() as f64,
        std_error: price * spread.std_error,
        simulations,
        adoption_freq: None,
    })
}

pub struct RestrictedObjective<'a> {
    graph: &'a WeightedDigraph,
    price: f64,
    cost: f64,
    charging: SeedCharging,
    oracle: ProfitOracle,
}

impl<'a> RestrictedObjective<'a> {
    pub fn new(
        graph: &'a WeightedDigraph,
        price: f64,
        cost: f64,
        charging: SeedCharging,
        oracle: ProfitOracle,
    ) -> Result<Self> {
        check_price(price)?;
        if !(0.0..1.0).contains(&cost) {
            return Err(Error::argument(format!(
                "acquisition cost {cost} is outside [0, 1)"
            )));
        }
        Ok(RestrictedObjective {
            graph,
            price,
            cost,
            charging,
            oracle,
        })
    }

    fn seed_price(&self) -> f64 {
        match self.charging {
            SeedCharging::FreeSamples => 0.0,
            SeedCharging::FullPrice => self.price,
        }
    }
}

impl MarginalProfit for RestrictedObjective<'_> {
    fn initial_prices(&self) -> PriceVector {
        PriceVector::uniform(self.graph.node_count(), self.price).expect("price checked")
    }

    fn baseline(&self, state: &GreedyState, key: EvalKey) -> Result<f64> {
        restricted_profit_charged(
            self.graph,
            &state.seeds,
            self.price,
            self.cost,
            self.charging,
            &self.oracle,
            key,
        )
    }

    fn evaluate(
        &self,
        state: &GreedyState,
        baseline: f64,
        candidate: usize,
        key: EvalKey,
    ) -> Result<Evaluation> {
        let mut seeds = state.seeds.clone();
        seeds.push(candidate);
        let value = restricted_profit_charged(
            self.graph,
            &seeds,
            self.price,
            self.cost,
            self.charging,
            &self.oracle,
            key,
        )?;
        Ok(Evaluation {
            price: self.seed_price(),
            marginal: value - baseline,
        })
    }
}

/// U-Greedy on the restricted objective with free samples for seeds.
pub fn run_restricted(
    graph: &WeightedDigraph,
    price: f64,
    cost: f64,
    oracle: &ProfitOracle,
    options: &GreedyOptions,
) -> Result<OptimizationResult> {
    let objective =
        RestrictedObjective::new(graph, price, cost, SeedCharging::FreeSamples, *oracle)?;
    u_greedy(graph, oracle, &objective, options)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    fn star() -> WeightedDigraph {
        let edges = (1..6)
            .map(|leaf| Edge {
                src: 0,
                dst: leaf,
                weight: 0.5,
            })
            .collect();
        WeightedDigraph::new(6, edges).unwrap()
    }

    /// Node 0 reaches 89 others with certainty; 10 nodes are isolated.
    fn broadcaster() -> WeightedDigraph {
        let edges = (1..90)
            .map(|leaf| Edge {
                src: 0,
                dst: leaf,
                weight: 1.0,
            })
            .collect();
        WeightedDigraph::new(100, edges).unwrap()
    }

    #[test]
    fn empty_set_is_zero() {
        let r = restricted_profit(
            &star(),
            &[],
            0.7,
            0.1,
            &ProfitOracle::Exact,
            EvalKey::baseline(0),
        );
        assert_eq!(r.unwrap(), 0.0);
    }

    #[test]
    fn star_hub() {
        let v = restricted_profit(
            &star(),
            &[0],
            1.0,
            0.001,
            &ProfitOracle::Exact,
            EvalKey::baseline(0),
        )
        .unwrap();
        assert!((v - 2.499).abs() < 1e-12);
    }

    #[test]
    fn greedy_on_star_picks_only_the_hub() {
        // brute force over all 64 seed sets
        let g = star();
        let mut best = (f64::NEG_INFINITY, 0u32);
        for mask in 0u32..64 {
            let seeds: Vec<usize> = (0..6).filter(|i| mask & (1 << i) != 0).collect();
            let v = restricted_profit(
                &g,
                &seeds,
                1.0,
                0.001,
                &ProfitOracle::Exact,
                EvalKey::baseline(0),
            )
            .unwrap();
            if v > best.0 + 1e-12 {
                best = (v, mask);
            }
        }
        assert_eq!(best.1, 1);
        let r = run_restricted(
            &g,
            1.0,
            0.001,
            &ProfitOracle::Exact,
            &GreedyOptions::default(),
        )
        .unwrap();
        assert_eq!(r.seeds, vec![0]);
        assert!((r.total_profit() - 2.499).abs() < 1e-12);
        assert_eq!(r.prices.get(0), 0.0);
        assert_eq!(r.prices.get(1), 1.0);
    }

    #[test]
    fn full_price_variant_is_not_monotone() {
        let g = broadcaster();
        let oracle = ProfitOracle::monte_carlo(200, 1);
        let key = EvalKey::baseline(0);
        let single =
            restricted_profit_charged(&g, &[0], 0.5, 0.1, SeedCharging::FullPrice, &oracle, key)
                .unwrap();
        let everyone: Vec<usize> = (0..100).collect();
        let all = restricted_profit_charged(
            &g,
            &everyone,
            0.5,
            0.1,
            SeedCharging::FullPrice,
            &oracle,
            key,
        )
        .unwrap();
        assert!((single - 44.9).abs() < 1e-9);
        assert!((all - 40.0).abs() < 1e-9);
        assert!(single > all);

        let free = restricted_profit(&g, &everyone, 0.5, 0.1, &oracle, key).unwrap();
        assert!((free + 10.0).abs() < 1e-9);
    }

    #[test]
    fn estimate_matches_exact_on_a_deterministic_graph() {
        let g = broadcaster();
        let e =
            estimate_restricted_profit(&g, &[0, 95], 0.5, 0.1, SeedCharging::FreeSamples, 50, 3)
                .unwrap();
        assert!((e.mean - (0.5 * 91.0 - 1.2)).abs() < 1e-9);
        assert_eq!(e.std_error, 0.0);
    }

    #[test]
    fn price_must_be_positive() {
        assert!(restricted_profit(
            &star(),
            &[0],
            0.0,
            0.1,
            &ProfitOracle::Exact,
            EvalKey::baseline(0)
        )
        .is_err());
        assert!(run_restricted(
            &star(),
            1.5,
            0.1,
            &ProfitOracle::Exact,
            &GreedyOptions::default()
        )
        .is_err());
    }
}
