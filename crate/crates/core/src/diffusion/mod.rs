//! LT-V diffusion: single runs, Monte-Carlo estimates and exact evaluation.
//!
//! A diffusion starts with every seed influenced at step 0. Each influenced
//! node gets one chance to adopt, succeeding with probability `1 - F_i(p_i)`.
//! An inactive node becomes influenced once the total weight from its
//! adopting in-neighbors reaches its uniform threshold. Only adopters spread
//! influence, and the process stops when no state changes.

mod exact;
mod simulate;

pub use exact::{
    exact_conditionals, exact_node_probabilities, exact_profit, exact_spread, world_count,
    NodeProbabilities, WORLD_LIMIT,
};
pub use simulate::{
    estimate_conditionals, estimate_profit, estimate_profit_with_frequencies, estimate_spread,
    estimate_spread_distribution, simulate_once, simulate_traced, Conditionals,
};

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::graph::WeightedDigraph;
use crate::valuation::Valuations;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeState {
    Inactive,
    Influenced,
    Adopting,
}

/// Quoted price of every node, each in `[0,1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceVector(Vec<f64>);

impl PriceVector {
    pub fn new(prices: Vec<f64>) -> Result<Self> {
        if let Some((i, p)) = prices
            .iter()
            .enumerate()
            .find(|(_, p)| !(0.0..=1.0).contains(*p))
        {
            return Err(Error::argument(format!(
                "price {p} of node {i} is outside [0, 1]"
            )));
        }
        Ok(PriceVector(prices))
    }

    pub fn uniform(node_count: usize, price: f64) -> Result<Self> {
        Self::new(vec![price; node_count])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, node: usize) -> f64 {
        self.0[node]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn set(&mut self, node: usize, price: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&price) {
            return Err(Error::argument(format!("price {price} is outside [0, 1]")));
        }
        self.0[node] = price;
        Ok(())
    }

    /// Copy with `node` repriced to `price`.
    pub fn with_price(&self, node: usize, price: f64) -> Result<Self> {
        let mut out = self.clone();
        out.set(node, price)?;
        Ok(out)
    }
}

/// A seed set and price vector on a graph: the input of every profit evaluation.
#[derive(Debug, Clone)]
pub struct Campaign<'a> {
    pub graph: &'a WeightedDigraph,
    pub valuations: &'a Valuations,
    pub seeds: Vec<usize>,
    pub prices: PriceVector,
    /// Acquisition cost charged per seed, in `[0,1)`.
    pub cost: f64,
}

impl<'a> Campaign<'a> {
    pub fn new(
        graph: &'a WeightedDigraph,
        valuations: &'a Valuations,
        seeds: Vec<usize>,
        prices: PriceVector,
        cost: f64,
    ) -> Result<Self> {
        check_seeds(graph, &seeds)?;
        if prices.len() != graph.node_count() {
            return Err(Error::argument(format!(
                "{} prices for {} nodes",
                prices.len(),
                graph.node_count()
            )));
        }
        if !(0.0..1.0).contains(&cost) {
            return Err(Error::argument(format!(
                "acquisition cost {cost} is outside [0, 1)"
            )));
        }
        valuations.check_len(graph.node_count())?;
        Ok(Campaign {
            graph,
            valuations,
            seeds,
            prices,
            cost,
        })
    }

    /// `1 - F_i(p_i)` for every node.
    pub fn adoption_probabilities(&self) -> Vec<f64> {
        (0..self.graph.node_count())
            .map(|i| 1.0 - self.valuations.model(i).cdf_extended(self.prices.get(i)))
            .collect()
    }

    pub fn seed_cost(&self) -> f64 {
        self.cost * self.seeds.len() as f64
    }

    /// Same campaign with `node` added to the seed set.
    pub fn with_seed(&self, node: usize) -> Result<Self> {
        let mut seeds = self.seeds.clone();
        seeds.push(node);
        check_seeds(self.graph, &seeds)?;
        Ok(Campaign {
            seeds,
            ..self.clone()
        })
    }
}

pub(crate) fn check_seeds(graph: &WeightedDigraph, seeds: &[usize]) -> Result<()> {
    let mut seen = HashSet::with_capacity(seeds.len());
    for &s in seeds {
        if s >= graph.node_count() {
            return Err(Error::argument(format!(
                "seed {s} is not a node (graph has {})",
                graph.node_count()
            )));
        }
        if !seen.insert(s) {
            return Err(Error::argument(format!("seed {s} listed twice")));
        }
    }
    Ok(())
}

/// Monte-Carlo estimate of an expected profit.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfitEstimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(simulations)`.
    pub std_error: f64,
    pub simulations: usize,
    /// Fraction of runs in which each node adopted, when requested.
    pub adoption_freq: Option<Vec<f64>>,
}

impl ProfitEstimate {
    pub(crate) fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let std_error = if n > 1 {
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        ProfitEstimate {
            mean,
            std_error,
            simulations: n,
            adoption_freq: None,
        }
    }
}

/// Newly changed nodes at one time step of a run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StepTrace {
    pub step: usize,
    pub influenced: Vec<usize>,
    pub adopting: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionRun {
    pub final_states: Vec<NodeState>,
    pub realized_profit: f64,
    /// Last time step at which some node changed state.
    pub steps: usize,
}

impl DiffusionRun {
    pub fn adopters(&self) -> impl Iterator<Item = usize> + '_ {
        self.final_states
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == NodeState::Adopting)
            .map(|(i, _)| i)
    }
}

/// Utility of a user with true valuation `valuation` who declares `declared`
/// when quoted `price`: buys at `price` iff the declaration reaches it.
pub fn mechanism_utility(declared: f64, valuation: f64, price: f64) -> f64 {
    if declared >= price {
        valuation - price
    } else {
        0.0
    }
}
