//! Unbudgeted greedy seed selection (U-Greedy) with CELF lazy evaluation,
//! and the pricing strategies plugged into it.
//!
//! [`u_greedy`] repeatedly adds the candidate with the largest marginal
//! profit and stops when that marginal is no longer above `epsilon`. How a
//! candidate's marginal and seed price are computed is supplied by a
//! [`MarginalProfit`] implementation: [`pricing`] provides All-OMP, FFS and
//! PAGE, [`restricted`] the single-price restricted objective.

pub mod pricing;
pub mod restricted;
pub mod search;

pub use pricing::{optimal_seed_price, run_all_omp, run_ffs, run_page, Pricing, PricingObjective};
pub use restricted::{
    estimate_restricted_profit, restricted_profit, restricted_profit_charged, run_restricted,
    RestrictedObjective, SeedCharging,
};
pub use search::golden_section_max;

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use rayon::prelude::*;

use crate::diffusion::{
    estimate_conditionals, estimate_profit, estimate_spread, exact_conditionals, exact_profit,
    exact_spread, world_count, Campaign, PriceVector, WORLD_LIMIT,
};
use crate::error::{Error, Result};
use crate::graph::WeightedDigraph;
use crate::rng::derive_seed;

/// How expected profits are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfitOracle {
    MonteCarlo {
        simulations: usize,
        /// Runs per conditional (`Y1`/`Y0`) estimate in PAGE.
        conditional_simulations: usize,
        rng_seed: u64,
    },
    /// Possible-world enumeration; limited to small graphs.
    Exact,
}

/// Identifies one evaluation so that it gets its own random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalKey {
    pub iteration: usize,
    pub candidate: Option<usize>,
    pub attempt: u64,
}

impl EvalKey {
    pub fn baseline(iteration: usize) -> Self {
        EvalKey {
            iteration,
            candidate: None,
            attempt: 0,
        }
    }

    pub fn candidate(iteration: usize, node: usize, attempt: u64) -> Self {
        EvalKey {
            iteration,
            candidate: Some(node),
            attempt,
        }
    }

    fn labels(&self) -> [u64; 3] {
        [
            self.iteration as u64,
            self.candidate.map_or(0, |c| c as u64 + 1),
            self.attempt,
        ]
    }
}

impl ProfitOracle {
    pub fn monte_carlo(simulations: usize, rng_seed: u64) -> Self {
        ProfitOracle::MonteCarlo {
            simulations,
            conditional_simulations: simulations,
            rng_seed,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, ProfitOracle::Exact)
    }

    /// Checks that the oracle can evaluate campaigns on `graph`.
    pub fn check(&self, graph: &WeightedDigraph) -> Result<()> {
        match *self {
            ProfitOracle::Exact => {
                let worlds = world_count(graph);
                if worlds > WORLD_LIMIT {
                    return Err(Error::Capacity {
                        worlds,
                        limit: WORLD_LIMIT,
                    });
                }
            }
            ProfitOracle::MonteCarlo {
                simulations,
                conditional_simulations,
                ..
            } => {
                if simulations == 0 || conditional_simulations == 0 {
                    return Err(Error::argument("simulations must be at least 1"));
                }
            }
        }
        Ok(())
    }

    fn stream(rng_seed: u64, key: EvalKey) -> u64 {
        derive_seed(rng_seed, &key.labels())
    }

    pub fn profit(&self, campaign: &Campaign<'_>, key: EvalKey) -> Result<f64> {
        match *self {
            ProfitOracle::Exact => exact_profit(campaign),
            ProfitOracle::MonteCarlo {
                simulations,
                rng_seed,
                ..
            } => Ok(estimate_profit(campaign, simulations, Self::stream(rng_seed, key))?.mean),
        }
    }

    /// `(Y1, Y0)` for seeding `candidate` on top of the campaign.
    pub fn conditionals(
        &self,
        campaign: &Campaign<'_>,
        candidate: usize,
        key: EvalKey,
    ) -> Result<(f64, f64)> {
        match *self {
            ProfitOracle::Exact => exact_conditionals(campaign, candidate),
            ProfitOracle::MonteCarlo {
                conditional_simulations,
                rng_seed,
                ..
            } => {
                let c = estimate_conditionals(
                    campaign,
                    candidate,
                    conditional_simulations,
                    Self::stream(rng_seed, key),
                )?;
                Ok((c.y1.mean, c.y0.mean))
            }
        }
    }

    pub fn spread(&self, graph: &WeightedDigraph, seeds: &[usize], key: EvalKey) -> Result<f64> {
        match *self {
            ProfitOracle::Exact => exact_spread(graph, seeds),
            ProfitOracle::MonteCarlo {
                simulations,
                rng_seed,
                ..
            } => estimate_spread(graph, seeds, simulations, Self::stream(rng_seed, key)),
        }
    }
}

/// Seeds chosen so far and the prices currently quoted.
#[derive(Debug, Clone)]
pub struct GreedyState {
    pub seeds: Vec<usize>,
    pub prices: PriceVector,
    pub iteration: usize,
}

/// Price a candidate would be seeded at and the marginal profit it brings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub price: f64,
    pub marginal: f64,
}

/// Marginal-profit rule driving [`u_greedy`].
pub trait MarginalProfit: Sync {
    /// Prices before any seed is chosen.
    fn initial_prices(&self) -> PriceVector;

    /// Objective value of the current state; computed once per iteration.
    fn baseline(&self, state: &GreedyState, key: EvalKey) -> Result<f64>;

    /// Best seed price and marginal profit of adding `candidate`.
    fn evaluate(
        &self,
        state: &GreedyState,
        baseline: f64,
        candidate: usize,
        key: EvalKey,
    ) -> Result<Evaluation>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreedyOptions {
    pub max_seeds: Option<usize>,
    /// A candidate is selected only if its marginal exceeds this.
    pub epsilon: f64,
    /// CELF lazy evaluation; `false` re-evaluates every candidate each round.
    pub lazy: bool,
}

impl Default for GreedyOptions {
    fn default() -> Self {
        GreedyOptions {
            max_seeds: None,
            epsilon: 0.0,
            lazy: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    /// Seeds in selection order.
    pub seeds: Vec<usize>,
    pub prices: PriceVector,
    pub marginal_profits: Vec<f64>,
    pub cumulative_profit: Vec<f64>,
    pub elapsed_ms: Vec<u64>,
}

impl OptimizationResult {
    pub fn total_profit(&self) -> f64 {
        self.cumulative_profit.last().copied().unwrap_or(0.0)
    }
}

/// Lazy-queue record for one candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateEntry {
    pub node: usize,
    pub cached_price: f64,
    pub cached_marginal: f64,
    /// Iteration whose state the cached values were computed against.
    pub fresh_at: usize,
}

/// Marginals closer than this compare equal and fall back to node order.
const RANK_RESOLUTION: f64 = 1e-12;

fn rank(marginal: f64) -> i64 {
    (marginal / RANK_RESOLUTION).round() as i64
}

/// `Greater` means `a` should be picked before `b`.
fn precedence(a_marginal: f64, a_node: usize, b_marginal: f64, b_node: usize) -> Ordering {
    rank(a_marginal)
        .cmp(&rank(b_marginal))
        .then_with(|| b_node.cmp(&a_node))
}

impl Eq for CandidateEntry {}

impl Ord for CandidateEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        precedence(
            self.cached_marginal,
            self.node,
            other.cached_marginal,
            other.node,
        )
    }
}

impl PartialOrd for CandidateEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Recorder {
    state: GreedyState,
    result: OptimizationResult,
    started: Instant,
    cumulative: f64,
}

impl Recorder {
    fn new(prices: PriceVector) -> Self {
        Recorder {
            state: GreedyState {
                seeds: Vec::new(),
                prices: prices.clone(),
                iteration: 0,
            },
            result: OptimizationResult {
                seeds: Vec::new(),
                prices,
                marginal_profits: Vec::new(),
                cumulative_profit: Vec::new(),
                elapsed_ms: Vec::new(),
            },
            started: Instant::now(),
            cumulative: 0.0,
        }
    }

    fn full(&self, options: &GreedyOptions) -> bool {
        options
            .max_seeds
            .is_some_and(|k| self.state.seeds.len() >= k)
    }

    fn select(&mut self, node: usize, eval: Evaluation) -> Result<()> {
        self.state.seeds.push(node);
        self.state.prices.set(node, eval.price)?;
        self.state.iteration += 1;
        self.cumulative += eval.marginal;
        self.result.seeds.push(node);
        self.result.marginal_profits.push(eval.marginal);
        self.result.cumulative_profit.push(self.cumulative);
        self.result
            .elapsed_ms
            .push(self.started.elapsed().as_millis() as u64);
        self.started = Instant::now();
        Ok(())
    }

    fn finish(mut self) -> OptimizationResult {
        self.result.prices = self.state.prices;
        self.result
    }
}

/// With a Monte-Carlo oracle the winner's marginal is biased upward by the
/// selection itself; it is re-estimated on a fresh stream before deciding.
fn confirm(
    oracle: &ProfitOracle,
    marginal: &dyn MarginalProfit,
    state: &GreedyState,
    baseline: f64,
    node: usize,
    cached: Evaluation,
) -> Result<Evaluation> {
    if oracle.is_exact() {
        Ok(cached)
    } else {
        marginal.evaluate(
            state,
            baseline,
            node,
            EvalKey::candidate(state.iteration, node, 1),
        )
    }
}

fn evaluate_all(
    marginal: &dyn MarginalProfit,
    state: &GreedyState,
    baseline: f64,
    candidates: &[usize],
) -> Result<Vec<Evaluation>> {
    candidates
        .par_iter()
        .map(|&c| {
            marginal.evaluate(
                state,
                baseline,
                c,
                EvalKey::candidate(state.iteration, c, 0),
            )
        })
        .collect()
}

/// Unbudgeted greedy seed selection.
pub fn u_greedy(
    graph: &WeightedDigraph,
    oracle: &ProfitOracle,
    marginal: &dyn MarginalProfit,
    options: &GreedyOptions,
) -> Result<OptimizationResult> {
    oracle.check(graph)?;
    if options.epsilon < 0.0 || options.epsilon.is_nan() {
        return Err(Error::argument(format!(
            "epsilon must be non-negative, got {}",
            options.epsilon
        )));
    }
    let prices = marginal.initial_prices();
    if prices.len() != graph.node_count() {
        return Err(Error::argument("initial prices do not cover the graph"));
    }
    let mut rec = Recorder::new(prices);
    if options.lazy {
        lazy_greedy(graph, oracle, marginal, options, &mut rec)?;
    } else {
        naive_greedy(graph, oracle, marginal, options, &mut rec)?;
    }
    Ok(rec.finish())
}

fn lazy_greedy(
    graph: &WeightedDigraph,
    oracle: &ProfitOracle,
    marginal: &dyn MarginalProfit,
    options: &GreedyOptions,
    rec: &mut Recorder,
) -> Result<()> {
    let candidates: Vec<usize> = (0..graph.node_count()).collect();
    let mut baseline = marginal.baseline(&rec.state, EvalKey::baseline(0))?;
    let evals = evaluate_all(marginal, &rec.state, baseline, &candidates)?;
    let mut queue: BinaryHeap<CandidateEntry> = candidates
        .iter()
        .zip(evals)
        .map(|(&node, e)| CandidateEntry {
            node,
            cached_price: e.price,
            cached_marginal: e.marginal,
            fresh_at: 0,
        })
        .collect();

    while !rec.full(options) {
        let Some(top) = queue.pop() else { break };
        let iteration = rec.state.iteration;
        if top.fresh_at == iteration {
            let cached = Evaluation {
                price: top.cached_price,
                marginal: top.cached_marginal,
            };
            let chosen = confirm(oracle, marginal, &rec.state, baseline, top.node, cached)?;
            if chosen.marginal <= options.epsilon {
                break;
            }
            rec.select(top.node, chosen)?;
            baseline = marginal.baseline(&rec.state, EvalKey::baseline(rec.state.iteration))?;
        } else {
            let e = marginal.evaluate(
                &rec.state,
                baseline,
                top.node,
                EvalKey::candidate(iteration, top.node, 0),
            )?;
            queue.push(CandidateEntry {
                node: top.node,
                cached_price: e.price,
                cached_marginal: e.marginal,
                fresh_at: iteration,
            });
        }
    }
    Ok(())
}

fn naive_greedy(
    graph: &WeightedDigraph,
    oracle: &ProfitOracle,
    marginal: &dyn MarginalProfit,
    options: &GreedyOptions,
    rec: &mut Recorder,
) -> Result<()> {
    let mut remaining: Vec<usize> = (0..graph.node_count()).collect();
    while !rec.full(options) && !remaining.is_empty() {
        let baseline = marginal.baseline(&rec.state, EvalKey::baseline(rec.state.iteration))?;
        let evals = evaluate_all(marginal, &rec.state, baseline, &remaining)?;
        let (best_pos, best) = evals
            .iter()
            .enumerate()
            .max_by(|(i, a), (j, b)| {
                precedence(a.marginal, remaining[*i], b.marginal, remaining[*j])
            })
            .map(|(i, e)| (i, *e))
            .expect("remaining is non-empty");
        let node = remaining[best_pos];
        let chosen = confirm(oracle, marginal, &rec.state, baseline, node, best)?;
        if chosen.marginal <= options.epsilon {
            break;
        }
        rec.select(node, chosen)?;
        remaining.remove(best_pos);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Modular objective: each node is worth a fixed amount.
    struct Fixed(Vec<f64>);

    impl MarginalProfit for Fixed {
        fn initial_prices(&self) -> PriceVector {
            PriceVector::uniform(self.0.len(), 0.5).unwrap()
        }

        fn baseline(&self, state: &GreedyState, _: EvalKey) -> Result<f64> {
            Ok(state.seeds.iter().map(|&s| self.0[s]).sum())
        }

        fn evaluate(&self, _: &GreedyState, _: f64, c: usize, _: EvalKey) -> Result<Evaluation> {
            Ok(Evaluation {
                price: 0.25,
                marginal: self.0[c],
            })
        }
    }

    fn graph(n: usize) -> WeightedDigraph {
        WeightedDigraph::new(n, vec![]).unwrap()
    }

    #[test]
    fn picks_positive_nodes_in_order() {
        let obj = Fixed(vec![0.1, -0.2, 0.3, 0.3, 0.0]);
        for lazy in [true, false] {
            let opts = GreedyOptions {
                lazy,
                ..Default::default()
            };
            let r = u_greedy(&graph(5), &ProfitOracle::Exact, &obj, &opts).unwrap();
            assert_eq!(r.seeds, vec![2, 3, 0]);
            assert_eq!(r.marginal_profits, vec![0.3, 0.3, 0.1]);
            assert!((r.total_profit() - 0.7).abs() < 1e-12);
            assert_eq!(r.prices.as_slice(), &[0.25, 0.5, 0.25, 0.25, 0.5]);
            assert_eq!(r.elapsed_ms.len(), 3);
        }
    }

    #[test]
    fn epsilon_and_budget_stop_early() {
        let obj = Fixed(vec![0.1, 0.5, 0.3]);
        let opts = GreedyOptions {
            epsilon: 0.2,
            ..Default::default()
        };
        let r = u_greedy(&graph(3), &ProfitOracle::Exact, &obj, &opts).unwrap();
        assert_eq!(r.seeds, vec![1, 2]);
        let opts = GreedyOptions {
            max_seeds: Some(1),
            ..Default::default()
        };
        let r = u_greedy(&graph(3), &ProfitOracle::Exact, &obj, &opts).unwrap();
        assert_eq!(r.seeds, vec![1]);
        let opts = GreedyOptions {
            max_seeds: Some(0),
            ..Default::default()
        };
        assert!(u_greedy(&graph(3), &ProfitOracle::Exact, &obj, &opts)
            .unwrap()
            .seeds
            .is_empty());
    }

    #[test]
    fn near_ties_break_by_node_id() {
        let obj = Fixed(vec![0.3, 0.3 + 1e-15, 0.3 - 1e-15]);
        let r = u_greedy(
            &graph(3),
            &ProfitOracle::Exact,
            &obj,
            &GreedyOptions::default(),
        )
        .unwrap();
        assert_eq!(r.seeds, vec![0, 1, 2]);
    }

    #[test]
    fn queue_order() {
        let entry = |node, m| CandidateEntry {
            node,
            cached_price: 0.0,
            cached_marginal: m,
            fresh_at: 0,
        };
        let mut q = BinaryHeap::from(vec![entry(3, 0.1), entry(1, 0.2), entry(0, 0.1)]);
        assert_eq!(q.pop().unwrap().node, 1);
        assert_eq!(q.pop().unwrap().node, 0);
        assert_eq!(q.pop().unwrap().node, 3);
    }

    #[test]
    fn negative_epsilon_rejected() {
        let obj = Fixed(vec![0.1]);
        let opts = GreedyOptions {
            epsilon: -1.0,
            ..Default::default()
        };
        assert!(u_greedy(&graph(1), &ProfitOracle::Exact, &obj, &opts).is_err());
    }

    #[test]
    fn eval_keys_are_distinct() {
        let a = ProfitOracle::stream(1, EvalKey::baseline(0));
        let b = ProfitOracle::stream(1, EvalKey::candidate(0, 0, 0));
        let c = ProfitOracle::stream(1, EvalKey::candidate(0, 0, 1));
        assert!(a != b && b != c && a != c);
    }
}
