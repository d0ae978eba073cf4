//! Exact evaluation by possible-world enumeration.
//!
//! A possible world fixes a live-edge selection (each node keeps at most one
//! in-edge, `(j,i)` with probability `w(j,i)` and none with the leftover
//! mass) and a node coloring (black with probability `1 - F_i(p_i)`). A node
//! is influenced when it is a seed or is reached from a black seed along
//! live edges whose intermediate nodes are all black; it adopts when it is
//! influenced and black. Enumeration is exponential, so graphs are capped at
//! [`WORLD_LIMIT`] worlds.

use super::{check_seeds, Campaign};
use crate::error::{Error, Result};
use crate::graph::WeightedDigraph;

/// Largest `2^n * Π_j (indegree(j) + 1)` accepted by the exact evaluators.
pub const WORLD_LIMIT: f64 = 1e7;

/// Number of possible worlds of `graph`.
pub fn world_count(graph: &WeightedDigraph) -> f64 {
    (0..graph.node_count())
        .map(|j| 2.0 * (graph.in_degree(j) + 1) as f64)
        .product()
}

/// Per-node probabilities of ending influenced and ending adopting.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeProbabilities {
    pub influenced: Vec<f64>,
    pub adopting: Vec<f64>,
}

const UNKNOWN: u8 = 0;
const ON_PATH: u8 = 1;
const DONE: u8 = 2;

/// Enumerates every world for the given seeds and per-node black
/// probabilities.
pub fn exact_node_probabilities(
    graph: &WeightedDigraph,
    seeds: &[usize],
    black: &[f64],
) -> Result<NodeProbabilities> {
    check_seeds(graph, seeds)?;
    let n = graph.node_count();
    if black.len() != n {
        return Err(Error::argument(format!(
            "{} black probabilities for {n} nodes",
            black.len()
        )));
    }
    let worlds = world_count(graph);
    if worlds > WORLD_LIMIT {
        return Err(Error::Capacity {
            worlds,
            limit: WORLD_LIMIT,
        });
    }
    let mut is_seed = vec![false; n];
    for &s in seeds {
        is_seed[s] = true;
    }

    // live-edge choices: one in-neighbor or none (index == in_degree)
    let none_prob: Vec<f64> = (0..n)
        .map(|j| (1.0 - graph.in_weight_sum(j)).max(0.0))
        .collect();
    let mut digit = vec![0usize; n];
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut status = vec![UNKNOWN; n];
    // probability of being influenced given the live edges
    let mut reach = vec![0.0; n];
    let mut path = Vec::with_capacity(n);

    let mut influenced = vec![0.0; n];
    let mut adopting = vec![0.0; n];

    loop {
        let mut config_prob = 1.0;
        for j in 0..n {
            let ins = graph.in_neighbors(j);
            if digit[j] < ins.len() {
                parent[j] = Some(ins[digit[j]].0);
                config_prob *= ins[digit[j]].1;
            } else {
                parent[j] = None;
                config_prob *= none_prob[j];
            }
        }

        if config_prob > 0.0 {
            // Each node has at most one live in-edge, so it is influenced
            // exactly when every node on its chain up to the nearest seed is
            // black. Colors are independent, hence the product.
            status.fill(UNKNOWN);
            for i in 0..n {
                if status[i] != UNKNOWN {
                    continue;
                }
                path.clear();
                let mut cur = i;
                // first node on the chain whose answer is known, if any
                let anchor = loop {
                    match status[cur] {
                        DONE => break Some(cur),
                        ON_PATH => break None,
                        _ => {}
                    }
                    if is_seed[cur] {
                        status[cur] = DONE;
                        reach[cur] = 1.0;
                        break Some(cur);
                    }
                    status[cur] = ON_PATH;
                    path.push(cur);
                    match parent[cur] {
                        Some(p) => cur = p,
                        None => break None,
                    }
                };
                let mut above = anchor.map_or(0.0, |a| black[a] * reach[a]);
                for &k in path.iter().rev() {
                    reach[k] = above;
                    status[k] = DONE;
                    above *= black[k];
                }
            }
            for i in 0..n {
                influenced[i] += config_prob * reach[i];
                adopting[i] += config_prob * reach[i] * black[i];
            }
        }

        // advance the mixed-radix counter
        let mut j = 0;
        loop {
            if j == n {
                return Ok(NodeProbabilities {
                    influenced,
                    adopting,
                });
            }
            digit[j] += 1;
            if digit[j] <= graph.in_degree(j) {
                break;
            }
            digit[j] = 0;
            j += 1;
        }
    }
}

/// Exact expected profit `Σ_i p_i ap(i) - c_a |S|`.
pub fn exact_profit(campaign: &Campaign<'_>) -> Result<f64> {
    if campaign.seeds.is_empty() {
        return Ok(0.0);
    }
    let probs = exact_node_probabilities(
        campaign.graph,
        &campaign.seeds,
        &campaign.adoption_probabilities(),
    )?;
    Ok(revenue(campaign, &probs.adopting, None) - campaign.seed_cost())
}

/// Exact LT spread: expected adopters when every influenced node adopts.
pub fn exact_spread(graph: &WeightedDigraph, seeds: &[usize]) -> Result<f64> {
    let probs = exact_node_probabilities(graph, seeds, &vec![1.0; graph.node_count()])?;
    Ok(probs.adopting.iter().sum())
}

/// Exact `(Y1, Y0)`: expected profit from nodes other than `candidate` when
/// it is seeded and adopts, resp. does not adopt. Includes the cost of the
/// campaign's existing seeds, not the candidate's.
pub fn exact_conditionals(campaign: &Campaign<'_>, candidate: usize) -> Result<(f64, f64)> {
    let extended = campaign.with_seed(candidate)?;
    let mut black = campaign.adoption_probabilities();
    let mut one = |b: f64| -> Result<f64> {
        black[candidate] = b;
        let probs = exact_node_probabilities(campaign.graph, &extended.seeds, &black)?;
        Ok(revenue(campaign, &probs.adopting, Some(candidate)) - campaign.seed_cost())
    };
    let y1 = one(1.0)?;
    let y0 = one(0.0)?;
    Ok((y1, y0))
}

fn revenue(campaign: &Campaign<'_>, adopting: &[f64], skip: Option<usize>) -> f64 {
    adopting
        .iter()
        .enumerate()
        .filter(|&(i, _)| Some(i) != skip)
        .map(|(i, a)| campaign.prices.get(i) * a)
        .sum()
}
