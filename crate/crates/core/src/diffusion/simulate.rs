use rand::Rng;
use rayon::prelude::*;

use super::{check_seeds, Campaign, DiffusionRun, NodeState, ProfitEstimate, StepTrace};
use crate::error::{Error, Result};
use crate::graph::WeightedDigraph;
use crate::rng::{derive_seed, run_rng};

/// Runs per parallel work item; each run still owns its own stream.
const BATCH_SIZE: usize = 64;

/// Reusable per-worker buffers. Node data is valid only where
/// `stamp[i] == generation`, so resetting between runs is O(1).
pub(crate) struct Scratch {
    generation: u32,
    stamp: Vec<u32>,
    state: Vec<NodeState>,
    influence: Vec<f64>,
    threshold: Vec<f64>,
    touched_at: Vec<usize>,
    touched: Vec<usize>,
    frontier: Vec<usize>,
    next: Vec<usize>,
    adopters: Vec<usize>,
}

impl Scratch {
    pub(crate) fn new(n: usize) -> Self {
        Scratch {
            generation: 0,
            stamp: vec![0; n],
            state: vec![NodeState::Inactive; n],
            influence: vec![0.0; n],
            threshold: vec![0.0; n],
            touched_at: vec![0; n],
            touched: Vec::new(),
            frontier: Vec::new(),
            next: Vec::new(),
            adopters: Vec::new(),
        }
    }

    fn reset(&mut self) {
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.stamp.fill(0);
            self.generation = 1;
        }
        self.adopters.clear();
        self.frontier.clear();
    }

    fn state(&self, i: usize) -> NodeState {
        if self.stamp[i] == self.generation {
            self.state[i]
        } else {
            NodeState::Inactive
        }
    }

    fn ensure(&mut self, i: usize) -> bool {
        if self.stamp[i] == self.generation {
            return false;
        }
        self.stamp[i] = self.generation;
        self.state[i] = NodeState::Inactive;
        self.influence[i] = 0.0;
        self.touched_at[i] = usize::MAX;
        true
    }

    pub(crate) fn adopters(&self) -> &[usize] {
        &self.adopters
    }
}

fn coin<R: Rng>(rng: &mut R, p: f64) -> bool {
    if p >= 1.0 {
        true
    } else if p <= 0.0 {
        false
    } else {
        rng.random::<f64>() < p
    }
}

/// One LT-V run. `accept[i]` is node `i`'s adoption probability once
/// influenced. Returns the last step with a state change; adopters are left
/// in `scratch.adopters()`.
pub(crate) fn run_diffusion<R: Rng>(
    graph: &WeightedDigraph,
    seeds: &[usize],
    accept: &[f64],
    rng: &mut R,
    scratch: &mut Scratch,
    mut trace: Option<&mut Vec<StepTrace>>,
) -> usize {
    scratch.reset();
    for &s in seeds {
        scratch.ensure(s);
        scratch.state[s] = NodeState::Influenced;
        if coin(rng, accept[s]) {
            scratch.state[s] = NodeState::Adopting;
            scratch.frontier.push(s);
            scratch.adopters.push(s);
        }
    }
    if let Some(t) = trace.as_deref_mut() {
        t.push(StepTrace {
            step: 0,
            influenced: seeds.to_vec(),
            adopting: scratch.frontier.clone(),
        });
    }

    let mut step = 0;
    let mut last_change = 0;
    while !scratch.frontier.is_empty() {
        step += 1;
        scratch.touched.clear();
        for k in 0..scratch.frontier.len() {
            let u = scratch.frontier[k];
            for &(v, w) in graph.out_neighbors(u) {
                if scratch.ensure(v) {
                    scratch.threshold[v] = rng.random::<f64>();
                }
                if scratch.state[v] != NodeState::Inactive {
                    continue;
                }
                scratch.influence[v] += w;
                if scratch.touched_at[v] != step {
                    scratch.touched_at[v] = step;
                    scratch.touched.push(v);
                }
            }
        }
        scratch.next.clear();
        let mut newly_influenced = Vec::new();
        for k in 0..scratch.touched.len() {
            let v = scratch.touched[k];
            if scratch.influence[v] >= scratch.threshold[v] {
                scratch.state[v] = NodeState::Influenced;
                if trace.is_some() {
                    newly_influenced.push(v);
                }
                if coin(rng, accept[v]) {
                    scratch.state[v] = NodeState::Adopting;
                    scratch.next.push(v);
                    scratch.adopters.push(v);
                }
                last_change = step;
            }
        }
        if let Some(t) = trace.as_deref_mut() {
            if !newly_influenced.is_empty() {
                t.push(StepTrace {
                    step,
                    influenced: newly_influenced,
                    adopting: scratch.next.clone(),
                });
            }
        }
        std::mem::swap(&mut scratch.frontier, &mut scratch.next);
    }
    last_change
}

/// Runs `simulations` independent diffusions in parallel and returns one
/// sample per run, in run order. `adopted` receives per-node adoption counts
/// when present.
fn run_batches<F>(
    node_count: usize,
    simulations: usize,
    seed: u64,
    mut adopted: Option<&mut Vec<u64>>,
    run: F,
) -> Vec<f64>
where
    F: Fn(&mut Scratch, &mut rand_chacha::ChaCha8Rng) -> f64 + Sync,
{
    let track = adopted.is_some();
    let batches = simulations.div_ceil(BATCH_SIZE);
    let results: Vec<(Vec<f64>, Vec<u64>)> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut scratch = Scratch::new(node_count);
            let mut counts = if track {
                vec![0; node_count]
            } else {
                Vec::new()
            };
            let end = ((b + 1) * BATCH_SIZE).min(simulations);
            let samples = (b * BATCH_SIZE..end)
                .map(|r| {
                    let mut rng = run_rng(seed, r as u64);
                    let x = run(&mut scratch, &mut rng);
                    if track {
                        for &a in scratch.adopters() {
                            counts[a] += 1;
                        }
                    }
                    x
                })
                .collect();
            (samples, counts)
        })
        .collect();
    let mut samples = Vec::with_capacity(simulations);
    for (s, counts) in results {
        samples.extend(s);
        if let Some(total) = adopted.as_deref_mut() {
            for (t, c) in total.iter_mut().zip(counts) {
                *t += c;
            }
        }
    }
    samples
}

fn check_simulations(simulations: usize) -> Result<()> {
    if simulations == 0 {
        return Err(Error::argument("simulations must be at least 1"));
    }
    Ok(())
}

fn realized_profit(campaign: &Campaign<'_>, adopters: &[usize], skip: Option<usize>) -> f64 {
    let revenue: f64 = adopters
        .iter()
        .filter(|&&a| Some(a) != skip)
        .map(|&a| campaign.prices.get(a))
        .sum();
    revenue - campaign.seed_cost()
}

/// One diffusion. Uses the same stream as run 0 of
/// [`estimate_profit`] with the same seed.
pub fn simulate_once(campaign: &Campaign<'_>, rng_seed: u64) -> DiffusionRun {
    simulate_inner(campaign, rng_seed, None)
}

/// [`simulate_once`] that also records the newly influenced and newly
/// adopting nodes of every step.
pub fn simulate_traced(campaign: &Campaign<'_>, rng_seed: u64) -> (DiffusionRun, Vec<StepTrace>) {
    let mut trace = Vec::new();
    let run = simulate_inner(campaign, rng_seed, Some(&mut trace));
    (run, trace)
}

fn simulate_inner(
    campaign: &Campaign<'_>,
    rng_seed: u64,
    trace: Option<&mut Vec<StepTrace>>,
) -> DiffusionRun {
    let n = campaign.graph.node_count();
    let accept = campaign.adoption_probabilities();
    let mut scratch = Scratch::new(n);
    let mut rng = run_rng(rng_seed, 0);
    let steps = run_diffusion(
        campaign.graph,
        &campaign.seeds,
        &accept,
        &mut rng,
        &mut scratch,
        trace,
    );
    let final_states = (0..n).map(|i| scratch.state(i)).collect();
    DiffusionRun {
        final_states,
        realized_profit: realized_profit(campaign, scratch.adopters(), None),
        steps,
    }
}

/// Monte-Carlo estimate of the expected profit of a campaign.
pub fn estimate_profit(
    campaign: &Campaign<'_>,
    simulations: usize,
    rng_seed: u64,
) -> Result<ProfitEstimate> {
    estimate(campaign, simulations, rng_seed, false)
}

/// [`estimate_profit`] that also reports per-node adoption frequencies.
pub fn estimate_profit_with_frequencies(
    campaign: &Campaign<'_>,
    simulations: usize,
    rng_seed: u64,
) -> Result<ProfitEstimate> {
    estimate(campaign, simulations, rng_seed, true)
}

fn estimate(
    campaign: &Campaign<'_>,
    simulations: usize,
    rng_seed: u64,
    frequencies: bool,
) -> Result<ProfitEstimate> {
    check_simulations(simulations)?;
    let n = campaign.graph.node_count();
    if campaign.seeds.is_empty() {
        return Ok(ProfitEstimate {
            mean: 0.0,
            std_error: 0.0,
            simulations,
            adoption_freq: frequencies.then(|| vec![0.0; n]),
        });
    }
    let accept = campaign.adoption_probabilities();
    let mut counts = vec![0u64; if frequencies { n } else { 0 }];
    let samples = run_batches(
        n,
        simulations,
        rng_seed,
        frequencies.then_some(&mut counts),
        |scratch, rng| {
            run_diffusion(campaign.graph, &campaign.seeds, &accept, rng, scratch, None);
            realized_profit(campaign, scratch.adopters(), None)
        },
    );
    let mut est = ProfitEstimate::from_samples(&samples);
    if frequencies {
        est.adoption_freq = Some(
            counts
                .iter()
                .map(|&c| c as f64 / simulations as f64)
                .collect(),
        );
    }
    Ok(est)
}

/// Expected number of adopters when every influenced node adopts (LT spread).
pub fn estimate_spread(
    graph: &WeightedDigraph,
    seeds: &[usize],
    simulations: usize,
    rng_seed: u64,
) -> Result<f64> {
    Ok(estimate_spread_distribution(graph, seeds, simulations, rng_seed)?.mean)
}

/// [`estimate_spread`] with its standard error, reported as a
/// [`ProfitEstimate`] whose unit is nodes.
pub fn estimate_spread_distribution(
    graph: &WeightedDigraph,
    seeds: &[usize],
    simulations: usize,
    rng_seed: u64,
) -> Result<ProfitEstimate> {
    check_simulations(simulations)?;
    check_seeds(graph, seeds)?;
    if seeds.is_empty() {
        return Ok(ProfitEstimate::from_samples(&vec![0.0; simulations]));
    }
    let accept = vec![1.0; graph.node_count()];
    let samples = run_batches(
        graph.node_count(),
        simulations,
        rng_seed,
        None,
        |scratch, rng| {
            run_diffusion(graph, seeds, &accept, rng, scratch, None);
            scratch.adopters().len() as f64
        },
    );
    Ok(ProfitEstimate::from_samples(&samples))
}

/// Expected profit from every node other than a candidate seed, conditioned
/// on the candidate adopting (`y1`) or not adopting (`y0`).
#[derive(Debug, Clone, PartialEq)]
pub struct Conditionals {
    pub y1: ProfitEstimate,
    pub y0: ProfitEstimate,
}

/// Estimates the conditional profits of seeding `candidate` on top of the
/// campaign's seeds. The candidate is forced into the adopting (resp.
/// influenced-only) state, so neither estimate depends on its own price.
/// Both include the acquisition cost of the existing seeds but not the
/// candidate's.
pub fn estimate_conditionals(
    campaign: &Campaign<'_>,
    candidate: usize,
    simulations: usize,
    rng_seed: u64,
) -> Result<Conditionals> {
    check_simulations(simulations)?;
    let extended = campaign.with_seed(candidate)?;
    let base = campaign.adoption_probabilities();
    let one = |adopts: bool, stream: u64| {
        let mut accept = base.clone();
        accept[candidate] = if adopts { 1.0 } else { 0.0 };
        let samples = run_batches(
            campaign.graph.node_count(),
            simulations,
            derive_seed(rng_seed, &[stream]),
            None,
            |scratch, rng| {
                run_diffusion(campaign.graph, &extended.seeds, &accept, rng, scratch, None);
                realized_profit(campaign, scratch.adopters(), Some(candidate))
            },
        );
        ProfitEstimate::from_samples(&samples)
    };
    Ok(Conditionals {
        y1: one(true, 1),
        y0: one(false, 0),
    })
}
