use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::time::Instant;

use ltv_core::diffusion::{
    estimate_profit, exact_conditionals, exact_node_probabilities, exact_profit, simulate_traced,
    Campaign, PriceVector, ProfitEstimate,
};
use ltv_core::graph::{format_significant, write_weights, WeightedDigraph};
use ltv_core::optimizer::{
    estimate_restricted_profit, optimal_seed_price, restricted_profit, run_all_omp, run_ffs,
    run_page, run_restricted, EvalKey, OptimizationResult, SeedCharging,
};
use ltv_core::rng::derive_seed;
use ltv_core::valuation::{fit_normal, transform_reviews, FitReport, ReviewSample, Valuations};

use crate::args::{CampaignArgs, ExactArgs, FitArgs, SchemeArg, SimulateArgs, WeightsArgs};
use crate::config::{
    require_file, valuation_model, Algorithm, ExperimentConfig, GraphSource, OracleConfig,
};
use crate::error::{CliError, Result};
use crate::output::{result_rows, timings_path, write_results, write_timings, ResultRow};

/// Stream label of the final re-evaluation, distinct from every greedy key.
const SUMMARY_STREAM: u64 = u64::MAX;

fn real(x: f64) -> String {
    format_significant(x, 12)
}

/// Runs `f` on a pool of `workers` threads, or the global pool.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(n) => Ok(rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()?
            .install(f)),
    }
}

pub fn cmd_weights(args: &WeightsArgs) -> Result<WeightedDigraph> {
    if args.scheme == SchemeArg::Preweighted {
        return Err(CliError::usage(
            "--scheme preweighted is not a weighting scheme",
        ));
    }
    require_file(&args.input)?;
    let source = GraphSource {
        path: args.input.clone(),
        scheme: args.scheme.into(),
        actions: args.actions.clone(),
        weight_seed: args.seed,
    };
    let graph = source.load()?;
    let mut out = BufWriter::new(File::create(&args.output)?);
    write_weights(&graph, &mut out)?;
    out.flush()?;
    Ok(graph)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeSummary {
    pub algorithm: &'static str,
    pub seed_count: usize,
    /// Sum of the marginal profits recorded during selection.
    pub total_profit: f64,
    /// Independent evaluation of the final seeds and prices.
    pub final_profit: f64,
    pub final_profit_std_error: f64,
    pub wall_clock_ms: u128,
    pub rows: Vec<ResultRow>,
}

impl fmt::Display for OptimizeSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "algorithm={}", self.algorithm)?;
        writeln!(f, "seed_count={}", self.seed_count)?;
        writeln!(f, "total_profit={}", real(self.total_profit))?;
        writeln!(f, "final_profit={}", real(self.final_profit))?;
        writeln!(
            f,
            "final_profit_std_error={}",
            real(self.final_profit_std_error)
        )?;
        writeln!(f, "wall_clock_ms={}", self.wall_clock_ms)
    }
}

pub fn cmd_optimize(config: &ExperimentConfig) -> Result<OptimizeSummary> {
    config.validate()?;
    let start = Instant::now();
    let graph = config.graph.load()?;
    let valuations: Valuations = config.model.into();
    let oracle = config.profit_oracle();
    oracle.check(&graph)?;
    let options = config.greedy_options();

    let (result, evaluation) = with_workers(config.workers, || -> Result<_> {
        let result = match config.algorithm {
            Algorithm::AllOmp => run_all_omp(&graph, &valuations, config.cost, &oracle, &options)?,
            Algorithm::Ffs => run_ffs(&graph, &valuations, config.cost, &oracle, &options)?,
            Algorithm::Page => run_page(&graph, &valuations, config.cost, &oracle, &options)?,
            Algorithm::Restricted { price } => {
                run_restricted(&graph, price, config.cost, &oracle, &options)?
            }
        };
        let evaluation = evaluate_final(config, &graph, &valuations, &result)?;
        Ok((result, evaluation))
    })??;

    check_result(config, &result)?;
    let rows = result_rows(&graph, &result);
    write_results(&config.output_path, &rows)?;
    write_timings(&timings_path(&config.output_path), &rows)?;

    Ok(OptimizeSummary {
        algorithm: config.algorithm.name(),
        seed_count: result.seeds.len(),
        total_profit: result.total_profit(),
        final_profit: evaluation.mean,
        final_profit_std_error: evaluation.std_error,
        wall_clock_ms: start.elapsed().as_millis(),
        rows,
    })
}

fn evaluate_final(
    config: &ExperimentConfig,
    graph: &WeightedDigraph,
    valuations: &Valuations,
    result: &OptimizationResult,
) -> Result<ProfitEstimate> {
    let seed = derive_seed(config.rng_seed, &[SUMMARY_STREAM]);
    let sims = config.summary_simulations;
    let exact = |mean: f64| ProfitEstimate {
        mean,
        std_error: 0.0,
        simulations: 0,
        adoption_freq: None,
    };
    Ok(match (config.algorithm, config.oracle) {
        (Algorithm::Restricted { price }, OracleConfig::Exact) => exact(restricted_profit(
            graph,
            &result.seeds,
            price,
            config.cost,
            &config.profit_oracle(),
            EvalKey::baseline(0),
        )?),
        (Algorithm::Restricted { price }, OracleConfig::MonteCarlo { .. }) => {
            estimate_restricted_profit(
                graph,
                &result.seeds,
                price,
                config.cost,
                SeedCharging::FreeSamples,
                sims,
                seed,
            )?
        }
        (_, oracle) => {
            let campaign = Campaign::new(
                graph,
                valuations,
                result.seeds.clone(),
                result.prices.clone(),
                config.cost,
            )?;
            match oracle {
                OracleConfig::Exact => exact(exact_profit(&campaign)?),
                OracleConfig::MonteCarlo { .. } => estimate_profit(&campaign, sims, seed)?,
            }
        }
    })
}

fn check_result(config: &ExperimentConfig, result: &OptimizationResult) -> Result<()> {
    let k = result.seeds.len();
    let breach = |msg: String| CliError::Core(ltv_core::Error::Invariant(msg));
    if result.marginal_profits.len() != k || result.cumulative_profit.len() != k {
        return Err(breach(format!(
            "{k} seeds but {} marginals and {} cumulative profits",
            result.marginal_profits.len(),
            result.cumulative_profit.len()
        )));
    }
    if config.oracle == OracleConfig::Exact {
        let mut total = 0.0;
        for (i, (&m, &c)) in result
            .marginal_profits
            .iter()
            .zip(&result.cumulative_profit)
            .enumerate()
        {
            total += m;
            if (total - c).abs() > 1e-9 {
                return Err(breach(format!(
                    "cumulative profit at iteration {} is {c}, expected {total}",
                    i + 1
                )));
            }
        }
    }
    if let Some(m) = result
        .marginal_profits
        .iter()
        .find(|&&m| m <= config.epsilon)
    {
        return Err(breach(format!(
            "recorded marginal {m} does not exceed epsilon"
        )));
    }
    Ok(())
}

pub fn cmd_fit(args: &FitArgs) -> Result<FitReport> {
    require_file(&args.reviews)?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(&args.reviews)?;
    let headers = reader.headers()?.clone();
    let column = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| {
            CliError::usage(format!(
                "{}: missing column `{name}`",
                args.reviews.display()
            ))
        })
    };
    let bad = |row: usize, what: &str, value: &str| {
        CliError::usage(format!(
            "{}: row {row}: invalid {what} {value:?}",
            args.reviews.display()
        ))
    };
    let values = if args.raw_values {
        let v = column("value")?;
        let mut values = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record?;
            let s = record.get(v).unwrap_or("");
            values.push(s.parse::<f64>().map_err(|_| bad(i + 2, "value", s))?);
        }
        values
    } else {
        let (p, r) = (column("price")?, column("rating")?);
        let mut samples = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record?;
            let price = record.get(p).unwrap_or("");
            let rating = record.get(r).unwrap_or("");
            // reviews without a price carry no valuation
            if price.is_empty() {
                continue;
            }
            let price: f64 = price.parse().map_err(|_| bad(i + 2, "price", price))?;
            let rating: u8 = rating.parse().map_err(|_| bad(i + 2, "rating", rating))?;
            samples.push(ReviewSample::new(price, rating)?);
        }
        transform_reviews(&samples)?
    };
    Ok(fit_normal(&values)?)
}

struct LoadedCampaign {
    graph: WeightedDigraph,
    valuations: Valuations,
    seeds: Vec<usize>,
    prices: PriceVector,
    cost: f64,
}

impl LoadedCampaign {
    fn load(args: &CampaignArgs) -> Result<Self> {
        let source = GraphSource::from(&args.graph);
        require_file(&source.path)?;
        let graph = source.load()?;
        let model = valuation_model(&args.model)?;
        let n = graph.node_count();
        let seeds = args
            .seeds
            .iter()
            .map(|&id| {
                graph
                    .index_of(id)
                    .ok_or_else(|| CliError::usage(format!("seed {id} is not a node of the graph")))
            })
            .collect::<Result<Vec<_>>>()?;
        let prices = match args.price {
            Some(p) => PriceVector::uniform(n, p)?,
            None => PriceVector::uniform(n, model.omp())?,
        };
        Ok(LoadedCampaign {
            graph,
            valuations: model.into(),
            seeds,
            prices,
            cost: args.cost,
        })
    }

    fn campaign(&self) -> Result<Campaign<'_>> {
        Ok(Campaign::new(
            &self.graph,
            &self.valuations,
            self.seeds.clone(),
            self.prices.clone(),
            self.cost,
        )?)
    }

    fn ids(&self, nodes: impl IntoIterator<Item = usize>) -> String {
        nodes
            .into_iter()
            .map(|i| self.graph.node_id(i).to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

pub fn cmd_simulate(args: &SimulateArgs, out: &mut dyn Write) -> Result<()> {
    let loaded = LoadedCampaign::load(&args.campaign)?;
    let campaign = loaded.campaign()?;
    let (run, trace) = simulate_traced(&campaign, args.seed);
    if args.trace {
        for step in &trace {
            writeln!(
                out,
                "step={} influenced={} adopting={}",
                step.step,
                loaded.ids(step.influenced.iter().copied()),
                loaded.ids(step.adopting.iter().copied())
            )?;
        }
    }
    writeln!(out, "adopters={}", loaded.ids(run.adopters()))?;
    writeln!(out, "adopter_count={}", run.adopters().count())?;
    writeln!(out, "realized_profit={}", real(run.realized_profit))?;
    writeln!(out, "steps={}", run.steps)?;
    if let Some(sims) = args.simulations {
        let est = with_workers(args.workers, || estimate_profit(&campaign, sims, args.seed))??;
        writeln!(out, "expected_profit={}", real(est.mean))?;
        writeln!(out, "std_error={}", real(est.std_error))?;
        writeln!(out, "simulations={}", est.simulations)?;
    }
    Ok(())
}

pub fn cmd_exact(args: &ExactArgs, out: &mut dyn Write) -> Result<()> {
    let loaded = LoadedCampaign::load(&args.campaign)?;
    let campaign = loaded.campaign()?;
    let profit = exact_profit(&campaign)?;
    let probs = exact_node_probabilities(
        &loaded.graph,
        &campaign.seeds,
        &campaign.adoption_probabilities(),
    )?;
    writeln!(out, "profit={}", real(profit))?;
    writeln!(
        out,
        "expected_influenced={}",
        real(probs.influenced.iter().sum())
    )?;
    writeln!(
        out,
        "expected_adopters={}",
        real(probs.adopting.iter().sum())
    )?;
    if let Some(id) = args.candidate {
        let node = loaded
            .graph
            .index_of(id)
            .ok_or_else(|| CliError::usage(format!("candidate {id} is not a node of the graph")))?;
        let (y1, y0) = exact_conditionals(&campaign, node)?;
        let (price, value) = optimal_seed_price(loaded.valuations.model(node), y1, y0, loaded.cost);
        writeln!(out, "y1={}", real(y1))?;
        writeln!(out, "y0={}", real(y0))?;
        writeln!(out, "page_price={}", real(price))?;
        writeln!(out, "page_profit={}", real(value))?;
    }
    Ok(())
}
