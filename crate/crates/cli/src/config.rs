use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use ltv_core::graph::{
    assign_weights_tv, assign_weights_wd, assign_weights_wd_with_totals, load_edge_list,
    load_weights, WeightedDigraph,
};
use ltv_core::optimizer::{GreedyOptions, ProfitOracle};
use ltv_core::valuation::ValuationModel;

use crate::args::{
    AlgorithmArg, GraphArgs, ModelArg, ModelArgs, OptimizeArgs, OracleArg, SchemeArg,
};
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightScheme {
    Wd,
    WdFallback,
    Tv,
    Preweighted,
}

impl From<SchemeArg> for WeightScheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Wd => WeightScheme::Wd,
            SchemeArg::WdFallback => WeightScheme::WdFallback,
            SchemeArg::Tv => WeightScheme::Tv,
            SchemeArg::Preweighted => WeightScheme::Preweighted,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Algorithm {
    AllOmp,
    Ffs,
    Page,
    Restricted { price: f64 },
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::AllOmp => "all-omp",
            Algorithm::Ffs => "ffs",
            Algorithm::Page => "page",
            Algorithm::Restricted { .. } => "restricted",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleConfig {
    MonteCarlo {
        simulations: usize,
        conditional_simulations: usize,
    },
    Exact,
}

/// Where the graph comes from and how it is weighted.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSource {
    pub path: PathBuf,
    pub scheme: WeightScheme,
    pub actions: Option<PathBuf>,
    pub weight_seed: u64,
}

impl GraphSource {
    pub fn load(&self) -> Result<WeightedDigraph> {
        if self.actions.is_some() && self.scheme != WeightScheme::Wd {
            return Err(CliError::usage("--actions only applies to the wd scheme"));
        }
        let graph = match self.scheme {
            WeightScheme::Preweighted => load_weights(&self.path)?,
            WeightScheme::Tv => assign_weights_tv(&load_edge_list(&self.path)?, self.weight_seed)?,
            WeightScheme::WdFallback => assign_weights_wd(&load_edge_list(&self.path)?, true)?,
            WeightScheme::Wd => {
                let raw = load_edge_list(&self.path)?;
                match &self.actions {
                    Some(totals) => {
                        assign_weights_wd_with_totals(&raw, &load_action_totals(totals)?)?
                    }
                    None => assign_weights_wd(&raw, false)?,
                }
            }
        };
        Ok(graph)
    }

    fn check(&self) -> Result<()> {
        require_file(&self.path)?;
        if let Some(a) = &self.actions {
            require_file(a)?;
        }
        Ok(())
    }
}

impl From<&GraphArgs> for GraphSource {
    fn from(a: &GraphArgs) -> Self {
        GraphSource {
            path: a.graph.clone(),
            scheme: a.scheme.into(),
            actions: a.actions.clone(),
            weight_seed: a.weight_seed,
        }
    }
}

/// Reads `node_id total` lines; `#` starts a comment line.
pub fn load_action_totals(path: &Path) -> Result<HashMap<u64, i64>> {
    let text = fs::read_to_string(path)?;
    let mut totals = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parsed = match fields.as_slice() {
            [id, total] => id.parse::<u64>().ok().zip(total.parse::<i64>().ok()),
            _ => None,
        };
        let (id, total) = parsed.ok_or_else(|| {
            CliError::usage(format!(
                "{}:{}: expected `node_id total`",
                path.display(),
                i + 1
            ))
        })?;
        if totals.insert(id, total).is_some() {
            return Err(CliError::usage(format!(
                "{}: node {id} listed twice",
                path.display()
            )));
        }
    }
    Ok(totals)
}

pub fn require_file(path: &Path) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::usage(format!(
            "{} does not exist",
            path.display()
        )))
    }
}

pub fn valuation_model(args: &ModelArgs) -> Result<ValuationModel> {
    Ok(match args.model {
        ModelArg::Uniform => ValuationModel::Uniform01,
        ModelArg::Normal => ValuationModel::normal(args.mu, args.sigma)?,
    })
}

/// Everything one `optimize` run depends on.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub graph: GraphSource,
    pub model: ValuationModel,
    pub cost: f64,
    pub algorithm: Algorithm,
    pub oracle: OracleConfig,
    pub max_seeds: Option<usize>,
    pub epsilon: f64,
    pub rng_seed: u64,
    pub output_path: PathBuf,
    pub summary_simulations: usize,
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_args(args: &OptimizeArgs) -> Result<Self> {
        let algorithm = match (args.algorithm, args.restricted_price) {
            (AlgorithmArg::Restricted, Some(price)) => Algorithm::Restricted { price },
            (AlgorithmArg::Restricted, None) => {
                return Err(CliError::usage(
                    "--algorithm restricted needs --restricted-price",
                ))
            }
            (_, Some(_)) => {
                return Err(CliError::usage(
                    "--restricted-price only applies to --algorithm restricted",
                ))
            }
            (AlgorithmArg::AllOmp, None) => Algorithm::AllOmp,
            (AlgorithmArg::Ffs, None) => Algorithm::Ffs,
            (AlgorithmArg::Page, None) => Algorithm::Page,
        };
        let oracle = match args.oracle {
            OracleArg::Exact => OracleConfig::Exact,
            OracleArg::Mc => OracleConfig::MonteCarlo {
                simulations: args.simulations,
                conditional_simulations: args.conditional_simulations.unwrap_or(args.simulations),
            },
        };
        let config = ExperimentConfig {
            graph: GraphSource::from(&args.graph),
            model: valuation_model(&args.model)?,
            cost: args.cost,
            algorithm,
            oracle,
            max_seeds: (!args.no_seed_limit).then_some(args.max_seeds),
            epsilon: args.epsilon,
            rng_seed: args.seed,
            output_path: args.output.clone(),
            summary_simulations: args.summary_simulations.unwrap_or(args.simulations),
            workers: args.workers,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.graph.check()?;
        if !(0.0..1.0).contains(&self.cost) {
            return Err(CliError::usage(format!(
                "--cost {} is outside [0, 1)",
                self.cost
            )));
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(CliError::usage(format!(
                "--epsilon {} must be a non-negative number",
                self.epsilon
            )));
        }
        if let Algorithm::Restricted { price } = self.algorithm {
            if !(price > 0.0 && price <= 1.0) {
                return Err(CliError::usage(format!(
                    "--restricted-price {price} is outside (0, 1]"
                )));
            }
        }
        if let OracleConfig::MonteCarlo {
            simulations,
            conditional_simulations,
        } = self.oracle
        {
            if simulations == 0 || conditional_simulations == 0 {
                return Err(CliError::usage("simulation counts must be at least 1"));
            }
        }
        if self.summary_simulations == 0 {
            return Err(CliError::usage("--summary-simulations must be at least 1"));
        }
        if self.workers == Some(0) {
            return Err(CliError::usage("--workers must be at least 1"));
        }
        Ok(())
    }

    pub fn profit_oracle(&self) -> ProfitOracle {
        match self.oracle {
            OracleConfig::Exact => ProfitOracle::Exact,
            OracleConfig::MonteCarlo {
                simulations,
                conditional_simulations,
            } => ProfitOracle::MonteCarlo {
                simulations,
                conditional_simulations,
                rng_seed: self.rng_seed,
            },
        }
    }

    pub fn greedy_options(&self) -> GreedyOptions {
        GreedyOptions {
            max_seeds: self.max_seeds,
            epsilon: self.epsilon,
            lazy: true,
        }
    }
}
