use std::path::{Path, PathBuf};

use ltv_core::graph::{format_significant, WeightedDigraph};
use ltv_core::optimizer::OptimizationResult;

use crate::error::{CliError, Result};

pub const RESULTS_HEADER: [&str; 5] = [
    "iteration",
    "node_id",
    "price",
    "marginal_profit",
    "cumulative_profit",
];

/// One selected seed. `elapsed_ms` is written to the timings file only.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub iteration: usize,
    pub node_id: u64,
    pub price: f64,
    pub marginal_profit: f64,
    pub cumulative_profit: f64,
    pub elapsed_ms: u64,
}

pub fn result_rows(graph: &WeightedDigraph, result: &OptimizationResult) -> Vec<ResultRow> {
    result
        .seeds
        .iter()
        .enumerate()
        .map(|(k, &node)| ResultRow {
            iteration: k + 1,
            node_id: graph.node_id(node),
            price: result.prices.get(node),
            marginal_profit: result.marginal_profits[k],
            cumulative_profit: result.cumulative_profit[k],
            elapsed_ms: result.elapsed_ms.get(k).copied().unwrap_or(0),
        })
        .collect()
}

fn real(x: f64) -> String {
    format_significant(x, 12)
}

pub fn write_results(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(RESULTS_HEADER)?;
    for r in rows {
        w.write_record([
            r.iteration.to_string(),
            r.node_id.to_string(),
            real(r.price),
            real(r.marginal_profit),
            real(r.cumulative_profit),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `results.csv` -> `results.timings.csv`.
pub fn timings_path(results: &Path) -> PathBuf {
    results.with_extension("timings.csv")
}

pub fn write_timings(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["iteration", "elapsed_ms"])?;
    for r in rows {
        w.write_record([r.iteration.to_string(), r.elapsed_ms.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a results CSV back, checking the header and that iterations run
/// consecutively from 1.
pub fn read_results(path: &Path) -> Result<Vec<ResultRow>> {
    let mut reader = csv::Reader::from_path(path)?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    if header != RESULTS_HEADER {
        return Err(CliError::usage(format!(
            "{}: unexpected header {header:?}",
            path.display()
        )));
    }
    let bad = |line: usize, what: &str| {
        CliError::usage(format!("{}: row {line}: invalid {what}", path.display()))
    };
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let line = i + 2;
        let field = |k: usize| record.get(k).unwrap_or("");
        let real = |k: usize| {
            field(k)
                .parse::<f64>()
                .map_err(|_| bad(line, RESULTS_HEADER[k]))
        };
        let row = ResultRow {
            iteration: field(0).parse().map_err(|_| bad(line, "iteration"))?,
            node_id: field(1).parse().map_err(|_| bad(line, "node_id"))?,
            price: real(2)?,
            marginal_profit: real(3)?,
            cumulative_profit: real(4)?,
            elapsed_ms: 0,
        };
        if row.iteration != i + 1 {
            return Err(bad(line, "iteration (not consecutive)"));
        }
        rows.push(row);
    }
    Ok(rows)
}
