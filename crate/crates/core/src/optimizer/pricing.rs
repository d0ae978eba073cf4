//! All-OMP, FFS and PAGE.
//!
//! All three quote every non-seed its optimal myopic price (OMP) and select
//! seeds with [`u_greedy`]; they differ in the price a seed gets:
//!
//! * All-OMP keeps the OMP,
//! * FFS gives the seed the product for free,
//! * PAGE picks the price maximizing
//!   `g(p) = (1 - F(p)) (p + Y1) + F(p) Y0 - c_a`, where `Y1` / `Y0` are the
//!   expected profits from all other nodes when the seed adopts / does not.

use super::search::{golden_section_max, DEFAULT_TOLERANCE};
use super::{
    u_greedy, EvalKey, Evaluation, GreedyOptions, GreedyState, MarginalProfit, OptimizationResult,
    ProfitOracle,
};
use crate::diffusion::{Campaign, PriceVector};
use crate::error::{Error, Result};
use crate::graph::WeightedDigraph;
use crate::valuation::{ValuationModel, Valuations};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pricing {
    AllOmp,
    Ffs,
    Page,
}

/// Maximizes `g(p) = (1 - F(p)) (p + y1) + F(p) y0 - cost` over `[0,1]`.
///
/// Uniform valuations have the closed form `p* = (1 - y1 + y0) / 2` clamped
/// to `[0,1]`; other families use golden-section search.
pub fn optimal_seed_price(model: &ValuationModel, y1: f64, y0: f64, cost: f64) -> (f64, f64) {
    let g = |p: f64| {
        let f = model.cdf_extended(p);
        (1.0 - f) * (p + y1) + f * y0 - cost
    };
    match model {
        ValuationModel::Uniform01 => {
            let p = ((1.0 - y1 + y0) / 2.0).clamp(0.0, 1.0);
            (p, g(p))
        }
        ValuationModel::Normal { .. } => {
            let (x, gx) = golden_section_max(g, 0.0, 1.0, DEFAULT_TOLERANCE)
                .expect("unit interval is a valid bracket");
            // the search only approaches the ends of the bracket
            let mut best = (x, gx);
            for edge in [0.0, 1.0] {
                let ge = g(edge);
                if ge > best.1 || (ge == best.1 && edge < best.0) {
                    best = (edge, ge);
                }
            }
            best
        }
    }
}

/// Marginal-profit rule of one pricing strategy on the full LT-V objective.
pub struct PricingObjective<'a> {
    graph: &'a WeightedDigraph,
    valuations: &'a Valuations,
    cost: f64,
    oracle: ProfitOracle,
    pricing: Pricing,
    omp: Vec<f64>,
}

impl<'a> PricingObjective<'a> {
    pub fn new(
        graph: &'a WeightedDigraph,
        valuations: &'a Valuations,
        cost: f64,
        oracle: ProfitOracle,
        pricing: Pricing,
    ) -> Result<Self> {
        valuations.check_len(graph.node_count())?;
        if !(0.0..1.0).contains(&cost) {
            return Err(Error::argument(format!(
                "acquisition cost {cost} is outside [0, 1)"
            )));
        }
        Ok(PricingObjective {
            graph,
            valuations,
            cost,
            oracle,
            pricing,
            omp: valuations.omp_vector(graph.node_count()),
        })
    }

    fn campaign(&self, state: &GreedyState) -> Result<Campaign<'a>> {
        Campaign::new(
            self.graph,
            self.valuations,
            state.seeds.clone(),
            state.prices.clone(),
            self.cost,
        )
    }
}

impl MarginalProfit for PricingObjective<'_> {
    fn initial_prices(&self) -> PriceVector {
        PriceVector::new(self.omp.clone()).expect("OMPs lie in [0, 1]")
    }

    fn baseline(&self, state: &GreedyState, key: EvalKey) -> Result<f64> {
        self.oracle.profit(&self.campaign(state)?, key)
    }

    fn evaluate(
        &self,
        state: &GreedyState,
        baseline: f64,
        candidate: usize,
        key: EvalKey,
    ) -> Result<Evaluation> {
        let current = self.campaign(state)?;
        match self.pricing {
            Pricing::AllOmp | Pricing::Ffs => {
                let price = match self.pricing {
                    Pricing::AllOmp => self.omp[candidate],
                    _ => 0.0,
                };
                let mut next = current.with_seed(candidate)?;
                next.prices.set(candidate, price)?;
                let profit = self.oracle.profit(&next, key)?;
                Ok(Evaluation {
                    price,
                    marginal: profit - baseline,
                })
            }
            Pricing::Page => {
                let (y1, y0) = self.oracle.conditionals(&current, candidate, key)?;
                let (price, g) =
                    optimal_seed_price(self.valuations.model(candidate), y1, y0, self.cost);
                Ok(Evaluation {
                    price,
                    marginal: g - baseline,
                })
            }
        }
    }
}

fn run(
    graph: &WeightedDigraph,
    valuations: &Valuations,
    cost: f64,
    oracle: &ProfitOracle,
    options: &GreedyOptions,
    pricing: Pricing,
) -> Result<OptimizationResult> {
    let objective = PricingObjective::new(graph, valuations, cost, *oracle, pricing)?;
    u_greedy(graph, oracle, &objective, options)
}

/// Every node, seed or not, is quoted its OMP.
pub fn run_all_omp(
    graph: &WeightedDigraph,
    valuations: &Valuations,
    cost: f64,
    oracle: &ProfitOracle,
    options: &GreedyOptions,
) -> Result<OptimizationResult> {
    run(graph, valuations, cost, oracle, options, Pricing::AllOmp)
}

/// Seeds get the product for free; non-seeds are quoted their OMP.
pub fn run_ffs(
    graph: &WeightedDigraph,
    valuations: &Valuations,
    cost: f64,
    oracle: &ProfitOracle,
    options: &GreedyOptions,
) -> Result<OptimizationResult> {
    run(graph, valuations, cost, oracle, options, Pricing::Ffs)
}

/// Price-aware greedy: each candidate is priced at the maximizer of its
/// conditional profit before the best one is chosen.
pub fn run_page(
    graph: &WeightedDigraph,
    valuations: &Valuations,
    cost: f64,
    oracle: &ProfitOracle,
    options: &GreedyOptions,
) -> Result<OptimizationResult> {
    run(graph, valuations, cost, oracle, options, Pricing::Page)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    fn star(weight: f64) -> WeightedDigraph {
        let edges = (1..6)
            .map(|leaf| Edge {
                src: 0,
                dst: leaf,
                weight,
            })
            .collect();
        WeightedDigraph::new(6, edges).unwrap()
    }

    fn grid_argmax(f: impl Fn(f64) -> f64) -> f64 {
        let mut best = (0.0, f(0.0));
        for k in 1..=1_000_000 {
            let x = k as f64 * 1e-6;
            let fx = f(x);
            if fx > best.1 {
                best = (x, fx);
            }
        }
        best.0
    }

    #[test]
    fn uniform_closed_form() {
        let (p, g) = optimal_seed_price(&ValuationModel::Uniform01, 0.625, 0.0, 0.001);
        assert_eq!(p, 0.1875);
        assert!((g - 0.65915625).abs() < 1e-12);

        let (p, _) = optimal_seed_price(&ValuationModel::Uniform01, 0.3, 0.3, 0.0);
        assert_eq!(p, 0.5);

        let (p, g) = optimal_seed_price(&ValuationModel::Uniform01, 2.0, 0.0, 0.0);
        assert_eq!(p, 0.0);
        assert_eq!(g, 2.0);
    }

    #[test]
    fn uniform_closed_form_matches_grid() {
        for &(y1, y0) in &[(0.2, 0.05), (0.0, 0.4), (0.9, 0.1), (0.4, 0.4)] {
            let (p, _) = optimal_seed_price(&ValuationModel::Uniform01, y1, y0, 0.01);
            let oracle = grid_argmax(|q| (1.0 - q) * (q + y1) + q * y0);
            assert!((p - oracle).abs() < 1e-5, "y1={y1} y0={y0}");
        }
    }

    #[test]
    fn normal_search_matches_grid() {
        let m = ValuationModel::normal(0.53, 0.14).unwrap();
        let (p, _) = optimal_seed_price(&m, 0.2, 0.05, 0.001);
        let oracle = grid_argmax(|q| {
            let f = m.cdf_extended(q);
            (1.0 - f) * (q + 0.2) + f * 0.05 - 0.001
        });
        assert!((p - oracle).abs() < 1e-5, "{p} vs {oracle}");
    }

    #[test]
    fn normal_with_equal_conditionals_is_omp() {
        let m = ValuationModel::normal(0.53, 0.14).unwrap();
        let (p, _) = optimal_seed_price(&m, 0.3, 0.3, 0.0);
        assert!((p - m.omp()).abs() < 1e-7);
    }

    #[test]
    fn star_first_iterations() {
        let g = star(0.5);
        let v: Valuations = ValuationModel::Uniform01.into();
        let one = GreedyOptions {
            max_seeds: Some(1),
            ..Default::default()
        };
        let omp = run_all_omp(&g, &v, 0.001, &ProfitOracle::Exact, &one).unwrap();
        assert_eq!(omp.seeds, vec![0]);
        assert!((omp.marginal_profits[0] - 0.5615).abs() < 1e-9);

        let ffs = run_ffs(&g, &v, 0.001, &ProfitOracle::Exact, &one).unwrap();
        assert_eq!(ffs.seeds, vec![0]);
        assert!((ffs.marginal_profits[0] - 0.624).abs() < 1e-9);
        assert_eq!(ffs.prices.get(0), 0.0);

        let page = run_page(&g, &v, 0.001, &ProfitOracle::Exact, &one).unwrap();
        assert_eq!(page.seeds, vec![0]);
        assert!((page.prices.get(0) - 0.1875).abs() < 1e-12);
        assert!((page.marginal_profits[0] - 0.65915625).abs() < 1e-9);
    }

    #[test]
    fn isolated_nodes_under_ffs_are_never_seeded() {
        let g = WeightedDigraph::new(3, vec![]).unwrap();
        let v: Valuations = ValuationModel::normal(0.53, 0.14).unwrap().into();
        let r = run_ffs(
            &g,
            &v,
            0.001,
            &ProfitOracle::Exact,
            &GreedyOptions::default(),
        )
        .unwrap();
        assert!(r.seeds.is_empty());
    }

    #[test]
    fn unprofitable_seeds_are_skipped() {
        let edges = vec![
            Edge {
                src: 0,
                dst: 1,
                weight: 0.0,
            },
            Edge {
                src: 1,
                dst: 2,
                weight: 0.0,
            },
        ];
        let g = WeightedDigraph::new(3, edges).unwrap();
        let v: Valuations = ValuationModel::Uniform01.into();
        let r = run_all_omp(&g, &v, 0.3, &ProfitOracle::Exact, &GreedyOptions::default()).unwrap();
        assert!(r.seeds.is_empty());
    }

    #[test]
    fn edgeless_graph_seeds_everything_at_omp() {
        let g = WeightedDigraph::new(4, vec![]).unwrap();
        let m = ValuationModel::normal(0.53, 0.14).unwrap();
        let v: Valuations = m.into();
        let omp = m.omp();
        let expected = omp * (1.0 - m.cdf(omp).unwrap());
        assert!((expected - 0.41 * 0.804).abs() < 0.01);
        let all =
            run_all_omp(&g, &v, 0.0, &ProfitOracle::Exact, &GreedyOptions::default()).unwrap();
        assert_eq!(all.seeds, vec![0, 1, 2, 3]);
        for &mp in &all.marginal_profits {
            assert!((mp - expected).abs() < 1e-12);
        }
        assert!(all.prices.as_slice().iter().all(|&p| p == omp));

        let page = run_page(&g, &v, 0.0, &ProfitOracle::Exact, &GreedyOptions::default()).unwrap();
        assert_eq!(page.seeds, all.seeds);
        for (a, b) in page.marginal_profits.iter().zip(&all.marginal_profits) {
            assert!((a - b).abs() < 1e-12);
        }
        for &p in page.prices.as_slice() {
            assert!((p - omp).abs() < 1e-7);
        }
    }

    #[test]
    fn rejects_invalid_cost() {
        let g = star(0.5);
        let v: Valuations = ValuationModel::Uniform01.into();
        assert!(run_page(&g, &v, 1.0, &ProfitOracle::Exact, &GreedyOptions::default()).is_err());
    }
}
