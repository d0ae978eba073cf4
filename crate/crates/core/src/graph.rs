//! Directed social graphs with LT influence weights.
//!
//! Node ids in input files need not be contiguous. They are remapped to dense
//! indices `0..node_count` in ascending id order, and the original ids are kept
//! on the graph so that outputs can be written back in the caller's id space.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Slack allowed on the per-node in-weight bound `Σ_i w(i,j) ≤ 1`.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// The three trivalency weights.
pub const TRIVALENCY_WEIGHTS: [f64; 3] = [0.001, 0.01, 0.1];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RawEdge {
    pub src: u64,
    pub dst: u64,
    /// Number of actions the two endpoints share, when the file carries it.
    pub action_count: Option<i64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawEdgeList {
    pub records: Vec<RawEdge>,
}

impl RawEdgeList {
    pub fn has_counts(&self) -> bool {
        self.records
            .first()
            .is_some_and(|r| r.action_count.is_some())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub weight: f64,
}

/// Immutable weighted digraph indexed by in- and out-adjacency.
#[derive(Debug, Clone)]
pub struct WeightedDigraph {
    node_ids: Vec<u64>,
    index: HashMap<u64, usize>,
    edges: Vec<Edge>,
    in_neighbors: Vec<Vec<(usize, f64)>>,
    out_neighbors: Vec<Vec<(usize, f64)>>,
}

impl WeightedDigraph {
    /// Builds a graph on nodes `0..node_count` whose ids equal their indices.
    pub fn new(node_count: usize, edges: Vec<Edge>) -> Result<Self> {
        Self::with_ids((0..node_count as u64).collect(), edges)
    }

    /// Builds a graph whose dense index `i` carries the external id `node_ids[i]`.
    pub fn with_ids(node_ids: Vec<u64>, edges: Vec<Edge>) -> Result<Self> {
        let n = node_ids.len();
        let mut index = HashMap::with_capacity(n);
        for (i, &id) in node_ids.iter().enumerate() {
            if index.insert(id, i).is_some() {
                return Err(Error::data(format!("node id {id} listed twice")));
            }
        }
        let mut seen = HashSet::with_capacity(edges.len());
        let mut in_neighbors = vec![Vec::new(); n];
        let mut out_neighbors = vec![Vec::new(); n];
        for e in &edges {
            if e.src >= n || e.dst >= n {
                return Err(Error::data(format!(
                    "edge ({}, {}) references a node outside 0..{n}",
                    e.src, e.dst
                )));
            }
            if e.src == e.dst {
                return Err(Error::data(format!(
                    "self-loop on node {}",
                    node_ids[e.src]
                )));
            }
            if !(0.0..=1.0).contains(&e.weight) {
                return Err(Error::data(format!(
                    "weight {} on edge ({}, {}) is outside [0, 1]",
                    e.weight, node_ids[e.src], node_ids[e.dst]
                )));
            }
            if !seen.insert((e.src, e.dst)) {
                return Err(Error::data(format!(
                    "duplicate edge ({}, {})",
                    node_ids[e.src], node_ids[e.dst]
                )));
            }
            in_neighbors[e.dst].push((e.src, e.weight));
            out_neighbors[e.src].push((e.dst, e.weight));
        }
        let graph = WeightedDigraph {
            node_ids,
            index,
            edges,
            in_neighbors,
            out_neighbors,
        };
        for j in 0..n {
            let s = graph.in_weight_sum(j);
            if s > 1.0 + WEIGHT_SUM_TOLERANCE {
                return Err(Error::data(format!(
                    "in-weights of node {} sum to {s} > 1",
                    graph.node_ids[j]
                )));
            }
        }
        Ok(graph)
    }

    pub fn node_count(&self) -> usize {
        self.node_ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn in_neighbors(&self, node: usize) -> &[(usize, f64)] {
        &self.in_neighbors[node]
    }

    pub fn out_neighbors(&self, node: usize) -> &[(usize, f64)] {
        &self.out_neighbors[node]
    }

    pub fn in_degree(&self, node: usize) -> usize {
        self.in_neighbors[node].len()
    }

    pub fn in_weight_sum(&self, node: usize) -> f64 {
        self.in_neighbors[node].iter().map(|&(_, w)| w).sum()
    }

    /// External id of a dense index.
    pub fn node_id(&self, node: usize) -> u64 {
        self.node_ids[node]
    }

    pub fn node_ids(&self) -> &[u64] {
        &self.node_ids
    }

    /// Dense index of an external id.
    pub fn index_of(&self, id: u64) -> Option<usize> {
        self.index.get(&id).copied()
    }
}

/// Reads an edge list: `src dst` or `src dst action_count` per line, `#` comments.
pub fn load_edge_list(path: impl AsRef<Path>) -> Result<RawEdgeList> {
    parse_edge_list(BufReader::new(File::open(path)?))
}

pub fn parse_edge_list(reader: impl BufRead) -> Result<RawEdgeList> {
    let mut records = Vec::new();
    let mut arity = None;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 2 && fields.len() != 3 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 2 or 3 fields, found {}", fields.len()),
            });
        }
        match arity {
            None => arity = Some(fields.len()),
            Some(a) if a != fields.len() => {
                return Err(Error::Format(format!(
                    "line {line_no} has {} fields but earlier lines have {a}",
                    fields.len()
                )))
            }
            _ => {}
        }
        let parse_id = |s: &str| {
            s.parse::<u64>().map_err(|e| Error::Parse {
                line: line_no,
                message: format!("invalid node id {s:?}: {e}"),
            })
        };
        let src = parse_id(fields[0])?;
        let dst = parse_id(fields[1])?;
        let action_count = match fields.get(2) {
            Some(s) => Some(s.parse::<i64>().map_err(|e| Error::Parse {
                line: line_no,
                message: format!("invalid action count {s:?}: {e}"),
            })?),
            None => None,
        };
        records.push(RawEdge {
            src,
            dst,
            action_count,
        });
    }
    Ok(RawEdgeList { records })
}

/// Dense remapping of the ids appearing in `raw`, ascending by id.
fn dense_ids(raw: &RawEdgeList) -> (Vec<u64>, HashMap<u64, usize>) {
    let mut ids: Vec<u64> = raw.records.iter().flat_map(|r| [r.src, r.dst]).collect();
    ids.sort_unstable();
    ids.dedup();
    let index = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    (ids, index)
}

fn build(raw: &RawEdgeList, weights: &[f64]) -> Result<WeightedDigraph> {
    let (ids, index) = dense_ids(raw);
    let edges = raw
        .records
        .iter()
        .zip(weights)
        .map(|(r, &weight)| Edge {
            src: index[&r.src],
            dst: index[&r.dst],
            weight,
        })
        .collect();
    WeightedDigraph::with_ids(ids, edges)
}

/// Weighted Distribution weights.
///
/// With action counts, `w(i,j) = A(i,j) / N(j)` where `N(j)` is the total
/// count over all edges into `j`. With `fallback_uniform`, counts are ignored
/// and `w(i,j) = 1 / indegree(j)`.
pub fn assign_weights_wd(raw: &RawEdgeList, fallback_uniform: bool) -> Result<WeightedDigraph> {
    if fallback_uniform {
        let mut indegree: HashMap<u64, usize> = HashMap::new();
        for r in &raw.records {
            *indegree.entry(r.dst).or_default() += 1;
        }
        let weights: Vec<f64> = raw
            .records
            .iter()
            .map(|r| 1.0 / indegree[&r.dst] as f64)
            .collect();
        return build(raw, &weights);
    }
    let counts = action_counts(raw)?;
    let mut totals: HashMap<u64, i64> = HashMap::new();
    for (r, &a) in raw.records.iter().zip(&counts) {
        *totals.entry(r.dst).or_default() += a;
    }
    wd_with_counts(raw, &counts, &totals)
}

/// Weighted Distribution weights with externally supplied per-node action
/// totals `N(j)`. Nodes absent from `totals` fall back to their in-count sum.
pub fn assign_weights_wd_with_totals(
    raw: &RawEdgeList,
    totals: &HashMap<u64, i64>,
) -> Result<WeightedDigraph> {
    let counts = action_counts(raw)?;
    let mut merged: HashMap<u64, i64> = HashMap::new();
    for (r, &a) in raw.records.iter().zip(&counts) {
        *merged.entry(r.dst).or_default() += a;
    }
    for (&id, &n) in totals {
        if n < 0 {
            return Err(Error::data(format!(
                "negative action total {n} for node {id}"
            )));
        }
        merged.insert(id, n);
    }
    wd_with_counts(raw, &counts, &merged)
}

fn action_counts(raw: &RawEdgeList) -> Result<Vec<i64>> {
    raw.records
        .iter()
        .map(|r| match r.action_count {
            None => Err(Error::data(format!(
                "edge ({}, {}) has no action count; use the uniform fallback for uncounted lists",
                r.src, r.dst
            ))),
            Some(a) if a < 0 => Err(Error::data(format!(
                "negative action count {a} on edge ({}, {})",
                r.src, r.dst
            ))),
            Some(a) => Ok(a),
        })
        .collect()
}

fn wd_with_counts(
    raw: &RawEdgeList,
    counts: &[i64],
    totals: &HashMap<u64, i64>,
) -> Result<WeightedDigraph> {
    let mut weights = Vec::with_capacity(counts.len());
    for (r, &a) in raw.records.iter().zip(counts) {
        let n = totals[&r.dst];
        let w = if n == 0 {
            if a > 0 {
                return Err(Error::data(format!(
                    "node {} performs no actions but edge ({}, {}) counts {a}",
                    r.dst, r.src, r.dst
                )));
            }
            0.0
        } else {
            a as f64 / n as f64
        };
        weights.push(w);
    }
    build(raw, &weights)
}

/// Trivalency weights: each edge draws uniformly from
/// [`TRIVALENCY_WEIGHTS`]; nodes whose in-weights sum to `s > 1` have them
/// divided by `s`.
pub fn assign_weights_tv(raw: &RawEdgeList, rng_seed: u64) -> Result<WeightedDigraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut weights: Vec<f64> = raw
        .records
        .iter()
        .map(|_| TRIVALENCY_WEIGHTS[rng.random_range(0..TRIVALENCY_WEIGHTS.len())])
        .collect();
    let mut sums: HashMap<u64, f64> = HashMap::new();
    for (r, &w) in raw.records.iter().zip(&weights) {
        *sums.entry(r.dst).or_default() += w;
    }
    for (r, w) in raw.records.iter().zip(weights.iter_mut()) {
        *w /= sums[&r.dst].max(1.0);
    }
    build(raw, &weights)
}

/// Formats `x` rounded to `digits` significant digits, using the shortest
/// decimal that reads back as the rounded value.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{:.*e}", digits.saturating_sub(1), x)
        .parse()
        .expect("scientific notation parses");
    format!("{rounded}")
}

/// Writes `src dst weight` lines in edge order using external ids.
pub fn write_weights(graph: &WeightedDigraph, mut out: impl Write) -> Result<()> {
    for e in graph.edges() {
        writeln!(
            out,
            "{} {} {}",
            graph.node_id(e.src),
            graph.node_id(e.dst),
            format_significant(e.weight, 12)
        )?;
    }
    Ok(())
}

pub fn load_weights(path: impl AsRef<Path>) -> Result<WeightedDigraph> {
    parse_weights(BufReader::new(File::open(path)?))
}

/// Parses the weights format written by [`write_weights`].
pub fn parse_weights(reader: impl Read) -> Result<WeightedDigraph> {
    let mut records = Vec::new();
    let mut weights = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let line_no = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected `src dst weight`, found {} fields", fields.len()),
            });
        }
        let bad = |what: &str, s: &str| Error::Parse {
            line: line_no,
            message: format!("invalid {what} {s:?}"),
        };
        let src = fields[0].parse().map_err(|_| bad("node id", fields[0]))?;
        let dst = fields[1].parse().map_err(|_| bad("node id", fields[1]))?;
        let w: f64 = fields[2].parse().map_err(|_| bad("weight", fields[2]))?;
        records.push(RawEdge {
            src,
            dst,
            action_count: None,
        });
        weights.push(w);
    }
    build(&RawEdgeList { records }, &weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn raw(text: &str) -> RawEdgeList {
        parse_edge_list(Cursor::new(text)).unwrap()
    }

    #[test]
    fn parses_plain_and_counted_lists() {
        let plain = raw("0 1\n0 2");
        assert_eq!(plain.records.len(), 2);
        assert!(!plain.has_counts());

        let counted = raw("0 1 3\n# c\n1 2 5");
        let counts: Vec<_> = counted.records.iter().map(|r| r.action_count).collect();
        assert_eq!(counts, vec![Some(3), Some(5)]);
    }

    #[test]
    fn bad_token_reports_line() {
        match parse_edge_list(Cursor::new("0 1 x")) {
            Err(Error::Parse { line: 1, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match parse_edge_list(Cursor::new("0 1\n\n2 q")) {
            Err(Error::Parse { line: 3, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn mixed_arity_is_a_format_error() {
        assert!(matches!(
            parse_edge_list(Cursor::new("0 1\n1 2 4")),
            Err(Error::Format(_))
        ));
    }

    #[test]
    fn wd_ratio() {
        let g = assign_weights_wd(&raw("1 9 3\n2 9 3"), false).unwrap();
        let j = g.index_of(9).unwrap();
        for &(_, w) in g.in_neighbors(j) {
            assert_eq!(w, 0.5);
        }
    }

    #[test]
    fn wd_fallback_is_inverse_indegree() {
        let g = assign_weights_wd(&raw("1 5\n2 5\n3 5\n4 5"), true).unwrap();
        let j = g.index_of(5).unwrap();
        assert_eq!(g.in_degree(j), 4);
        assert!(g.in_neighbors(j).iter().all(|&(_, w)| w == 0.25));
        // sources have no in-edges
        assert!(g.in_neighbors(g.index_of(1).unwrap()).is_empty());
    }

    #[test]
    fn wd_without_counts_needs_fallback() {
        assert!(matches!(
            assign_weights_wd(&raw("0 1\n0 2"), false),
            Err(Error::Data(_))
        ));
    }

    #[test]
    fn wd_rejects_negative_counts() {
        assert!(matches!(
            assign_weights_wd(&raw("0 1 -2\n2 1 4"), false),
            Err(Error::Data(_))
        ));
    }

    #[test]
    fn wd_external_totals() {
        let list = raw("0 2 1\n1 2 1");
        let mut totals = HashMap::new();
        totals.insert(2, 4);
        let g = assign_weights_wd_with_totals(&list, &totals).unwrap();
        assert_eq!(g.in_weight_sum(g.index_of(2).unwrap()), 0.5);

        totals.insert(2, 0);
        assert!(matches!(
            assign_weights_wd_with_totals(&list, &totals),
            Err(Error::Data(_))
        ));

        // totals smaller than the shared counts break the weight bound
        totals.insert(2, 1);
        assert!(matches!(
            assign_weights_wd_with_totals(&list, &totals),
            Err(Error::Data(_))
        ));
    }

    #[test]
    fn wd_zero_counts_with_zero_total() {
        let g = assign_weights_wd(&raw("0 1 0"), false).unwrap();
        assert_eq!(g.edges()[0].weight, 0.0);
    }

    #[test]
    fn tv_is_deterministic_and_bounded() {
        let text: String = (1..=30).map(|i| format!("{i} 0\n0 {i}\n")).collect();
        let list = raw(&text);
        let a = assign_weights_tv(&list, 42).unwrap();
        let b = assign_weights_tv(&list, 42).unwrap();
        assert_eq!(a.edges(), b.edges());
        for j in 0..a.node_count() {
            assert!(a.in_weight_sum(j) <= 1.0 + WEIGHT_SUM_TOLERANCE);
        }
        for e in a.edges() {
            assert!(e.weight > 0.0 && e.weight <= 0.1);
        }
    }

    #[test]
    fn tv_normalizes_heavy_nodes() {
        let text: String = (1..=11).map(|i| format!("{i} 0\n")).collect();
        let list = raw(&text);
        for seed in 0..50 {
            let g = assign_weights_tv(&list, seed).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let drawn: Vec<f64> = (0..11)
                .map(|_| TRIVALENCY_WEIGHTS[rng.random_range(0..3)])
                .collect();
            let s: f64 = drawn.iter().sum();
            let target = g.index_of(0).unwrap();
            for (k, &(_, w)) in g.in_neighbors(target).iter().enumerate() {
                assert_eq!(w, drawn[k] / s.max(1.0));
            }
        }
    }

    #[test]
    fn tv_all_heavy_node_is_scaled_by_sum() {
        let text: String = (1..=11).map(|i| format!("{i} 0\n")).collect();
        let list = raw(&text);
        let seed = (0u64..)
            .find(|&s| {
                let mut rng = ChaCha8Rng::seed_from_u64(s);
                (0..11).all(|_| rng.random_range(0..3) == 2)
            })
            .unwrap();
        let g = assign_weights_tv(&list, seed).unwrap();
        let target = g.index_of(0).unwrap();
        let s: f64 = (0..11).map(|_| 0.1).sum();
        assert!(s > 1.0);
        for &(_, w) in g.in_neighbors(target) {
            assert_eq!(w, 0.1 / s);
            assert!((w - 0.090909).abs() < 1e-6);
        }
    }

    #[test]
    fn tv_light_node_is_unchanged() {
        let list = raw("1 0\n2 0\n3 0");
        for seed in 0..20 {
            let g = assign_weights_tv(&list, seed).unwrap();
            let target = g.index_of(0).unwrap();
            assert!(g
                .in_neighbors(target)
                .iter()
                .all(|&(_, w)| TRIVALENCY_WEIGHTS.contains(&w)));
        }
    }

    #[test]
    fn rejects_duplicates_and_self_loops() {
        assert!(matches!(
            assign_weights_wd(&raw("0 1\n0 1"), true),
            Err(Error::Data(_))
        ));
        assert!(matches!(
            assign_weights_wd(&raw("3 3"), true),
            Err(Error::Data(_))
        ));
    }

    #[test]
    fn non_contiguous_ids_are_remapped() {
        let g = assign_weights_wd(&raw("100 7\n7 42"), true).unwrap();
        assert_eq!(g.node_ids(), &[7, 42, 100]);
        assert_eq!(g.index_of(100), Some(2));
        assert_eq!(g.out_neighbors(2), &[(0, 1.0)]);
    }

    #[test]
    fn adjacency_lists_agree() {
        let g = assign_weights_tv(&raw("0 1\n1 2\n2 0\n0 2"), 3).unwrap();
        let mut from_in: Vec<(usize, usize)> = (0..g.node_count())
            .flat_map(|j| g.in_neighbors(j).iter().map(move |&(i, _)| (i, j)))
            .collect();
        let mut from_out: Vec<(usize, usize)> = (0..g.node_count())
            .flat_map(|i| g.out_neighbors(i).iter().map(move |&(j, _)| (i, j)))
            .collect();
        from_in.sort_unstable();
        from_out.sort_unstable();
        assert_eq!(from_in, from_out);
    }

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_significant(0.5, 12), "0.5");
        assert_eq!(format_significant(0.1 / 1.1, 12), "0.0909090909091");
        assert_eq!(format_significant(0.0, 12), "0");
        assert_eq!(format_significant(-2.499, 12), "-2.499");
    }
}
