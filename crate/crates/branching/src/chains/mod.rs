//! Central Markov chains on branching graphs.

mod ballot;
mod motzkin;
mod walks;

use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;
use serde_json::json;

use crate::error::{invalid, Error, Result};
use crate::graphs::{GraphRule, LeveledGraph};
use crate::scalar::{big_ratio_to_f64, Scalar};
use crate::csv_field;

pub use ballot::{ballot_chain, constant_up_chain, BallotChain};
pub use motzkin::{motzkin_chain, motzkin_curve_point, root_return_marginal, MotzkinChain};
pub use walks::{aux_walk, fib_walk, walk_chain, AuxWalk, FibWalk, Move, TreeWalk};

/// Tolerance for row sums in floating mode.
/// Outgoing transitions of one vertex: target index and probability.
pub type Row<S> = Vec<(usize, S)>;

/// An edge `((m, v), (m + 1, w))` given by levels and keys.
pub type Edge<'a> = ((usize, &'a str), (usize, &'a str));

pub const FLOAT_TOLERANCE: f64 = 1e-12;

/// Parameters a chain was built from, rendered as text.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChainParams {
    Ballot { lambda: String },
    Motzkin { lambda1: String, lambda2: String },
    Walk { end: String, eta: String, s: u32, derooted: bool },
    Aux { eta: String, s: u32 },
    Custom { description: String },
}

/// Transition tables of a Markov chain on a leveled graph.
///
/// `None` marks a vertex of probability zero whose outgoing transitions are undefined.
#[derive(Debug, Clone)]
pub struct ChainModel<S> {
    graph: LeveledGraph,
    transitions: Vec<Vec<Option<Row<S>>>>,
    params: ChainParams,
}

impl<S: Scalar> ChainModel<S> {
    /// Builds a chain from a probability for every edge of `graph`.
    pub fn from_fn(
        graph: LeveledGraph,
        params: ChainParams,
        mut p: impl FnMut(usize, &str, &str) -> Option<S>,
    ) -> Result<ChainModel<S>> {
        let mut transitions = Vec::with_capacity(graph.depth());
        for n in 0..graph.depth() {
            let mut level = Vec::with_capacity(graph.level(n).len());
            for i in 0..graph.level(n).len() {
                let from = graph.key(n, i);
                let mut row = Vec::new();
                let mut absent = false;
                for &(j, _) in graph.out_edges(n, i) {
                    match p(n, from, graph.key(n + 1, j)) {
                        Some(x) => row.push((j, x)),
                        None => absent = true,
                    }
                }
                level.push(if absent { None } else { Some(row) });
            }
            transitions.push(level);
        }
        let chain = ChainModel {
            graph,
            transitions,
            params,
        };
        chain.check_rows()?;
        Ok(chain)
    }

    fn check_rows(&self) -> Result<()> {
        for (n, level) in self.transitions.iter().enumerate() {
            for (i, row) in level.iter().enumerate() {
                let Some(row) = row else { continue };
                let mut sum = S::zero();
                for (j, p) in row {
                    let x = p.to_f64();
                    if p.below_zero() || x > 1.0 + FLOAT_TOLERANCE {
                        return Err(Error::Invariant(format!(
                            "p({} -> {}) = {} at level {n} is not a probability",
                            self.graph.key(n, i),
                            self.graph.key(n + 1, *j),
                            p.render()
                        )));
                    }
                    sum = sum + p.clone();
                }
                let ok = if S::EXACT {
                    sum == S::one()
                } else {
                    (sum.to_f64() - 1.0).abs() <= FLOAT_TOLERANCE
                };
                if !ok {
                    return Err(Error::Invariant(format!(
                        "row of {} at level {n} sums to {}",
                        self.graph.key(n, i),
                        sum.render()
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn graph(&self) -> &LeveledGraph {
        &self.graph
    }

    pub fn params(&self) -> &ChainParams {
        &self.params
    }

    pub fn mode(&self) -> &'static str {
        if S::EXACT {
            "exact"
        } else {
            "floating"
        }
    }

    /// Number of levels with transition tables.
    pub fn levels(&self) -> usize {
        self.transitions.len()
    }

    /// Outgoing transitions of level-`n` vertex `i`, `None` if absent.
    pub fn row(&self, n: usize, i: usize) -> Option<&[(usize, S)]> {
        self.transitions[n][i].as_deref()
    }

    /// `p(v -> w)` for level-`n` vertex `v`.
    pub fn transition(&self, n: usize, v: &str, w: &str) -> Option<S> {
        let i = self.graph.index_of(n, v)?;
        let j = self.graph.index_of(n + 1, w)?;
        let row = self.row(n, i)?;
        Some(
            row.iter()
                .find(|(t, _)| *t == j)
                .map(|(_, p)| p.clone())
                .unwrap_or_else(S::zero),
        )
    }

    /// `nu(X_n = v)` for every level up to `n_max`.
    pub fn marginals(&self, n_max: usize) -> Vec<Vec<S>> {
        let n_max = n_max.min(self.levels());
        let mut out = vec![vec![S::one()]];
        for n in 0..n_max {
            let mut next = vec![S::zero(); self.graph.level(n + 1).len()];
            for (i, mass) in out[n].iter().enumerate() {
                if mass.is_zero() {
                    continue;
                }
                if let Some(row) = self.row(n, i) {
                    for (j, p) in row {
                        next[*j] = next[*j].clone() + mass.clone() * p.clone();
                    }
                }
            }
            out.push(next);
        }
        out
    }

    /// `nu(X_n = v) / dim(v)` for each vertex at level `n`.
    pub fn trace_weights(&self, n: usize) -> Vec<(String, S)> {
        let marg = self.marginals(n).pop().unwrap();
        let dims = self.graph.dims_from(0, 0, n).pop().unwrap();
        marg.into_iter()
            .zip(dims)
            .enumerate()
            .map(|(i, (m, d))| (self.graph.key(n, i).to_string(), m / S::from_biguint(&d)))
            .collect()
    }

    /// CSV of all transitions; the value columns depend on the scalar type.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let cols = if S::EXACT && self.rational_values() {
            "p_num,p_den"
        } else if S::EXACT {
            "p_exact,p_float"
        } else {
            "p_float"
        };
        writeln!(out, "level,from,to,{cols}").unwrap();
        for n in 0..self.levels() {
            for i in 0..self.graph.level(n).len() {
                let Some(row) = self.row(n, i) else { continue };
                for (j, p) in row {
                    let from = csv_field(self.graph.key(n, i));
                    let to = csv_field(self.graph.key(n + 1, *j));
                    let value = if cols == "p_float" {
                        format!("{:?}", p.to_f64())
                    } else if cols == "p_num,p_den" {
                        let r = p.render();
                        match r.split_once('/') {
                            Some((a, b)) => format!("{a},{b}"),
                            None => format!("{r},1"),
                        }
                    } else {
                        format!("\"{}\",{:?}", p.render(), p.to_f64())
                    };
                    writeln!(out, "{n},{from},{to},{value}").unwrap();
                }
            }
        }
        out
    }

    fn rational_values(&self) -> bool {
        self.transitions
            .iter()
            .flatten()
            .flatten()
            .flatten()
            .all(|(_, p)| !p.render().contains('G'))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut rows = Vec::new();
        for n in 0..self.levels() {
            for i in 0..self.graph.level(n).len() {
                let from = self.graph.key(n, i);
                match self.row(n, i) {
                    None => rows.push(json!([n, from, null, "absent", null])),
                    Some(row) => {
                        for (j, p) in row {
                            rows.push(json!([n, from, self.graph.key(n + 1, *j), p.render(), p.to_f64()]));
                        }
                    }
                }
            }
        }
        json!({
            "params": self.params,
            "mode": self.mode(),
            "graph": self.graph.rule().describe(),
            "levels": self.graph.level_sizes(),
            "transitions": rows,
        })
    }
}

/// Converts an exact or algebraic chain to floating point.
pub fn to_float_chain<S: Scalar>(chain: &ChainModel<S>) -> ChainModel<f64> {
    ChainModel {
        graph: chain.graph.clone(),
        transitions: chain
            .transitions
            .iter()
            .map(|level| {
                level
                    .iter()
                    .map(|row| {
                        row.as_ref()
                            .map(|r| r.iter().map(|(j, p)| (*j, p.to_f64())).collect())
                    })
                    .collect()
            })
            .collect(),
        params: chain.params.clone(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CentralityFailure {
    pub level: usize,
    pub vertex: String,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CentralityReport {
    pub pass: bool,
    pub exact: bool,
    pub n_max: usize,
    pub tolerance: f64,
    pub max_spread: f64,
    pub paths_checked: u64,
    pub vertices_checked: usize,
    pub unreachable_vertices: usize,
    pub failures: Vec<CentralityFailure>,
}

struct VertexPaths<S> {
    first: Option<S>,
    all_equal: bool,
    min: f64,
    max: f64,
    any_positive: bool,
}

/// Enumerates every rooted path up to `n_max` and checks that paths ending at the same vertex are equally likely.
pub fn verify_centrality<S: Scalar>(chain: &ChainModel<S>, n_max: usize, tol: f64) -> CentralityReport {
    let n_max = n_max.min(chain.levels());
    let g = chain.graph();
    let mut stats: Vec<Vec<VertexPaths<S>>> = (0..=n_max)
        .map(|n| {
            (0..g.level(n).len())
                .map(|_| VertexPaths {
                    first: None,
                    all_equal: true,
                    min: f64::INFINITY,
                    max: f64::NEG_INFINITY,
                    any_positive: false,
                })
                .collect()
        })
        .collect();
    let mut paths = 0u64;
    // Depth-first over paths; probabilities are shared along common prefixes.
    let mut stack: Vec<(usize, usize, S)> = vec![(0, 0, S::one())];
    while let Some((n, i, p)) = stack.pop() {
        paths += 1;
        let v = &mut stats[n][i];
        let x = p.to_f64();
        v.min = v.min.min(x);
        v.max = v.max.max(x);
        v.any_positive |= !p.is_zero();
        match &v.first {
            None => v.first = Some(p.clone()),
            Some(f) => {
                if *f != p {
                    v.all_equal = false;
                }
            }
        }
        if n == n_max {
            continue;
        }
        match chain.row(n, i) {
            Some(row) => {
                for &(j, _) in g.out_edges(n, i) {
                    let q = row
                        .iter()
                        .find(|(t, _)| *t == j)
                        .map(|(_, q)| q.clone())
                        .unwrap_or_else(S::zero);
                    stack.push((n + 1, j, p.clone() * q));
                }
            }
            None => {
                for &(j, _) in g.out_edges(n, i) {
                    stack.push((n + 1, j, S::zero()));
                }
            }
        }
    }
    let mut report = CentralityReport {
        pass: true,
        exact: S::EXACT,
        n_max,
        tolerance: if S::EXACT { 0.0 } else { tol },
        max_spread: 0.0,
        paths_checked: paths,
        vertices_checked: 0,
        unreachable_vertices: 0,
        failures: Vec::new(),
    };
    for (n, level) in stats.iter().enumerate() {
        for (i, v) in level.iter().enumerate() {
            if !v.any_positive {
                report.unreachable_vertices += 1;
                continue;
            }
            report.vertices_checked += 1;
            let spread = v.max - v.min;
            let bad = if S::EXACT { !v.all_equal } else { spread > tol };
            if bad {
                // Exact values can differ below f64 resolution; never report a zero spread for them.
                let spread = if spread > 0.0 { spread } else { f64::MIN_POSITIVE };
                report.max_spread = report.max_spread.max(spread);
                report.pass = false;
                report.failures.push(CentralityFailure {
                    level: n,
                    vertex: g.key(n, i).to_string(),
                    min: v.min,
                    max: v.max,
                });
            } else if !S::EXACT {
                report.max_spread = report.max_spread.max(spread);
            }
        }
    }
    report
}

/// Ratio sequences `dim(w, omega_i) / dim(v, omega_i)` for several tails at once.
///
/// `v` is at level `m` and `w` at level `m + 1`. Tails must be listed with increasing levels.
pub fn ergodic_ratios(
    rule: &dyn GraphRule,
    v: (usize, &str),
    w: (usize, &str),
    tails: &[Vec<(usize, String)>],
) -> Result<Vec<Vec<f64>>> {
    if w.0 != v.0 + 1 {
        return invalid("edge endpoints must be on adjacent levels");
    }
    for tail in tails {
        if tail.windows(2).any(|p| p[1].0 <= p[0].0) {
            return invalid("tail levels must increase strictly");
        }
        if tail.first().is_some_and(|&(n, _)| n < w.0) {
            return invalid("tail vertex above the edge");
        }
    }
    tails
        .iter()
        .map(|tail| {
            tail.iter()
                .map(|(n, key)| Ok(edge_ratios(rule, (*n, key), &[(v, w)])?[0]))
                .collect()
        })
        .collect()
}

/// `dim(w, omega) / dim(v, omega)` for several edges `(v, w)` and one far vertex `omega`.
///
/// A single pass up from `omega` serves every edge.
pub fn edge_ratios(rule: &dyn GraphRule, omega: (usize, &str), edges: &[Edge<'_>]) -> Result<Vec<f64>> {
    if edges.iter().any(|(v, w)| w.0 != v.0 + 1) {
        return invalid("edge endpoints must be on adjacent levels");
    }
    if edges.iter().any(|(_, w)| w.0 > omega.0) {
        return invalid("tail vertex above the edge");
    }
    let top = edges.iter().map(|(v, _)| v.0).min().unwrap_or(omega.0);
    let mut counts = vec![(BigUint::zero(), BigUint::zero()); edges.len()];
    let mut back = crate::graphs::DimStream::backward(rule, omega.0, omega.1);
    loop {
        for ((v, w), c) in edges.iter().zip(counts.iter_mut()) {
            if v.0 == back.level() {
                c.1 = back.get(v.1);
            }
            if w.0 == back.level() {
                c.0 = back.get(w.1);
            }
        }
        if back.level() == top {
            break;
        }
        back.retreat();
    }
    edges
        .iter()
        .zip(counts)
        .map(|((v, _), (num, den))| {
            if den.is_zero() {
                return invalid(format!("tail vertex {} at level {} unreachable from {}", omega.1, omega.0, v.1));
            }
            Ok(big_ratio_to_f64(&num.into(), &den.into()))
        })
        .collect()
}

/// `dim(w, omega_i) / dim(v, omega_i)` along one tail.
pub fn ergodic_estimate(
    rule: &dyn GraphRule,
    tail: &[(usize, String)],
    v: (usize, &str),
    w: (usize, &str),
) -> Result<Vec<f64>> {
    Ok(ergodic_ratios(rule, v, w, &[tail.to_vec()])?.remove(0))
}

pub(crate) fn shared(rule: impl GraphRule + 'static) -> Arc<dyn GraphRule> {
    Arc::new(rule)
}
