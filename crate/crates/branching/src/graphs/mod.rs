//! Leveled multigraphs, the concrete branching graphs, and path counting on them.

mod builders;
mod iso;
mod pascal;
pub mod words;

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde_json::json;

use crate::error::{invalid, Result};

pub use builders::{
    bsharp_graph, bsharp_rule, fc_tree, fc_tree_rule, half_line, motzkin_graph, semi_pascal,
    BSharp, FcTree, HalfLine, MotzkinGraph, SemiPascal,
};
pub use iso::{bsharp_witness, graphs_isomorphic_up_to, phi_map, IsoReport};
pub use pascal::{even_contraction, pascalize, EvenContraction, Pascalization};
pub use words::{common_prefix, EndSpec, Word};

/// Adjacency rule of an N-graded rooted graph.
///
/// Keys are canonical strings and need only be unique within a level.
pub trait GraphRule: Send + Sync + fmt::Debug {
    fn describe(&self) -> String;

    fn root(&self) -> String;

    /// Edges from level-`n` vertex `key` to level `n + 1`, with multiplicities.
    fn children(&self, n: usize, key: &str) -> Vec<(String, u64)>;

    /// Edges into level-`n` vertex `key` from level `n - 1`.
    fn parents(&self, n: usize, key: &str) -> Vec<(String, u64)>;

    /// Level of a key, when keys are unique across levels.
    fn depth_of(&self, _key: &str) -> Option<usize> {
        None
    }
}

/// A graph materialized level by level from a [`GraphRule`].
#[derive(Debug, Clone)]
pub struct LeveledGraph {
    rule: Arc<dyn GraphRule>,
    levels: Vec<Vec<String>>,
    index: Vec<HashMap<String, usize>>,
    down: Vec<Vec<Vec<(usize, u64)>>>,
    up: Vec<Vec<Vec<(usize, u64)>>>,
}

impl LeveledGraph {
    pub fn new(rule: Arc<dyn GraphRule>) -> LeveledGraph {
        let root = rule.root();
        let mut index = HashMap::new();
        index.insert(root.clone(), 0);
        LeveledGraph {
            rule,
            levels: vec![vec![root]],
            index: vec![index],
            down: Vec::new(),
            up: vec![vec![Vec::new()]],
        }
    }

    pub fn with_levels(rule: Arc<dyn GraphRule>, n_max: usize) -> LeveledGraph {
        let mut g = LeveledGraph::new(rule);
        g.extend_to(n_max);
        g
    }

    pub fn rule(&self) -> &Arc<dyn GraphRule> {
        &self.rule
    }

    /// Materializes every level up to `n_max`.
    pub fn extend_to(&mut self, n_max: usize) {
        while self.depth() < n_max {
            let n = self.depth();
            let mut keys: Vec<String> = Vec::new();
            let mut idx: HashMap<String, usize> = HashMap::new();
            let mut down = Vec::with_capacity(self.levels[n].len());
            for key in &self.levels[n] {
                let mut edges: Vec<(usize, u64)> = Vec::new();
                for (child, m) in self.rule.children(n, key) {
                    if m == 0 {
                        continue;
                    }
                    let j = *idx.entry(child.clone()).or_insert_with(|| {
                        keys.push(child);
                        keys.len() - 1
                    });
                    match edges.iter_mut().find(|(t, _)| *t == j) {
                        Some(e) => e.1 += m,
                        None => edges.push((j, m)),
                    }
                }
                down.push(edges);
            }
            let mut up = vec![Vec::new(); keys.len()];
            for (i, edges) in down.iter().enumerate() {
                for &(j, m) in edges {
                    up[j].push((i, m));
                }
            }
            self.levels.push(keys);
            self.index.push(idx);
            self.down.push(down);
            self.up.push(up);
        }
    }

    /// Deepest materialized level.
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, n: usize) -> &[String] {
        &self.levels[n]
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }

    pub fn index_of(&self, n: usize, key: &str) -> Option<usize> {
        self.index.get(n)?.get(key).copied()
    }

    pub fn key(&self, n: usize, i: usize) -> &str {
        &self.levels[n][i]
    }

    /// Edges from level-`n` vertex `i` into level `n + 1`.
    pub fn out_edges(&self, n: usize, i: usize) -> &[(usize, u64)] {
        &self.down[n][i]
    }

    /// Edges into level-`n` vertex `i` from level `n - 1`.
    pub fn in_edges(&self, n: usize, i: usize) -> &[(usize, u64)] {
        &self.up[n][i]
    }

    /// Multiplicity between level-`n` vertex `v` and level-`(n+1)` vertex `w`.
    pub fn mult(&self, n: usize, v: &str, w: &str) -> u64 {
        let (Some(i), Some(j)) = (self.index_of(n, v), self.index_of(n + 1, w)) else {
            return 0;
        };
        if n >= self.down.len() {
            return 0;
        }
        self.down[n][i]
            .iter()
            .find(|(t, _)| *t == j)
            .map(|e| e.1)
            .unwrap_or(0)
    }

    /// Path counts from level-`n` vertex `i` to every vertex of levels `n..=to`.
    pub fn dims_from(&self, n: usize, i: usize, to: usize) -> Vec<Vec<BigUint>> {
        assert!(to <= self.depth(), "level {to} not materialized");
        let mut out = Vec::with_capacity(to + 1 - n);
        let mut cur = vec![BigUint::zero(); self.levels[n].len()];
        cur[i] = BigUint::one();
        for m in n..to {
            let mut next = vec![BigUint::zero(); self.levels[m + 1].len()];
            for (a, count) in cur.iter().enumerate() {
                if count.is_zero() {
                    continue;
                }
                for &(b, mult) in &self.down[m][a] {
                    next[b] += count * mult;
                }
            }
            out.push(cur);
            cur = next;
        }
        out.push(cur);
        out
    }

    /// `dim(v)` for every vertex up to the materialized depth.
    pub fn dims_from_root(&self) -> Vec<Vec<BigUint>> {
        self.dims_from(0, 0, self.depth())
    }

    /// Number of paths from `(m, v)` to `(n, w)`.
    pub fn dim_between(&self, m: usize, v: &str, n: usize, w: &str) -> Result<BigUint> {
        if n < m {
            return invalid(format!("level {n} above level {m}"));
        }
        if n > self.depth() {
            return invalid(format!("level {n} not materialized (depth {})", self.depth()));
        }
        let Some(i) = self.index_of(m, v) else {
            return invalid(format!("no vertex {v} at level {m}"));
        };
        let Some(j) = self.index_of(n, w) else {
            return Ok(BigUint::zero());
        };
        Ok(self.dims_from(m, i, n).pop().unwrap().swap_remove(j))
    }

    /// Sum of `dim(v)^2` over each level.
    pub fn dim_square_sums(&self) -> Vec<BigUint> {
        self.dims_from_root()
            .into_iter()
            .map(|level| level.iter().map(|d| d * d).sum())
            .collect()
    }

    /// DOT rendering with one subgraph per level and multiplicity labels.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        let id = |n: usize, i: usize| format!("v{n}_{i}");
        writeln!(out, "digraph branching {{").unwrap();
        writeln!(out, "  rankdir=TB;").unwrap();
        for (n, keys) in self.levels.iter().enumerate() {
            writeln!(out, "  subgraph level_{n} {{").unwrap();
            writeln!(out, "    rank=same;").unwrap();
            for (i, k) in keys.iter().enumerate() {
                writeln!(out, "    {} [label=\"{}\"];", id(n, i), k.replace('"', "\\\"")).unwrap();
            }
            writeln!(out, "  }}").unwrap();
        }
        for (n, level) in self.down.iter().enumerate() {
            for (i, edges) in level.iter().enumerate() {
                for &(j, m) in edges {
                    writeln!(out, "  {} -> {} [label=\"{m}\"];", id(n, i), id(n + 1, j)).unwrap();
                }
            }
        }
        writeln!(out, "}}").unwrap();
        out
    }

    /// JSON rendering `{levels: [[keys]], edges: [[n, v, w, mult]]}`.
    pub fn to_json(&self) -> serde_json::Value {
        let mut edges = Vec::new();
        for (n, level) in self.down.iter().enumerate() {
            for (i, out) in level.iter().enumerate() {
                for &(j, m) in out {
                    edges.push(json!([n, self.levels[n][i], self.levels[n + 1][j], m]));
                }
            }
        }
        json!({
            "graph": self.rule.describe(),
            "levels": self.levels,
            "edges": edges,
        })
    }
}

/// Streaming path counts from a vertex, level by level, without materializing the graph.
pub struct DimStream<'a> {
    rule: &'a dyn GraphRule,
    level: usize,
    current: HashMap<String, BigUint>,
}

impl<'a> DimStream<'a> {
    pub fn new(rule: &'a dyn GraphRule, level: usize, key: &str) -> Self {
        let mut current = HashMap::new();
        current.insert(key.to_string(), BigUint::one());
        DimStream {
            rule,
            level,
            current,
        }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn get(&self, key: &str) -> BigUint {
        self.current.get(key).cloned().unwrap_or_default()
    }

    /// Counts of paths from each vertex at the current level down to `key`, moving up one level per [`DimStream::retreat`].
    pub fn backward(rule: &'a dyn GraphRule, level: usize, key: &str) -> Self {
        DimStream::new(rule, level, key)
    }

    /// One level up, through parents.
    pub fn retreat(&mut self) {
        assert!(self.level > 0, "already at level 0");
        let mut prev: HashMap<String, BigUint> = HashMap::with_capacity(self.current.len() + 2);
        for (key, count) in &self.current {
            for (parent, m) in self.rule.parents(self.level, key) {
                let slot = prev.entry(parent).or_default();
                if m == 1 {
                    *slot += count;
                } else {
                    *slot += count * m;
                }
            }
        }
        self.current = prev;
        self.level -= 1;
    }

    pub fn advance(&mut self) {
        let mut next: HashMap<String, BigUint> = HashMap::with_capacity(self.current.len() + 2);
        for (key, count) in &self.current {
            for (child, m) in self.rule.children(self.level, key) {
                let slot = next.entry(child).or_default();
                if m == 1 {
                    *slot += count;
                } else {
                    *slot += count * m;
                }
            }
        }
        self.current = next;
        self.level += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::{catalan, count_ballot, count_motzkin, motzkin_number, LatticePoint};

    #[test]
    fn semi_pascal_examples() {
        let g = semi_pascal(12);
        assert_eq!(g.level(3), ["(3,1)", "(3,3)"]);
        let d = g.dims_from_root();
        assert_eq!(d[4], vec![2u32.into(), 3u32.into(), 1u32.into()]);
        for (n, s) in g.dim_square_sums().into_iter().enumerate() {
            assert_eq!(s, catalan(n as u64));
        }
        assert_eq!(g.dim_between(0, "(0,0)", 4, "(4,0)").unwrap(), 2u32.into());
        assert_eq!(g.dim_between(0, "(0,0)", 4, "(4,1)").unwrap(), 0u32.into());
        assert_eq!(
            g.dim_between(1, "(1,1)", 5, "(5,1)").unwrap(),
            count_ballot(LatticePoint::new(1, 1), LatticePoint::new(5, 1)).unwrap()
        );
    }

    #[test]
    fn motzkin_examples() {
        let g = motzkin_graph(12);
        let d = g.dims_from_root();
        assert_eq!(d[2], vec![2u32.into(), 2u32.into(), 1u32.into()]);
        for (n, s) in g.dim_square_sums().into_iter().enumerate() {
            assert_eq!(s, motzkin_number(2 * n as u64));
        }
        for n in 0..=12u64 {
            for dd in 0..=n {
                let key = format!("({n},{dd})");
                let i = g.index_of(n as usize, &key).unwrap();
                assert_eq!(
                    d[n as usize][i],
                    count_motzkin(LatticePoint::new(0, 0), LatticePoint::new(n, dd)).unwrap()
                );
            }
        }
    }

    #[test]
    fn dim_recurrence() {
        let g = fc_tree(2, false, 8).unwrap();
        let p = pascalize(&g).unwrap();
        let d = p.dims_from_root();
        for n in 1..=p.depth() {
            for x in 0..p.level(n).len() {
                let via: BigUint = p
                    .in_edges(n, x)
                    .iter()
                    .map(|&(y, m)| &d[n - 1][y] * m)
                    .sum();
                assert_eq!(via, d[n][x]);
            }
        }
    }

    #[test]
    fn exports() {
        let g = semi_pascal(2);
        let j = g.to_json();
        assert_eq!(j["levels"][2], json!(["(2,0)", "(2,2)"]));
        assert_eq!(j["edges"][0], json!([0, "(0,0)", "(1,1)", 1]));
        let dot = g.to_dot();
        assert!(dot.contains("subgraph level_2"));
        assert!(dot.contains("v1_0 -> v2_1 [label=\"1\"]"));
    }

    #[test]
    fn stream_matches_materialized() {
        let rule = SemiPascal;
        let mut s = DimStream::new(&rule, 0, "(0,0)");
        for _ in 0..10 {
            s.advance();
        }
        assert_eq!(s.get("(10,0)"), catalan(5));
    }
}
