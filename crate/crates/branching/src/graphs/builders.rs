use std::sync::Arc;

use super::words::{Word, EMPTY_KEY};
use super::{GraphRule, LeveledGraph};
use crate::error::{invalid, Result};

fn pair(key: &str) -> (i64, i64) {
    let inner = key
        .strip_prefix('(')
        .and_then(|k| k.strip_suffix(')'))
        .unwrap_or_else(|| panic!("malformed pair key {key:?}"));
    let (a, b) = inner.split_once(',').expect("pair key");
    (a.parse().expect("pair key"), b.parse().expect("pair key"))
}

fn pair_key(a: i64, b: i64) -> String {
    format!("({a},{b})")
}

/// The half-line 0 - 1 - 2 - ...
#[derive(Debug, Clone, Copy)]
pub struct HalfLine;

impl GraphRule for HalfLine {
    fn describe(&self) -> String {
        "half-line".into()
    }

    fn root(&self) -> String {
        "0".into()
    }

    fn children(&self, _n: usize, key: &str) -> Vec<(String, u64)> {
        let k: u64 = key.parse().expect("integer key");
        vec![((k + 1).to_string(), 1)]
    }

    fn parents(&self, _n: usize, key: &str) -> Vec<(String, u64)> {
        let k: u64 = key.parse().expect("integer key");
        if k == 0 {
            Vec::new()
        } else {
            vec![((k - 1).to_string(), 1)]
        }
    }

    fn depth_of(&self, key: &str) -> Option<usize> {
        key.parse().ok()
    }
}

pub fn half_line(n_max: usize) -> LeveledGraph {
    LeveledGraph::with_levels(Arc::new(HalfLine), n_max)
}

/// Vertices `(m,s)`, `s <= m`, `s = m mod 2`, edges to `s +- 1`.
#[derive(Debug, Clone, Copy)]
pub struct SemiPascal;

impl GraphRule for SemiPascal {
    fn describe(&self) -> String {
        "semi-pascal".into()
    }

    fn root(&self) -> String {
        pair_key(0, 0)
    }

    fn children(&self, _n: usize, key: &str) -> Vec<(String, u64)> {
        let (m, s) = pair(key);
        let mut out = Vec::with_capacity(2);
        if s > 0 {
            out.push((pair_key(m + 1, s - 1), 1));
        }
        out.push((pair_key(m + 1, s + 1), 1));
        out
    }

    fn parents(&self, _n: usize, key: &str) -> Vec<(String, u64)> {
        let (m, s) = pair(key);
        let mut out = Vec::with_capacity(2);
        if m == 0 {
            return out;
        }
        if s > 0 {
            out.push((pair_key(m - 1, s - 1), 1));
        }
        if s < m - 1 {
            out.push((pair_key(m - 1, s + 1), 1));
        }
        out
    }

    fn depth_of(&self, key: &str) -> Option<usize> {
        Some(pair(key).0 as usize)
    }
}

pub fn semi_pascal(n_max: usize) -> LeveledGraph {
    LeveledGraph::with_levels(Arc::new(SemiPascal), n_max)
}

/// Vertices `(n,d)`, `0 <= d <= n`, edges to `d' in {d-1, d, d+1}`.
#[derive(Debug, Clone, Copy)]
pub struct MotzkinGraph;

impl GraphRule for MotzkinGraph {
    fn describe(&self) -> String {
        "motzkin".into()
    }

    fn root(&self) -> String {
        pair_key(0, 0)
    }

    fn children(&self, _n: usize, key: &str) -> Vec<(String, u64)> {
        let (n, d) = pair(key);
        (d - 1..=d + 1)
            .filter(|&e| e >= 0)
            .map(|e| (pair_key(n + 1, e), 1))
            .collect()
    }

    fn parents(&self, _n: usize, key: &str) -> Vec<(String, u64)> {
        let (n, d) = pair(key);
        if n == 0 {
            return Vec::new();
        }
        (d - 1..=d + 1)
            .filter(|&e| e >= 0 && e < n)
            .map(|e| (pair_key(n - 1, e), 1))
            .collect()
    }

    fn depth_of(&self, key: &str) -> Option<usize> {
        Some(pair(key).0 as usize)
    }
}

pub fn motzkin_graph(n_max: usize) -> LeveledGraph {
    LeveledGraph::with_levels(Arc::new(MotzkinGraph), n_max)
}

/// The s-Fuss-Catalan tree, optionally with its root and root edge removed.
#[derive(Debug, Clone, Copy)]
pub struct FcTree {
    pub s: u32,
    pub derooted: bool,
}

impl FcTree {
    pub fn new(s: u32, derooted: bool) -> Result<FcTree> {
        if s < 2 {
            return invalid(format!("tree order s = {s} < 2"));
        }
        Word::parse(s, "")?;
        Ok(FcTree { s, derooted })
    }

    pub fn word(&self, key: &str) -> Word {
        Word::parse(self.s, key).expect("tree key")
    }

    fn offset(&self) -> usize {
        usize::from(self.derooted)
    }
}

impl GraphRule for FcTree {
    fn describe(&self) -> String {
        if self.derooted {
            format!("fc-tree(s={}, derooted)", self.s)
        } else {
            format!("fc-tree(s={})", self.s)
        }
    }

    fn root(&self) -> String {
        if self.derooted {
            Word::root(self.s).children()[0].key()
        } else {
            EMPTY_KEY.into()
        }
    }

    fn children(&self, _n: usize, key: &str) -> Vec<(String, u64)> {
        self.word(key)
            .children()
            .into_iter()
            .map(|w| (w.key(), 1))
            .collect()
    }

    fn parents(&self, _n: usize, key: &str) -> Vec<(String, u64)> {
        let w = self.word(key);
        if w.len() <= self.offset() {
            return Vec::new();
        }
        vec![(w.parent().unwrap().key(), 1)]
    }

    fn depth_of(&self, key: &str) -> Option<usize> {
        Some(self.word(key).len() - self.offset())
    }
}

pub fn fc_tree_rule(s: u32, derooted: bool) -> Result<Arc<dyn GraphRule>> {
    Ok(Arc::new(FcTree::new(s, derooted)?))
}

pub fn fc_tree(s: u32, derooted: bool, n_max: usize) -> Result<LeveledGraph> {
    Ok(LeveledGraph::with_levels(fc_tree_rule(s, derooted)?, n_max))
}

/// The alternating word `abab...` of length `n`.
pub fn beta(n: usize) -> String {
    (0..n).map(|i| if i % 2 == 0 { 'a' } else { 'b' }).collect()
}

fn is_subword(u: &str, big: &str) -> bool {
    let mut it = big.chars();
    u.chars().all(|c| it.any(|d| d == c))
}

fn word_key(w: &str) -> String {
    if w.is_empty() {
        EMPTY_KEY.into()
    } else {
        w.into()
    }
}

fn word_of(key: &str) -> &str {
    if key == EMPTY_KEY {
        ""
    } else {
        key
    }
}

/// All distinct subwords of `beta(n)`, shortest first then lexicographic.
#[cfg(test)]
pub(crate) fn subwords_of_beta(n: usize) -> Vec<String> {
    let b = beta(n);
    let mut found = std::collections::BTreeSet::new();
    let mut frontier = vec![String::new()];
    found.insert(String::new());
    while let Some(w) = frontier.pop() {
        for c in ['a', 'b'] {
            let mut x = w.clone();
            x.push(c);
            if is_subword(&x, &b) && found.insert(x.clone()) {
                frontier.push(x);
            }
        }
    }
    let mut out: Vec<String> = found.into_iter().collect();
    out.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
    out
}

/// The word graph whose level `n` is the set of subwords of `beta(n)`.
#[derive(Debug, Clone, Copy)]
pub struct BSharp;

impl BSharp {
    // Candidate neighbours of `u` (level n) at level n + 1, before the membership test.
    fn forward(n: usize, u: &str) -> Vec<String> {
        let (append, strip) = if n % 2 == 1 { ('b', 'a') } else { ('a', 'b') };
        let mut out = vec![u.to_string(), format!("{u}{append}")];
        if let Some(w) = u.strip_suffix(strip) {
            out.push(w.to_string());
        }
        out
    }
}

impl GraphRule for BSharp {
    fn describe(&self) -> String {
        "bsharp".into()
    }

    fn root(&self) -> String {
        EMPTY_KEY.into()
    }

    fn children(&self, n: usize, key: &str) -> Vec<(String, u64)> {
        let target = beta(n + 1);
        let mut out: Vec<(String, u64)> = Vec::new();
        for w in BSharp::forward(n, word_of(key)) {
            if is_subword(&w, &target) && !out.iter().any(|(k, _)| *k == word_key(&w)) {
                out.push((word_key(&w), 1));
            }
        }
        out
    }

    fn parents(&self, n: usize, key: &str) -> Vec<(String, u64)> {
        if n == 0 {
            return Vec::new();
        }
        let w = word_of(key);
        let source = beta(n - 1);
        let (append, strip) = if (n - 1) % 2 == 1 { ('b', 'a') } else { ('a', 'b') };
        let mut cands = vec![w.to_string(), format!("{w}{strip}")];
        if let Some(u) = w.strip_suffix(append) {
            cands.push(u.to_string());
        }
        let mut out: Vec<(String, u64)> = Vec::new();
        for u in cands {
            if is_subword(&u, &source) && !out.iter().any(|(k, _)| *k == word_key(&u)) {
                out.push((word_key(&u), 1));
            }
        }
        out
    }
}

pub fn bsharp_rule() -> Arc<dyn GraphRule> {
    Arc::new(BSharp)
}

pub fn bsharp_graph(n_max: usize) -> LeveledGraph {
    LeveledGraph::with_levels(bsharp_rule(), n_max)
}
