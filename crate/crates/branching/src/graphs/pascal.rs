use std::collections::BTreeMap;
use std::sync::Arc;

use super::{GraphRule, LeveledGraph};
use crate::error::{invalid, Result};

/// `P(V)_n = {(n, v) : depth(v) <= n, depth(v) = n mod 2}` with inherited edges.
///
/// A pascalized vertex `(n, v)` is keyed by `v`; the level is implicit.
#[derive(Debug, Clone)]
pub struct Pascalization {
    base: Arc<dyn GraphRule>,
}

impl Pascalization {
    pub fn new(base: Arc<dyn GraphRule>) -> Result<Pascalization> {
        if base.depth_of(&base.root()).is_none() {
            return invalid(format!(
                "{} does not have level-unique keys and cannot be pascalized",
                base.describe()
            ));
        }
        Ok(Pascalization { base })
    }

    pub fn base(&self) -> &Arc<dyn GraphRule> {
        &self.base
    }

    fn depth(&self, key: &str) -> usize {
        self.base.depth_of(key).expect("level-unique key")
    }
}

impl GraphRule for Pascalization {
    fn describe(&self) -> String {
        format!("pascalize({})", self.base.describe())
    }

    fn root(&self) -> String {
        self.base.root()
    }

    fn children(&self, _n: usize, key: &str) -> Vec<(String, u64)> {
        let k = self.depth(key);
        let mut out = self.base.parents(k, key);
        out.extend(self.base.children(k, key));
        out
    }

    fn parents(&self, n: usize, key: &str) -> Vec<(String, u64)> {
        let k = self.depth(key);
        let mut out = self.base.parents(k, key);
        if k + 1 < n {
            out.extend(self.base.children(k, key));
        }
        out
    }
}

/// Pascalization of `g`, materialized to the same depth.
pub fn pascalize(g: &LeveledGraph) -> Result<LeveledGraph> {
    let rule = Pascalization::new(g.rule().clone())?;
    Ok(LeveledGraph::with_levels(Arc::new(rule), g.depth()))
}

/// Graph of even levels: one edge per two-step path.
#[derive(Debug, Clone)]
pub struct EvenContraction {
    base: Arc<dyn GraphRule>,
}

impl EvenContraction {
    pub fn new(base: Arc<dyn GraphRule>) -> EvenContraction {
        EvenContraction { base }
    }
}

impl GraphRule for EvenContraction {
    fn describe(&self) -> String {
        format!("even({})", self.base.describe())
    }

    fn root(&self) -> String {
        self.base.root()
    }

    fn children(&self, n: usize, key: &str) -> Vec<(String, u64)> {
        let mut acc: BTreeMap<String, u64> = BTreeMap::new();
        let mut order = Vec::new();
        for (mid, m1) in self.base.children(2 * n, key) {
            for (w, m2) in self.base.children(2 * n + 1, &mid) {
                let e = acc.entry(w.clone()).or_insert_with(|| {
                    order.push(w);
                    0
                });
                *e += m1 * m2;
            }
        }
        order.into_iter().map(|w| {
            let m = acc[&w];
            (w, m)
        }).collect()
    }

    fn parents(&self, n: usize, key: &str) -> Vec<(String, u64)> {
        if n == 0 {
            return Vec::new();
        }
        let mut acc: BTreeMap<String, u64> = BTreeMap::new();
        for (mid, m1) in self.base.parents(2 * n, key) {
            for (u, m2) in self.base.parents(2 * n - 1, &mid) {
                *acc.entry(u).or_default() += m1 * m2;
            }
        }
        acc.into_iter().collect()
    }

    fn depth_of(&self, key: &str) -> Option<usize> {
        self.base.depth_of(key).map(|d| d / 2)
    }
}

/// Even-level contraction of `g`, materialized to half its depth.
pub fn even_contraction(g: &LeveledGraph) -> LeveledGraph {
    LeveledGraph::with_levels(Arc::new(EvenContraction::new(g.rule().clone())), g.depth() / 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{fc_tree, graphs_isomorphic_up_to, half_line, semi_pascal};

    #[test]
    fn half_line_gives_semi_pascal() {
        let p = pascalize(&half_line(10)).unwrap();
        assert_eq!(p.level_sizes(), [1, 1, 2, 2, 3, 3, 4, 4, 5, 5, 6]);
        let report = graphs_isomorphic_up_to(&p, &semi_pascal(10), 10, None);
        assert!(report.isomorphic, "{report:?}");
    }

    #[test]
    fn fibonacci_pascalization_sizes() {
        let t = fc_tree(2, false, 6).unwrap();
        let p = pascalize(&t).unwrap();
        let sizes = t.level_sizes();
        for n in 0..=6 {
            let expect: usize = (0..=n).filter(|k| k % 2 == n % 2).map(|k| sizes[k]).sum();
            assert_eq!(p.level(n).len(), expect);
        }
        // FT levels 0, 2, 4 have 1, 2, 5 vertices
        assert_eq!(p.level(4).len(), 8);
    }

    #[test]
    fn contraction_of_semi_pascal() {
        let g = semi_pascal(12);
        let e = even_contraction(&g);
        assert_eq!(e.mult(0, "(0,0)", "(2,0)"), 1);
        assert_eq!(e.mult(0, "(0,0)", "(2,2)"), 1);
        assert_eq!(e.mult(1, "(2,2)", "(4,2)"), 2);
        let dg = g.dims_from_root();
        let de = e.dims_from_root();
        for n in 0..=6 {
            for (i, key) in e.level(n).iter().enumerate() {
                let j = g.index_of(2 * n, key).unwrap();
                assert_eq!(de[n][i], dg[2 * n][j]);
            }
        }
    }

    #[test]
    fn pascalized_keys_not_repascalizable() {
        let p = pascalize(&half_line(3)).unwrap();
        assert!(pascalize(&p).is_err());
    }
}
