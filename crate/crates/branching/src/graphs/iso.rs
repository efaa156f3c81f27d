use std::collections::HashMap;

use serde::Serialize;

use super::words::{Word, EMPTY_KEY};
use super::LeveledGraph;
use crate::error::{invalid, Result};

/// Relabels a derooted Fibonacci-tree word, given without its leading `a`, as a subword of `abab...`.
///
/// Every `a` in an even position becomes `b`, and every `b` is deleted.
pub fn phi_map(w: &str) -> Result<String> {
    let w = if w == EMPTY_KEY { "" } else { w };
    if !w.chars().all(|c| c == 'a' || c == 'b') {
        return invalid(format!("{w:?} is not a word over a, b"));
    }
    Word::parse(2, &format!("a{w}"))?;
    Ok(w
        .chars()
        .enumerate()
        .filter_map(|(i, c)| match (c, (i + 1) % 2) {
            ('b', _) => None,
            ('a', 0) => Some('b'),
            _ => Some('a'),
        })
        .collect())
}

fn phi_of_tree_key(key: &str) -> String {
    let letters = Word::parse(2, key)
        .expect("derooted tree key")
        .letters()
        .expect("s = 2");
    let out = phi_map(&letters[1..]).expect("admissible");
    if out.is_empty() {
        EMPTY_KEY.into()
    } else {
        out
    }
}

/// The bijection from `pascalize(derooted FT)` onto the subword graph, level by level.
pub fn bsharp_witness(_level: usize, key: &str) -> String {
    phi_of_tree_key(key)
}

#[derive(Debug, Clone, Serialize)]
pub struct IsoReport {
    pub isomorphic: bool,
    pub levels_checked: usize,
    pub level_sizes: (Vec<usize>, Vec<usize>),
    /// Whether the supplied witness was checked, or a bijection was searched for.
    pub method: &'static str,
    pub failure: Option<String>,
    /// Per level, pairs (key in first graph, key in second graph).
    pub witness: Vec<Vec<(String, String)>>,
}

/// Looks for a level-preserving bijection respecting multiplicities up to `n_max`.
///
/// With a witness the given map is verified. Without one, vertices are matched
/// by their images' parent edges and by a canonical code of their down-sets;
/// remaining ties are broken by order, so a negative answer from the search
/// is conclusive only when it comes from level sizes or edge counts.
pub fn graphs_isomorphic_up_to(
    g1: &LeveledGraph,
    g2: &LeveledGraph,
    n_max: usize,
    witness: Option<&dyn Fn(usize, &str) -> String>,
) -> IsoReport {
    let n_max = n_max.min(g1.depth()).min(g2.depth());
    let sizes1: Vec<usize> = (0..=n_max).map(|n| g1.level(n).len()).collect();
    let sizes2: Vec<usize> = (0..=n_max).map(|n| g2.level(n).len()).collect();
    let mut report = IsoReport {
        isomorphic: false,
        levels_checked: n_max,
        level_sizes: (sizes1.clone(), sizes2.clone()),
        method: if witness.is_some() { "witness" } else { "search" },
        failure: None,
        witness: Vec::new(),
    };
    if let Some(n) = (0..=n_max).find(|&n| sizes1[n] != sizes2[n]) {
        report.failure = Some(format!(
            "level {n} sizes differ: {} vs {}",
            sizes1[n], sizes2[n]
        ));
        return report;
    }
    let maps = match witness {
        Some(f) => map_from_witness(g1, g2, n_max, f),
        None => search(g1, g2, n_max),
    };
    let maps = match maps {
        Ok(m) => m,
        Err(msg) => {
            report.failure = Some(msg);
            return report;
        }
    };
    if let Err(msg) = check_edges(g1, g2, n_max, &maps) {
        report.failure = Some(msg);
        return report;
    }
    report.witness = maps
        .iter()
        .enumerate()
        .map(|(n, m)| {
            m.iter()
                .enumerate()
                .map(|(i, &j)| (g1.key(n, i).to_string(), g2.key(n, j).to_string()))
                .collect()
        })
        .collect();
    report.isomorphic = true;
    report
}

fn map_from_witness(
    g1: &LeveledGraph,
    g2: &LeveledGraph,
    n_max: usize,
    f: &dyn Fn(usize, &str) -> String,
) -> std::result::Result<Vec<Vec<usize>>, String> {
    let mut maps = Vec::new();
    for n in 0..=n_max {
        let mut used = vec![false; g2.level(n).len()];
        let mut m = Vec::with_capacity(used.len());
        for key in g1.level(n) {
            let image = f(n, key);
            let j = g2
                .index_of(n, &image)
                .ok_or_else(|| format!("level {n}: image {image:?} of {key:?} missing"))?;
            if used[j] {
                return Err(format!("level {n}: image {image:?} hit twice"));
            }
            used[j] = true;
            m.push(j);
        }
        maps.push(m);
    }
    Ok(maps)
}

fn check_edges(
    g1: &LeveledGraph,
    g2: &LeveledGraph,
    n_max: usize,
    maps: &[Vec<usize>],
) -> std::result::Result<(), String> {
    for n in 0..n_max {
        let mut count1 = 0u64;
        let mut count2 = 0u64;
        for i in 0..g1.level(n).len() {
            for &(j, m) in g1.out_edges(n, i) {
                count1 += m;
                let (fi, fj) = (maps[n][i], maps[n + 1][j]);
                let m2 = g2
                    .out_edges(n, fi)
                    .iter()
                    .find(|e| e.0 == fj)
                    .map(|e| e.1)
                    .unwrap_or(0);
                if m2 != m {
                    return Err(format!(
                        "level {n}: edge {} -> {} has multiplicity {m}, image has {m2}",
                        g1.key(n, i),
                        g1.key(n + 1, j)
                    ));
                }
            }
        }
        for i in 0..g2.level(n).len() {
            count2 += g2.out_edges(n, i).iter().map(|e| e.1).sum::<u64>();
        }
        if count1 != count2 {
            return Err(format!("level {n}: edge totals {count1} vs {count2}"));
        }
    }
    Ok(())
}

// Canonical codes of down-sets, shared between both graphs so equal codes mean equal shapes.
fn down_codes(
    g: &LeveledGraph,
    n_max: usize,
    intern: &mut HashMap<Vec<(u64, usize)>, usize>,
) -> Vec<Vec<usize>> {
    let mut codes = vec![Vec::new(); n_max + 1];
    codes[n_max] = vec![0; g.level(n_max).len()];
    for n in (0..n_max).rev() {
        let mut level = Vec::with_capacity(g.level(n).len());
        for i in 0..g.level(n).len() {
            let mut sig: Vec<(u64, usize)> = g
                .out_edges(n, i)
                .iter()
                .map(|&(j, m)| (m, codes[n + 1][j]))
                .collect();
            sig.sort_unstable();
            let next = intern.len() + 1;
            level.push(*intern.entry(sig).or_insert(next));
        }
        codes[n] = level;
    }
    codes
}

fn search(
    g1: &LeveledGraph,
    g2: &LeveledGraph,
    n_max: usize,
) -> std::result::Result<Vec<Vec<usize>>, String> {
    let mut intern = HashMap::new();
    let c1 = down_codes(g1, n_max, &mut intern);
    let c2 = down_codes(g2, n_max, &mut intern);
    if c1[0][0] != c2[0][0] {
        return Err("root down-sets differ".into());
    }
    let mut maps = vec![vec![0usize]];
    for n in 1..=n_max {
        let prev = &maps[n - 1];
        let sig1 = |j: usize| {
            let mut p: Vec<(usize, u64)> = g1
                .in_edges(n, j)
                .iter()
                .map(|&(i, m)| (prev[i], m))
                .collect();
            p.sort_unstable();
            (p, c1[n][j])
        };
        let sig2 = |j: usize| {
            let mut p: Vec<(usize, u64)> = g2.in_edges(n, j).to_vec();
            p.sort_unstable();
            (p, c2[n][j])
        };
        let mut pool: HashMap<(Vec<(usize, u64)>, usize), Vec<usize>> = HashMap::new();
        for j in (0..g2.level(n).len()).rev() {
            pool.entry(sig2(j)).or_default().push(j);
        }
        let mut m = Vec::with_capacity(g1.level(n).len());
        for j in 0..g1.level(n).len() {
            let s = sig1(j);
            let image = pool
                .get_mut(&s)
                .and_then(Vec::pop)
                .ok_or_else(|| format!("level {n}: no partner for {}", g1.key(n, j)))?;
            m.push(image);
        }
        maps.push(m);
    }
    Ok(maps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{bsharp_graph, fc_tree, motzkin_graph, pascalize, semi_pascal};
    use std::collections::HashSet;

    #[test]
    fn phi_examples() {
        assert_eq!(phi_map("").unwrap(), "");
        assert_eq!(phi_map("ab").unwrap(), "a");
        assert_eq!(phi_map("aa").unwrap(), "ab");
        assert_eq!(phi_map("ba").unwrap(), "b");
        assert!(phi_map("bb").is_err());
    }

    #[test]
    fn phi_injective_with_expected_image() {
        let tree = fc_tree(2, true, 10).unwrap();
        for n in 0..=10 {
            let images: Vec<String> = tree
                .level(n)
                .iter()
                .map(|k| phi_of_tree_key(k))
                .collect();
            let set: HashSet<&String> = images.iter().collect();
            assert_eq!(set.len(), images.len(), "level {n}");
            let mut expect: HashSet<String> = super::super::builders::subwords_of_beta(n)
                .into_iter()
                .map(|w| if w.is_empty() { EMPTY_KEY.to_string() } else { w })
                .collect();
            for k in (0..n).filter(|k| k % 2 == n % 2) {
                for w in super::super::builders::subwords_of_beta(k) {
                    expect.remove(if w.is_empty() { EMPTY_KEY } else { &w });
                }
            }
            let got: HashSet<String> = images.into_iter().collect();
            assert_eq!(got, expect, "level {n}");
        }
    }

    #[test]
    fn bsharp_is_pascalized_derooted_tree() {
        let p = pascalize(&fc_tree(2, true, 12).unwrap()).unwrap();
        let b = bsharp_graph(12);
        let r = graphs_isomorphic_up_to(&p, &b, 12, Some(&bsharp_witness));
        assert!(r.isomorphic, "{:?}", r.failure);
        assert_eq!(&r.level_sizes.0[..5], [1, 2, 4, 7, 12]);
    }

    #[test]
    fn different_graphs() {
        let r = graphs_isomorphic_up_to(&semi_pascal(5), &motzkin_graph(5), 5, None);
        assert!(!r.isomorphic);
        assert!(r.failure.unwrap().starts_with("level 1"));
        let g = motzkin_graph(6);
        assert!(graphs_isomorphic_up_to(&g, &g, 6, None).isomorphic);
    }
}
