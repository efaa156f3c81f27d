//! Label words for vertices of the s-Fuss-Catalan trees, and ends.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Key used for the empty word.
pub const EMPTY_KEY: &str = "ε";

/// A vertex of the s-Fuss-Catalan tree, as the labels along its geodesic.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word {
    s: u32,
    labels: Vec<u8>,
}

/// Whether `next` may follow a vertex labelled `prev`.
pub fn admissible_after(s: u32, prev: u32, next: u32) -> bool {
    next <= s && next + prev > s
}

fn check_order(s: u32) -> Result<()> {
    if !(2..=9).contains(&s) {
        return invalid(format!("tree order s = {s} must lie in 2..=9"));
    }
    Ok(())
}

fn parse_labels(s: u32, text: &str) -> Result<Vec<u8>> {
    let text = text.trim();
    if text.is_empty() || text == EMPTY_KEY || text == "∅" {
        return Ok(Vec::new());
    }
    let letters = text.chars().all(|c| c == 'a' || c == 'b');
    if letters {
        if s != 2 {
            return invalid("letters a/b are only defined for s = 2");
        }
        return Ok(text.chars().map(|c| if c == 'a' { 2 } else { 1 }).collect());
    }
    text.chars()
        .map(|c| match c.to_digit(10) {
            Some(d) if d >= 1 && d <= s => Ok(d as u8),
            _ => invalid(format!("bad label {c:?} for s = {s}")),
        })
        .collect()
}

impl Word {
    pub fn root(s: u32) -> Word {
        Word {
            s,
            labels: Vec::new(),
        }
    }

    pub fn new(s: u32, labels: Vec<u8>) -> Result<Word> {
        check_order(s)?;
        let mut prev = 1;
        for (i, &l) in labels.iter().enumerate() {
            if !admissible_after(s, prev, l as u32) {
                return invalid(format!(
                    "label {l} at position {} cannot follow label {prev} (s = {s})",
                    i + 1
                ));
            }
            prev = l as u32;
        }
        Ok(Word { s, labels })
    }

    /// Parses label digits, the letters `a`/`b` (s = 2), or the empty-word marker.
    pub fn parse(s: u32, text: &str) -> Result<Word> {
        check_order(s)?;
        Word::new(s, parse_labels(s, text)?)
    }

    pub fn order(&self) -> u32 {
        self.s
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Number of children `l(v)`; the root has label 1.
    pub fn label(&self) -> u32 {
        self.labels.last().map(|&l| l as u32).unwrap_or(1)
    }

    /// `r(w) = 1 + sum of labels`.
    pub fn label_sum(&self) -> u64 {
        1 + self.labels.iter().map(|&l| l as u64).sum::<u64>()
    }

    pub fn child_labels(&self) -> impl Iterator<Item = u32> {
        let (s, l) = (self.s, self.label());
        (s + 1 - l..=s).rev()
    }

    pub fn children(&self) -> Vec<Word> {
        self.child_labels().map(|l| self.pushed(l)).collect()
    }

    pub fn parent(&self) -> Option<Word> {
        if self.labels.is_empty() {
            return None;
        }
        Some(Word {
            s: self.s,
            labels: self.labels[..self.labels.len() - 1].to_vec(),
        })
    }

    /// Appends a label, which must be admissible.
    pub fn push(&self, label: u32) -> Result<Word> {
        if !admissible_after(self.s, self.label(), label) {
            return invalid(format!("label {label} cannot follow {}", self.label()));
        }
        Ok(self.pushed(label))
    }

    fn pushed(&self, label: u32) -> Word {
        let mut labels = self.labels.clone();
        labels.push(label as u8);
        Word { s: self.s, labels }
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word {
            s: self.s,
            labels: self.labels[..len.min(self.labels.len())].to_vec(),
        }
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.labels.starts_with(&self.labels)
    }

    /// Canonical key: label digits, or [`EMPTY_KEY`].
    pub fn key(&self) -> String {
        if self.labels.is_empty() {
            return EMPTY_KEY.to_string();
        }
        self.labels.iter().map(|l| char::from(b'0' + l)).collect()
    }

    /// Letter form for s = 2 (label 2 is `a`, label 1 is `b`).
    pub fn letters(&self) -> Option<String> {
        if self.s != 2 {
            return None;
        }
        Some(
            self.labels
                .iter()
                .map(|&l| if l == 2 { 'a' } else { 'b' })
                .collect(),
        )
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

/// Longest common prefix `s(v, w)`.
pub fn common_prefix(v: &Word, w: &Word) -> Word {
    assert_eq!(v.s, w.s, "words from different trees");
    let n = v
        .labels
        .iter()
        .zip(&w.labels)
        .take_while(|(a, b)| a == b)
        .count();
    v.prefix(n)
}

/// An eventually periodic end `prefix period period ...`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndSpec {
    s: u32,
    prefix: Vec<u8>,
    period: Vec<u8>,
}

impl EndSpec {
    pub fn new(s: u32, prefix: Vec<u8>, period: Vec<u8>) -> Result<EndSpec> {
        check_order(s)?;
        if period.is_empty() {
            return invalid("end period must be nonempty");
        }
        let mut probe = prefix.clone();
        probe.extend_from_slice(&period);
        probe.extend_from_slice(&period);
        Word::new(s, probe)?;
        Ok(EndSpec { s, prefix, period })
    }

    /// The ray whose labels are all `s`.
    pub fn top_ray(s: u32) -> EndSpec {
        EndSpec {
            s,
            prefix: Vec::new(),
            period: vec![s as u8],
        }
    }

    /// Parses `"prefix:period"`, or a bare period.
    pub fn parse(s: u32, text: &str) -> Result<EndSpec> {
        let (prefix, period) = match text.split_once(':') {
            Some((p, q)) => (parse_labels(s, p)?, parse_labels(s, q)?),
            None => (Vec::new(), parse_labels(s, text)?),
        };
        EndSpec::new(s, prefix, period)
    }

    pub fn order(&self) -> u32 {
        self.s
    }

    /// Label of `t_k` for `k >= 1`.
    pub fn label_at(&self, k: usize) -> u32 {
        assert!(k >= 1, "t_0 is the root");
        let i = k - 1;
        let l = if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.period[(i - self.prefix.len()) % self.period.len()]
        };
        l as u32
    }

    /// The vertex `t_k`.
    pub fn vertex(&self, k: usize) -> Word {
        Word {
            s: self.s,
            labels: (1..=k).map(|i| self.label_at(i) as u8).collect(),
        }
    }

    /// `r(t_k)`.
    pub fn label_sum(&self, k: usize) -> u64 {
        1 + (1..=k).map(|i| self.label_at(i) as u64).sum::<u64>()
    }

    /// Length of the common prefix of `w` with the end.
    pub fn agreement(&self, w: &Word) -> usize {
        w.labels
            .iter()
            .enumerate()
            .take_while(|(i, &l)| self.label_at(i + 1) == l as u32)
            .count()
    }

    pub fn describe(&self) -> String {
        let p: String = self.prefix.iter().map(|l| char::from(b'0' + l)).collect();
        let q: String = self.period.iter().map(|l| char::from(b'0' + l)).collect();
        format!("{p}:{q}")
    }
}
