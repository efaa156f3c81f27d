use std::sync::Arc;

use super::{ChainModel, ChainParams};
use crate::error::{invalid, Result};
use crate::graphs::{LeveledGraph, SemiPascal};
use crate::scalar::Scalar;

fn height(key: &str) -> usize {
    let inner = key.trim_start_matches('(').trim_end_matches(')');
    inner.split_once(',').expect("pair key").1.parse().expect("pair key")
}

/// Up-probabilities of the ballot chain with parameter `lambda`.
#[derive(Debug, Clone)]
pub struct BallotChain<S> {
    lambda: S,
    up: Vec<S>,
}

impl<S: Scalar> BallotChain<S> {
    pub fn new(lambda: S) -> Result<BallotChain<S>> {
        let x = lambda.to_f64();
        let half = S::ratio(1, 2);
        let low = if S::EXACT {
            (lambda.clone() - half).below_zero()
        } else {
            x < 0.5
        };
        if low || x > 1.0 || (S::EXACT && (S::one() - lambda.clone()).below_zero()) {
            return invalid(format!("lambda = {} outside [1/2, 1]", lambda.render()));
        }
        Ok(BallotChain {
            lambda,
            up: Vec::new(),
        })
    }

    pub fn lambda(&self) -> &S {
        &self.lambda
    }

    /// Probability of stepping up from height `s`.
    pub fn p_up(&self, s: usize) -> S {
        let l = self.lambda.clone();
        let one = S::one();
        if S::EXACT {
            if l == S::ratio(1, 2) {
                return S::ratio(1, 2) * S::ratio(s as i64 + 2, s as i64 + 1);
            }
            let m = one - l.clone();
            let e = s as u32;
            return (m.powi(e + 2) - l.powi(e + 2)) / (m.powi(e + 1) - l.powi(e + 1));
        }
        // lambda * (1 + q + ... + q^(s+1)) / (1 + q + ... + q^s) with q = (1 - lambda) / lambda.
        let q = (one.clone() - l.clone()) / l.clone();
        let mut sum = one.clone();
        let mut term = one;
        for _ in 0..s {
            term = term * q.clone();
            sum = sum + term.clone();
        }
        let next = sum.clone() + term * q;
        l * next / sum
    }

    fn up_cached(&mut self, s: usize) -> S {
        while self.up.len() <= s {
            let h = self.up.len();
            let p = self.p_up(h);
            self.up.push(p);
        }
        self.up[s].clone()
    }

    /// The chain on the semi-Pascal graph up to `levels`.
    pub fn chain(mut self, levels: usize) -> Result<ChainModel<S>> {
        let graph = LeveledGraph::with_levels(Arc::new(SemiPascal), levels);
        let params = ChainParams::Ballot {
            lambda: self.lambda.render(),
        };
        ChainModel::from_fn(graph, params, |_, from, to| {
            let (a, b) = (height(from), height(to));
            let up = self.up_cached(a);
            Some(if b > a { up } else { S::one() - up })
        })
    }
}

/// The ballot chain `M^lambda` on the semi-Pascal graph.
pub fn ballot_chain<S: Scalar>(lambda: S, levels: usize) -> Result<ChainModel<S>> {
    BallotChain::new(lambda)?.chain(levels)
}

/// Steps up with a fixed probability from every height above 0. Not central for `p` in (0, 1).
pub fn constant_up_chain<S: Scalar>(p: S, levels: usize) -> Result<ChainModel<S>> {
    if p.below_zero() || (S::one() - p.clone()).below_zero() {
        return invalid(format!("p = {} is not a probability", p.render()));
    }
    let graph = LeveledGraph::with_levels(Arc::new(SemiPascal), levels);
    let params = ChainParams::Custom {
        description: format!("constant-up({})", p.render()),
    };
    ChainModel::from_fn(graph, params, |_, from, to| {
        let (a, b) = (height(from), height(to));
        Some(match (a, b > a) {
            (0, _) => S::one(),
            (_, true) => p.clone(),
            (_, false) => S::one() - p.clone(),
        })
    })
}
