use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{ChainModel, ChainParams};
use crate::error::{invalid, Error, Result};
use crate::graphs::{LeveledGraph, MotzkinGraph};
use crate::paths::{binomial, catalan, motzkin_dim};
use crate::scalar::Scalar;

/// Relative slack for negative weights in floating mode.
const FLOAT_SLACK: f64 = 1e-9;

fn pair(key: &str) -> (usize, usize) {
    let inner = key.trim_start_matches('(').trim_end_matches(')');
    let (a, b) = inner.split_once(',').expect("pair key");
    (a.parse().expect("pair key"), b.parse().expect("pair key"))
}

fn check_domain<S: Scalar>(l1: &S, l2: &S) -> Result<()> {
    let rest = S::one() - l1.clone() - l2.clone();
    let slack = if S::EXACT { 0.0 } else { 1e-15 };
    if l1.below_zero() || l2.below_zero() || rest.to_f64() < -slack || (S::EXACT && rest.below_zero()) {
        return invalid(format!(
            "({}, {}) outside U: need lambda1, lambda2 >= 0 and lambda1 + lambda2 <= 1",
            l1.render(),
            l2.render()
        ));
    }
    Ok(())
}

/// `nu(X_n = (n,0))` for the parameters `(lambda1, lambda2)`.
pub fn root_return_marginal<S: Scalar>(l1: &S, l2: &S, n: usize) -> Result<S> {
    check_domain(l1, l2)?;
    let prod = l1.clone() * l2.clone();
    let l3 = S::one() - l1.clone() - l2.clone();
    let mut sum = S::zero();
    for l in 0..=n / 2 {
        let c = binomial(n as i64, 2 * l as i64) * catalan(l as u64);
        sum = sum + S::from_biguint(&c) * prod.powi(l as u32) * l3.powi((n - 2 * l) as u32);
    }
    Ok(sum)
}

/// Rational point `(x^2, 1) / (x^2 + x + 1)` on the curve `lambda1 lambda2 = (1 - lambda1 - lambda2)^2`,
/// ordered with `lambda1 >= lambda2`.
pub fn motzkin_curve_point(x: &BigRational) -> Result<(BigRational, BigRational)> {
    if *x <= BigRational::zero() {
        return invalid("curve parameter must be positive");
    }
    let den = x * x + x + BigRational::one();
    let a = x * x / &den;
    let b = BigRational::one() / den;
    Ok(if a >= b { (a, b) } else { (b, a) })
}

/// Per-path weights `w_{n,d} = nu(X_n = (n,d)) / dim(n,d)` of the Motzkin chain.
#[derive(Debug, Clone)]
pub struct MotzkinChain<S> {
    lambda1: S,
    lambda2: S,
    weights: Vec<Vec<S>>,
}

impl<S: Scalar> MotzkinChain<S> {
    /// Solves for the weights up to `levels`; fails with `NotCentral` as soon as a weight is negative.
    pub fn new(lambda1: S, lambda2: S, levels: usize) -> Result<MotzkinChain<S>> {
        check_domain(&lambda1, &lambda2)?;
        let (lambda1, lambda2) = if lambda2.to_f64() > lambda1.to_f64() {
            (lambda2, lambda1)
        } else {
            (lambda1, lambda2)
        };
        let mut weights: Vec<Vec<S>> = vec![vec![S::one()]];
        for n in 1..=levels {
            let v0 = root_return_marginal(&lambda1, &lambda2, n)?;
            let mut row = vec![v0 / S::from_biguint(&motzkin_dim(n as u64, 0))];
            let prev = &weights[n - 1];
            for d in 0..n {
                // Centrality at (n-1, d): its weight is the sum over its three children.
                let mut w = prev[d].clone() - row[d].clone();
                if d > 0 {
                    w = w - row[d - 1].clone();
                }
                if w.below_zero() {
                    let tiny = !S::EXACT && -w.to_f64() <= FLOAT_SLACK * prev[d].to_f64();
                    if !tiny {
                        return Err(Error::NotCentral(format!(
                            "({}, {}) forces weight {} at vertex ({n},{}); no central measure has this root-return law",
                            lambda1.render(),
                            lambda2.render(),
                            w.render(),
                            d + 1
                        )));
                    }
                    w = S::zero();
                }
                row.push(w);
            }
            weights.push(row);
        }
        Ok(MotzkinChain {
            lambda1,
            lambda2,
            weights,
        })
    }

    pub fn lambdas(&self) -> (&S, &S) {
        (&self.lambda1, &self.lambda2)
    }

    pub fn levels(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn weight(&self, n: usize, d: usize) -> S {
        self.weights[n][d].clone()
    }

    /// `v_{n,d} = nu(X_n = (n,d))`.
    pub fn marginal(&self, n: usize, d: usize) -> S {
        self.weight(n, d) * S::from_biguint(&motzkin_dim(n as u64, d as u64))
    }

    pub fn chain(&self) -> Result<ChainModel<S>> {
        let graph = LeveledGraph::with_levels(Arc::new(MotzkinGraph), self.levels());
        let params = ChainParams::Motzkin {
            lambda1: self.lambda1.render(),
            lambda2: self.lambda2.render(),
        };
        ChainModel::from_fn(graph, params, |_, from, to| {
            let (n, d) = pair(from);
            let (_, e) = pair(to);
            let w = &self.weights[n][d];
            if w.is_zero() {
                return None;
            }
            Some(self.weights[n + 1][e].clone() / w.clone())
        })
    }
}

/// The Motzkin chain `M^(lambda1, lambda2)`, if the parameters define a central measure.
pub fn motzkin_chain<S: Scalar>(lambda1: S, lambda2: S, levels: usize) -> Result<ChainModel<S>> {
    MotzkinChain::new(lambda1, lambda2, levels)?.chain()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::verify_centrality;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn root_return_values() {
        for n in 0..8 {
            assert_eq!(root_return_marginal(&q(0, 1), &q(0, 1), n).unwrap(), q(1, 1));
        }
        assert_eq!(root_return_marginal(&q(1, 2), &q(1, 2), 2).unwrap(), q(1, 4));
        assert_eq!(root_return_marginal(&q(3, 10), &q(1, 5), 1).unwrap(), q(1, 2));
        assert!(root_return_marginal(&q(3, 4), &q(1, 2), 1).is_err());
        assert!(root_return_marginal(&q(-1, 4), &q(1, 2), 1).is_err());
    }

    #[test]
    fn curve_points_are_central() {
        let mut points: Vec<_> = (1..=4).map(|x| motzkin_curve_point(&q(x, 1)).unwrap()).collect();
        points.push(motzkin_curve_point(&q(3, 2)).unwrap());
        points.push((q(1, 1), q(0, 1)));
        for (a, b) in points {
            let m = MotzkinChain::new(a.clone(), b.clone(), 12).unwrap();
            for n in 0..=12 {
                let total = (0..=n).fold(q(0, 1), |acc, d| acc + m.marginal(n, d));
                assert_eq!(total, q(1, 1));
            }
            let chain = m.chain().unwrap();
            assert!(verify_centrality(&chain, 10, 0.0).pass, "({a}, {b})");
        }
    }

    #[test]
    fn symmetric_walk_weights() {
        // (1/3, 1/3): w_{n,d} = (d + 1) / 3^n
        let m = MotzkinChain::new(q(1, 3), q(1, 3), 6).unwrap();
        for d in 0..=6 {
            assert_eq!(m.weight(6, d), q(d as i64 + 1, 729));
        }
    }

    #[test]
    fn off_curve_points_rejected() {
        for (a, b) in [(q(3, 10), q(1, 5)), (q(0, 1), q(0, 1)), (q(1, 2), q(1, 2)), (q(1, 2), q(0, 1))] {
            let err = MotzkinChain::new(a, b, 10).unwrap_err();
            assert!(matches!(err, Error::NotCentral(_)), "{err}");
        }
        assert!(matches!(
            MotzkinChain::new(0.3f64, 0.2f64, 10).unwrap_err(),
            Error::NotCentral(_)
        ));
    }

    #[test]
    fn order_does_not_matter() {
        let (a, b) = motzkin_curve_point(&q(2, 1)).unwrap();
        let x = MotzkinChain::new(a.clone(), b.clone(), 8).unwrap();
        let y = MotzkinChain::new(b, a, 8).unwrap();
        assert_eq!(x.weights, y.weights);
    }

    #[test]
    fn distinct_points_differ() {
        let chains: Vec<_> = (1..=4)
            .map(|x| {
                let (a, b) = motzkin_curve_point(&q(x, 1)).unwrap();
                motzkin_chain(a, b, 6).unwrap()
            })
            .collect();
        for i in 0..chains.len() {
            for j in i + 1..chains.len() {
                assert_ne!(chains[i].to_csv(), chains[j].to_csv());
            }
        }
    }

    #[test]
    fn float_mode_on_curve() {
        let m = MotzkinChain::new(4.0f64 / 7.0, 1.0 / 7.0, 20).unwrap();
        let chain = m.chain().unwrap();
        assert!(verify_centrality(&chain, 10, 1e-12).pass);
    }
}
