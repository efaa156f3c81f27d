//! Ballot and Motzkin lattice paths in the upper-right quadrant.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Longest span accepted by [`enumerate_paths`] unless a larger cap is passed.
pub const DEFAULT_ENUMERATION_CAP: u64 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePoint {
    pub x: u64,
    pub y: u64,
}

impl LatticePoint {
    pub fn new(x: u64, y: u64) -> Self {
        LatticePoint { x, y }
    }
}

/// A single path step. The derived order (D < L < U) is the enumeration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Step {
    Down,
    Level,
    Up,
}

impl Step {
    pub fn delta(self) -> i64 {
        match self {
            Step::Down => -1,
            Step::Level => 0,
            Step::Up => 1,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Step::Down => 'D',
            Step::Level => 'L',
            Step::Up => 'U',
        }
    }
}

/// Which steps a path may take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepSet {
    /// Up and down only.
    Ballot,
    /// Up, down and level.
    Motzkin,
}

impl StepSet {
    pub fn steps(self) -> &'static [Step] {
        match self {
            StepSet::Ballot => &[Step::Down, Step::Up],
            StepSet::Motzkin => &[Step::Down, Step::Level, Step::Up],
        }
    }
}

/// `binom(n, k)`, zero whenever `k < 0`, `k > n` or `n < 0`.
pub fn binomial(n: i64, k: i64) -> BigUint {
    if n < 0 || k < 0 || k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k) as u64;
    let n = n as u64;
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

// Binomial whose bottom entry is `num / 2`; zero when that is not an integer.
fn binomial_half(n: i64, num: i64) -> BigUint {
    if num.rem_euclid(2) != 0 {
        return BigUint::zero();
    }
    binomial(n, num / 2)
}

pub fn catalan(n: u64) -> BigUint {
    binomial(2 * n as i64, n as i64) / (n + 1)
}

fn checked_span(from: LatticePoint, to: LatticePoint) -> Result<i64> {
    if to.x < from.x {
        return invalid(format!("reversed interval: x {} -> {}", from.x, to.x));
    }
    Ok((to.x - from.x) as i64)
}

fn reflected(n: i64, b: i64, d: i64) -> BigUint {
    let pos = BigInt::from(binomial_half(n, n - d + b));
    let neg = BigInt::from(binomial_half(n, n + d + b + 2));
    (pos - neg)
        .to_biguint()
        .expect("reflection count is nonnegative")
}

/// Number of up/down paths from `from` to `to` that never go below height 0.
pub fn count_ballot(from: LatticePoint, to: LatticePoint) -> Result<BigUint> {
    let n = checked_span(from, to)?;
    Ok(reflected(n, from.y as i64, to.y as i64))
}

/// Number of up/down/level paths from `from` to `to` that never go below height 0.
pub fn count_motzkin(from: LatticePoint, to: LatticePoint) -> Result<BigUint> {
    let n = checked_span(from, to)?;
    let (b, d) = (from.y as i64, to.y as i64);
    let mut total = BigUint::zero();
    for k in 0..=n {
        let inner = BigInt::from(binomial_half(n - k, n - k + d - b))
            - BigInt::from(binomial_half(n - k, n - k + b + d + 2));
        let inner = inner.to_biguint().expect("reflection count is nonnegative");
        total += binomial(n, k) * inner;
    }
    Ok(total)
}

/// The Motzkin number `m_n`.
pub fn motzkin_number(n: u64) -> BigUint {
    let mut total = BigUint::zero();
    let mut fact = vec![BigUint::one()];
    for i in 1..=n + 1 {
        let next = &fact[(i - 1) as usize] * i;
        fact.push(next);
    }
    for l in 0..=n / 2 {
        let den = &fact[(n - 2 * l) as usize] * &fact[(l + 1) as usize] * &fact[l as usize];
        total += &fact[n as usize] / den;
    }
    total
}

/// Number of Motzkin paths from the origin to `(n, d)`.
pub fn motzkin_dim(n: u64, d: u64) -> BigUint {
    count_motzkin(LatticePoint::new(0, 0), LatticePoint::new(n, d)).expect("forward interval")
}

/// Every admissible step sequence from `from` to `to`, in lexicographic order.
pub fn enumerate_paths(
    from: LatticePoint,
    to: LatticePoint,
    steps: StepSet,
    cap: u64,
) -> Result<Vec<Vec<Step>>> {
    let n = checked_span(from, to)? as u64;
    if n > cap {
        return invalid(format!("span {n} exceeds enumeration cap {cap}"));
    }
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n as usize);
    walk(
        from.y as i64,
        to.y as i64,
        n as usize,
        steps.steps(),
        &mut current,
        &mut out,
    );
    Ok(out)
}

fn walk(
    height: i64,
    target: i64,
    remaining: usize,
    steps: &[Step],
    current: &mut Vec<Step>,
    out: &mut Vec<Vec<Step>>,
) {
    if remaining == 0 {
        if height == target {
            out.push(current.clone());
        }
        return;
    }
    if (height - target).unsigned_abs() > remaining as u64 {
        return;
    }
    for &step in steps {
        let h = height + step.delta();
        if h < 0 {
            continue;
        }
        current.push(step);
        walk(h, target, remaining - 1, steps, current, out);
        current.pop();
    }
}

/// Renders a step sequence as a string of `U`, `D`, `L`.
pub fn steps_to_string(steps: &[Step]) -> String {
    steps.iter().map(|s| s.letter()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: u64, y: u64) -> LatticePoint {
        LatticePoint::new(x, y)
    }

    #[test]
    fn ballot_examples() {
        assert_eq!(count_ballot(p(0, 0), p(4, 0)).unwrap(), 2u32.into());
        assert_eq!(count_ballot(p(0, 0), p(3, 0)).unwrap(), 0u32.into());
        assert_eq!(count_ballot(p(1, 1), p(5, 1)).unwrap(), 5u32.into());
        for n in 0..=12 {
            assert_eq!(count_ballot(p(0, 0), p(n, n)).unwrap(), 1u32.into());
        }
        assert!(count_ballot(p(3, 0), p(1, 0)).is_err());
    }

    #[test]
    fn motzkin_examples() {
        assert_eq!(count_motzkin(p(0, 0), p(4, 0)).unwrap(), 9u32.into());
        assert_eq!(count_motzkin(p(0, 0), p(2, 1)).unwrap(), 2u32.into());
        for n in 0..=12 {
            assert_eq!(count_motzkin(p(0, 0), p(n, n)).unwrap(), 1u32.into());
        }
        assert!(count_motzkin(p(2, 0), p(1, 0)).is_err());
    }

    #[test]
    fn motzkin_numbers() {
        let expect = [1u32, 1, 2, 4, 9, 21, 51, 127, 323];
        for (n, &m) in expect.iter().enumerate() {
            assert_eq!(motzkin_number(n as u64), m.into());
        }
        for n in 0..=30u64 {
            let via_catalan: BigUint = (0..=n / 2)
                .map(|k| binomial(n as i64, 2 * k as i64) * catalan(k))
                .sum();
            assert_eq!(motzkin_number(n), via_catalan);
            assert_eq!(motzkin_number(n), motzkin_dim(n, 0));
        }
    }

    #[test]
    fn enumeration_examples() {
        let ud = enumerate_paths(p(0, 0), p(2, 0), StepSet::Ballot, 16).unwrap();
        assert_eq!(ud.iter().map(|s| steps_to_string(s)).collect::<Vec<_>>(), ["UD"]);
        let m = enumerate_paths(p(0, 0), p(2, 0), StepSet::Motzkin, 16).unwrap();
        assert_eq!(m.iter().map(|s| steps_to_string(s)).collect::<Vec<_>>(), ["LL", "UD"]);
        assert!(enumerate_paths(p(0, 0), p(1, 0), StepSet::Ballot, 16)
            .unwrap()
            .is_empty());
        assert!(enumerate_paths(p(0, 0), p(17, 1), StepSet::Ballot, 16).is_err());
    }

    #[test]
    fn pascal_recurrences() {
        for n in 1..=14u64 {
            for k in 0..=n {
                let lhs = count_ballot(p(0, 0), p(n, k)).unwrap();
                let mut rhs = count_ballot(p(0, 0), p(n - 1, k + 1)).unwrap();
                if k >= 1 {
                    rhs += count_ballot(p(0, 0), p(n - 1, k - 1)).unwrap();
                }
                assert_eq!(lhs, rhs);
                let lhs = motzkin_dim(n, k);
                let mut rhs = motzkin_dim(n - 1, k) + motzkin_dim(n - 1, k + 1);
                if k >= 1 {
                    rhs += motzkin_dim(n - 1, k - 1);
                }
                assert_eq!(lhs, rhs);
            }
        }
    }
}
