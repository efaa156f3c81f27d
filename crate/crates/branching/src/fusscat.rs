//! Fuss-Catalan numbers, the generating function `G_s` and bracket dimensions.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, One, Zero};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::graphs::Word;
use crate::paths::binomial;
use crate::scalar::float_const;

/// Iteration cap of the fixed-point solver.
pub const MAX_ITERATIONS: usize = 200;
/// Residual tolerance of the fixed-point solver (f64).
pub const TOLERANCE: f64 = 1e-13;
/// Slack accepted above the critical point.
pub const CRITICAL_SLACK: f64 = 1e-12;

fn check_order(s: u32) -> Result<()> {
    if s < 2 {
        return invalid(format!("tree order s = {s} < 2"));
    }
    Ok(())
}

/// `C^s_n = binom((s+1)n+1, n) / ((s+1)n+1)`.
pub fn fuss_catalan(s: u32, n: u64) -> Result<BigUint> {
    check_order(s)?;
    raney(s, 1, n)
}

/// `l / ((s+1)n+l) * binom((s+1)n+l, n)`, the coefficient of `z^n` in `G_s^l`.
pub fn raney(s: u32, l: u64, n: u64) -> Result<BigUint> {
    check_order(s)?;
    if l == 0 {
        return Ok(if n == 0 { BigUint::one() } else { BigUint::zero() });
    }
    let top = (s as u64 + 1) * n + l;
    Ok(binomial(top as i64, n as i64) * l / top)
}

static SEQUENCES: OnceLock<RwLock<HashMap<u32, Arc<Vec<BigUint>>>>> = OnceLock::new();

/// `C^s_0, ..., C^s_n` built from the recursion `G = 1 + z G^(s+1)`, independent of the closed form.
fn series(s: u32, n: usize) -> Arc<Vec<BigUint>> {
    let cache = SEQUENCES.get_or_init(Default::default);
    if let Some(seq) = cache.read().unwrap().get(&s) {
        if seq.len() > n {
            return seq.clone();
        }
    }
    let mut guard = cache.write().unwrap();
    if let Some(seq) = guard.get(&s) {
        if seq.len() > n {
            return seq.clone();
        }
    }
    let len = (n + 1).max(32);
    let mut c: Vec<BigUint> = vec![BigUint::one()];
    for m in 1..len {
        // [z^m] G = [z^(m-1)] G^(s+1), using the coefficients found so far.
        let mut power = vec![BigUint::one()];
        for _ in 0..=s {
            power = convolve(&power, &c, m - 1);
        }
        c.push(power[m - 1].clone());
    }
    let seq = Arc::new(c);
    guard.insert(s, seq.clone());
    seq
}

fn convolve(a: &[BigUint], b: &[BigUint], max: usize) -> Vec<BigUint> {
    let mut out = vec![BigUint::zero(); max + 1];
    for (i, x) in a.iter().enumerate().take(max + 1) {
        for (j, y) in b.iter().enumerate().take(max + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// `[z^n] G_s^l` by repeated convolution of the coefficient sequence.
pub fn power_coeff_by_convolution(s: u32, l: u64, n: u64) -> Result<BigUint> {
    check_order(s)?;
    let n = n as usize;
    let c = series(s, n);
    let mut power = vec![BigUint::one()];
    for _ in 0..l {
        power = convolve(&power, &c[..=n], n);
    }
    Ok(power.get(n).cloned().unwrap_or_default())
}

/// `[z^n] G_s^l`, by the closed form, cross-checked against convolution.
pub fn power_coeff(s: u32, l: u64, n: u64) -> Result<BigUint> {
    if l == 0 {
        return invalid("power l must be at least 1");
    }
    let closed = raney(s, l, n)?;
    let conv = power_coeff_by_convolution(s, l, n)?;
    if closed != conv {
        return Err(Error::Inconsistent(format!(
            "[z^{n}] G_{s}^{l}: closed form {closed} but convolution {conv}"
        )));
    }
    Ok(closed)
}

/// `s^s / (s+1)^(s+1)`.
pub fn critical_point<T: Float + FromPrimitive>(s: u32) -> T {
    let s_t: T = float_const(s as f64);
    let one = T::one();
    s_t.powi(s as i32) / (s_t + one).powi(s as i32 + 1)
}

pub fn critical_point_exact(s: u32) -> BigRational {
    let num = BigUint::from(s).pow(s);
    let den = BigUint::from(s + 1).pow(s + 1);
    BigRational::new(num.into(), den.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GenFnEval<T> {
    pub s: u32,
    pub z: T,
    pub value: T,
    /// `None` at the critical point, where the derivative is infinite.
    pub derivative: Option<T>,
    pub residual: T,
}

/// Evaluates the power-series branch of `G = z G^(s+1) + 1`.
pub fn g_eval<T: Float + FromPrimitive>(s: u32, z: T) -> Result<GenFnEval<T>> {
    check_order(s)?;
    let one = T::one();
    let crit: T = critical_point(s);
    let slack: T = float_const(CRITICAL_SLACK);
    if !(z >= T::zero()) || z > crit + slack {
        return invalid(format!(
            "z = {} outside [0, {}]",
            z.to_f64().unwrap_or(f64::NAN),
            crit.to_f64().unwrap_or(f64::NAN)
        ));
    }
    let s_t: T = float_const(s as f64);
    let sp1 = s_t + one;
    let upper = sp1 / s_t;
    let tol: T = float_const::<T>(TOLERANCE).max(T::epsilon() * float_const(8.0));
    let h = |g: T| z * g.powi(s as i32 + 1) - g + one;

    let value = if z >= crit {
        upper
    } else {
        let mut g = one;
        let mut done = false;
        // Newton from 1 increases monotonically to the smallest root because h is convex.
        for _ in 0..MAX_ITERATIONS {
            let hv = h(g);
            if hv.abs() <= tol * float_const(1e-3) {
                done = true;
                break;
            }
            let dh = sp1 * z * g.powi(s as i32) - one;
            if dh >= T::zero() {
                break;
            }
            let next = g - hv / dh;
            if !(next >= g) || next > upper {
                break;
            }
            if next - g <= T::epsilon() * g {
                g = next;
                done = true;
                break;
            }
            g = next;
        }
        if !done {
            let (mut lo, mut hi) = (g.max(one), upper);
            for _ in 0..MAX_ITERATIONS {
                let mid = (lo + hi) / float_const(2.0);
                if h(mid) > T::zero() {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= T::epsilon() * hi {
                    break;
                }
            }
            g = (lo + hi) / float_const(2.0);
        }
        g
    };
    let residual = h(value).abs();
    if residual > tol {
        return Err(Error::NoConvergence(format!(
            "G_{s}({}) residual {}",
            z.to_f64().unwrap_or(f64::NAN),
            residual.to_f64().unwrap_or(f64::NAN)
        )));
    }
    let denom = one - sp1 * z * value.powi(s as i32);
    let derivative = if z >= crit || denom <= T::zero() {
        None
    } else {
        Some(value.powi(s as i32 + 1) / denom)
    };
    Ok(GenFnEval {
        s,
        z,
        value,
        derivative,
        residual,
    })
}

/// Walk level whose dimension the bracket computes: `2n` or `2n - 1` depending on the parity of `len`.
///
/// Saturates at 0 for `n = 0` with odd `len`, where no walk exists.
pub fn bracket_level(n: u64, len: usize) -> u64 {
    (2 * n).saturating_sub(len as u64 % 2)
}

/// `[n; w]`: closed-form number of rooted walks on `T^s` ending at `w` after `bracket_level(n, |w|)` steps.
pub fn bracket_dim(s: u32, n: u64, w: &Word) -> Result<BigUint> {
    if w.order() != s {
        return invalid("word belongs to a different tree");
    }
    let floor = (w.len() as u64).div_ceil(2);
    if n < floor || (n == 0 && w.len() % 2 == 1) {
        return invalid(format!("n = {n} below the floor {floor} for |w| = {}", w.len()));
    }
    raney(s, w.label_sum(), n - floor)
}

/// The bracket on the derooted tree; `w` must start at the derooted root.
///
/// The derooted root is at distance `|w| - 1`, so walks have `2n` steps when
/// `|w|` is odd and `2n - 1` steps when `|w|` is even.
pub fn bracket_dim_derooted(s: u32, n: u64, w: &Word) -> Result<BigUint> {
    if w.order() != s {
        return invalid("word belongs to a different tree");
    }
    if w.is_empty() {
        return invalid("the empty word is not a vertex of the derooted tree");
    }
    let dist = w.len() as u64 - 1;
    let floor = dist.div_ceil(2);
    if n < floor || (n == 0 && dist % 2 == 1) {
        return invalid(format!("n = {n} below the floor {floor} for |w| = {}", w.len()));
    }
    raney(s, w.label_sum() - 1, n - floor)
}

/// Walk level for [`bracket_dim_derooted`].
pub fn bracket_level_derooted(n: u64, len: usize) -> u64 {
    bracket_level(n, len - 1)
}

/// `f(eta) = 4 eta G'(eta) / G(eta)` on the Fibonacci tree.
pub fn lln_limit(eta: f64) -> Result<f64> {
    let crit: f64 = critical_point(2);
    if !(0.0..crit).contains(&eta) {
        return invalid(format!("eta = {eta} outside [0, 4/27)"));
    }
    let g = g_eval::<f64>(2, eta)?;
    Ok(4.0 * eta * g.derivative.expect("below critical") / g.value)
}

/// `E[Y^(j)] = 2 j eta G'(eta) / G(eta)`: mean of a loop increment at a vertex with `j` children.
pub fn increment_mean(s: u32, j: u32, eta: f64) -> Result<f64> {
    let g = g_eval::<f64>(s, eta)?;
    let d = g
        .derivative
        .ok_or_else(|| Error::InvalidInput("increment mean is infinite at the critical point".into()))?;
    Ok(2.0 * j as f64 * eta * d / g.value)
}

/// Unverified extension of [`lln_limit`] to `s >= 3`: `2 eta (G_s^s)' / G_s^s`.
pub fn lln_limit_experimental(s: u32, eta: f64) -> Result<f64> {
    increment_mean(s, s, eta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fuss_catalan_values() {
        let v: Vec<BigUint> = (0..5).map(|n| fuss_catalan(2, n).unwrap()).collect();
        assert_eq!(v, [1u32, 1, 3, 12, 55].map(BigUint::from));
        assert_eq!(fuss_catalan(3, 2).unwrap(), 4u32.into());
        assert_eq!(fuss_catalan(7, 0).unwrap(), 1u32.into());
        assert!(fuss_catalan(1, 3).is_err());
    }

    #[test]
    fn power_coefficients() {
        for n in 0..=10 {
            assert_eq!(power_coeff(2, 1, n).unwrap(), fuss_catalan(2, n).unwrap());
        }
        assert_eq!(power_coeff(2, 2, 1).unwrap(), 2u32.into());
        assert_eq!(power_coeff(2, 3, 0).unwrap(), 1u32.into());
        assert_eq!(power_coeff_by_convolution(2, 2, 1).unwrap(), 2u32.into());
    }

    #[test]
    fn printed_form_without_factor_fails() {
        // 1/((s+1)n+l) binom((s+1)n+l, n) at s=2, l=2, n=1
        let printed = binomial(5, 1) / 5u32;
        assert_eq!(printed, 1u32.into());
        assert_ne!(printed, power_coeff_by_convolution(2, 2, 1).unwrap());
    }

    #[test]
    fn g_eval_special_values() {
        assert_eq!(g_eval::<f64>(2, 0.0).unwrap().value, 1.0);
        let g = g_eval::<f64>(2, 4.0 / 27.0).unwrap();
        assert!((g.value - 1.5).abs() < 1e-9);
        assert!(g.derivative.is_none());
        let g = g_eval::<f64>(3, 27.0 / 256.0).unwrap();
        assert!((g.value - 4.0 / 3.0).abs() < 1e-9);
        assert!(g_eval::<f64>(2, 0.2).is_err());
        assert!(g_eval::<f64>(2, -0.01).is_err());
        let g32 = g_eval::<f32>(2, 0.1).unwrap();
        assert!((g32.value as f64 - g_eval::<f64>(2, 0.1).unwrap().value).abs() < 1e-5);
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let h = 1e-6;
        let g0 = g_eval::<f64>(2, 0.1 - h).unwrap().value;
        let g1 = g_eval::<f64>(2, 0.1 + h).unwrap().value;
        let d = g_eval::<f64>(2, 0.1).unwrap().derivative.unwrap();
        assert!(((g1 - g0) / (2.0 * h) - d).abs() < 1e-6);
    }

    #[test]
    fn brackets() {
        let empty = Word::root(2);
        for n in 0..=6 {
            assert_eq!(bracket_dim(2, n, &empty).unwrap(), fuss_catalan(2, n).unwrap());
        }
        let a = Word::parse(2, "a").unwrap();
        assert_eq!(bracket_dim(2, 2, &a).unwrap(), 3u32.into());
        let w = Word::parse(2, "aaba").unwrap();
        assert_eq!(bracket_dim(2, 2, &w).unwrap(), 1u32.into());
        assert!(bracket_dim(2, 1, &w).is_err());
        for n in 0..=6 {
            assert_eq!(bracket_dim_derooted(2, n, &a).unwrap(), power_coeff(2, 2, n).unwrap());
        }
    }

    #[test]
    fn lln_limit_shape() {
        assert_eq!(lln_limit(0.0).unwrap(), 0.0);
        assert!(lln_limit(4.0 / 27.0).is_err());
        let crit: f64 = critical_point(2);
        let mut prev = -1.0;
        for i in 0..100 {
            let f = lln_limit(crit * i as f64 / 100.0).unwrap();
            assert!(f > prev);
            prev = f;
        }
        let f = lln_limit(0.1).unwrap();
        let m = increment_mean(2, 1, 0.1).unwrap();
        assert!((f - 2.0 * m).abs() < 1e-14);
    }
}
