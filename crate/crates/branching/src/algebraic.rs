//! Exact arithmetic in `Q(G)` where `G = G_s(eta)` for rational `eta`.
//!
//! Elements are polynomials in `G` reduced modulo its minimal polynomial.
//! The minimal polynomial is found by stripping rational roots from
//! `eta x^(s+1) - x + 1`; a leftover factor of degree at most three has no
//! rational root and is therefore irreducible.

use std::fmt;
use std::ops::{Add, Div, Mul, Sub};
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{invalid, Error, Result};
use crate::fusscat;
use crate::scalar::{rational_to_f64, GenFnScalar, Scalar};

type Poly = Vec<BigRational>;

/// Monic minimal polynomial of the generator together with a numerical root.
#[derive(Debug, PartialEq)]
pub struct Modulus {
    coeffs: Poly,
    root: f64,
}

impl Modulus {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn root(&self) -> f64 {
        self.root
    }
}

/// An element of `Q(G)`; rational constants carry no modulus.
#[derive(Clone, Debug)]
pub struct Algebraic {
    field: Option<Arc<Modulus>>,
    c: Poly,
}

fn trim(mut p: Poly) -> Poly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Poly {
    let n = a.len().max(b.len());
    let mut out = vec![BigRational::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim(out)
}

fn poly_divrem(a: &[BigRational], b: &[BigRational]) -> (Poly, Poly) {
    let b = trim(b.to_vec());
    let mut r = trim(a.to_vec());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let lead = b.last().expect("nonzero divisor").clone();
    let mut q = vec![BigRational::zero(); r.len() - b.len() + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let factor = r.last().unwrap() / &lead;
        for (i, y) in b.iter().enumerate() {
            r[i + shift] -= &factor * y;
        }
        q[shift] = factor;
        r.pop();
        r = trim(r);
    }
    (trim(q), r)
}

fn poly_eval_f64(p: &[BigRational], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, c| acc * x + rational_to_f64(c))
}

fn poly_eval(p: &[BigRational], x: &BigRational) -> BigRational {
    p.iter()
        .rev()
        .fold(BigRational::zero(), |acc, c| acc * x + c)
}

fn divisors(n: &BigUint) -> Option<Vec<BigUint>> {
    let n = n.to_u64()?;
    if n > 1_000_000_000_000 {
        return None;
    }
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(BigUint::from(d));
            if d * d != n {
                out.push(BigUint::from(n / d));
            }
        }
        d += 1;
    }
    Some(out)
}

impl Algebraic {
    pub fn rational(q: BigRational) -> Self {
        Algebraic {
            field: None,
            c: trim(vec![q]),
        }
    }

    /// `G_s(eta)` as an exact element.
    pub fn fuss_catalan_root(s: u32, eta: &BigRational) -> Result<Algebraic> {
        if s < 2 {
            return invalid(format!("tree order s = {s} < 2"));
        }
        let critical = fusscat::critical_point_exact(s);
        if eta.is_negative() || *eta > critical {
            return invalid(format!("eta = {eta} outside [0, {critical}]"));
        }
        if eta.is_zero() {
            return Ok(Algebraic::one());
        }
        let deg = s as usize + 1;
        let mut p = vec![BigRational::zero(); deg + 1];
        p[0] = BigRational::one();
        p[1] = -BigRational::one();
        p[deg] = eta.clone();
        let dp = |x: &BigRational| {
            BigRational::from_integer(BigInt::from(deg)) * eta * num_traits::pow(x.clone(), s as usize)
                - BigRational::one()
        };

        // Integer form a x^(s+1) - b x + b; candidate roots are ±u/v, u | b, v | a.
        let a = eta.numer().magnitude().clone();
        let b = eta.denom().magnitude().clone();
        let mut residual = p.clone();
        let (Some(us), Some(vs)) = (divisors(&b), divisors(&a)) else {
            return invalid(format!(
                "eta = {eta} has too large a numerator or denominator for exact mode"
            ));
        };
        {
            for u in &us {
                for v in &vs {
                    if !u.gcd(v).is_one() {
                        continue;
                    }
                    for sign in [1i32, -1] {
                        let r = BigRational::new(
                            BigInt::from(u.clone()) * sign,
                            BigInt::from(v.clone()),
                        );
                        if !poly_eval(&p, &r).is_zero() {
                            continue;
                        }
                        // The power-series branch is the smallest positive root,
                        // the only positive root where the polynomial is not increasing.
                        if r.is_positive() && !dp(&r).is_positive() {
                            return Ok(Algebraic::rational(r));
                        }
                        loop {
                            let lin = vec![-r.clone(), BigRational::one()];
                            let (q, rem) = poly_divrem(&residual, &lin);
                            if !rem.is_empty() {
                                break;
                            }
                            residual = q;
                        }
                    }
                }
            }
        }
        let d = residual.len() - 1;
        if d > 3 {
            return Err(Error::InvalidInput(format!(
                "cannot certify an irreducible minimal polynomial of degree {d} for G_{s}({eta}); use floating mode"
            )));
        }
        let lead = residual.last().unwrap().clone();
        let monic: Poly = residual.iter().map(|c| c / &lead).collect();
        let eta_f = rational_to_f64(eta);
        let mut root = fusscat::g_eval::<f64>(s, eta_f.min(fusscat::critical_point::<f64>(s)))?.value;
        for _ in 0..8 {
            let f = poly_eval_f64(&monic, root);
            let df: f64 = monic
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (i, c)| acc * root + i as f64 * rational_to_f64(c));
            if df == 0.0 {
                break;
            }
            root -= f / df;
        }
        let field = Arc::new(Modulus {
            coeffs: monic,
            root,
        });
        Ok(Algebraic {
            field: Some(field),
            c: vec![BigRational::zero(), BigRational::one()],
        })
    }

    pub fn modulus(&self) -> Option<&Modulus> {
        self.field.as_deref()
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.c
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        match self.c.len() {
            0 => Some(BigRational::zero()),
            1 => Some(self.c[0].clone()),
            _ => None,
        }
    }

    fn join(&self, other: &Algebraic) -> Option<Arc<Modulus>> {
        match (&self.field, &other.field) {
            (Some(a), Some(b)) => {
                assert!(
                    Arc::ptr_eq(a, b) || a == b,
                    "mixing elements of different number fields"
                );
                Some(a.clone())
            }
            (Some(a), None) | (None, Some(a)) => Some(a.clone()),
            (None, None) => None,
        }
    }

    fn reduce(field: Option<Arc<Modulus>>, p: Poly) -> Algebraic {
        let c = match &field {
            Some(m) if p.len() > m.degree() => poly_divrem(&p, &m.coeffs).1,
            _ => trim(p),
        };
        Algebraic { field, c }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inverse(&self) -> Option<Algebraic> {
        if self.c.is_empty() {
            return None;
        }
        if self.c.len() == 1 {
            return Some(Algebraic {
                field: self.field.clone(),
                c: vec![self.c[0].recip()],
            });
        }
        let m = self.field.as_ref().expect("non-constant element has a modulus");
        // Extended Euclid: track t with t * self = r (mod m).
        let (mut r0, mut r1) = (m.coeffs.clone(), self.c.clone());
        let (mut t0, mut t1): (Poly, Poly) = (Vec::new(), vec![BigRational::one()]);
        while r1.len() > 1 {
            let (q, r) = poly_divrem(&r0, &r1);
            let t = poly_sub(&t0, &poly_mul(&q, &t1));
            r0 = std::mem::replace(&mut r1, r);
            t0 = std::mem::replace(&mut t1, t);
        }
        if r1.is_empty() {
            return None;
        }
        let scale = r1[0].recip();
        let inv: Poly = t1.iter().map(|c| c * &scale).collect();
        Some(Algebraic::reduce(self.field.clone(), inv))
    }
}

impl PartialEq for Algebraic {
    fn eq(&self, other: &Self) -> bool {
        self.c == other.c
    }
}

impl Zero for Algebraic {
    fn zero() -> Self {
        Algebraic {
            field: None,
            c: Vec::new(),
        }
    }

    fn is_zero(&self) -> bool {
        self.c.is_empty()
    }
}

impl One for Algebraic {
    fn one() -> Self {
        Algebraic::rational(BigRational::one())
    }
}

impl Add for Algebraic {
    type Output = Algebraic;

    fn add(self, rhs: Algebraic) -> Algebraic {
        let field = self.join(&rhs);
        let n = self.c.len().max(rhs.c.len());
        let mut out = vec![BigRational::zero(); n];
        for (i, x) in self.c.into_iter().enumerate() {
            out[i] += x;
        }
        for (i, y) in rhs.c.into_iter().enumerate() {
            out[i] += y;
        }
        Algebraic {
            field,
            c: trim(out),
        }
    }
}

impl Sub for Algebraic {
    type Output = Algebraic;

    fn sub(self, rhs: Algebraic) -> Algebraic {
        let field = self.join(&rhs);
        Algebraic {
            field,
            c: poly_sub(&self.c, &rhs.c),
        }
    }
}

impl Mul for Algebraic {
    type Output = Algebraic;

    fn mul(self, rhs: Algebraic) -> Algebraic {
        let field = self.join(&rhs);
        Algebraic::reduce(field, poly_mul(&self.c, &rhs.c))
    }
}

impl Div for Algebraic {
    type Output = Algebraic;

    fn div(self, rhs: Algebraic) -> Algebraic {
        let inv = rhs.inverse().expect("division by zero in Q(G)");
        self * inv
    }
}

impl fmt::Display for Algebraic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.c.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*G")?,
                _ => write!(f, "({c})*G^{i}")?,
            }
        }
        Ok(())
    }
}

impl Scalar for Algebraic {
    const EXACT: bool = true;

    fn from_rational(q: &BigRational) -> Self {
        Algebraic::rational(q.clone())
    }

    fn to_f64(&self) -> f64 {
        match &self.field {
            Some(m) => poly_eval_f64(&self.c, m.root),
            None => self.c.first().map(rational_to_f64).unwrap_or(0.0),
        }
    }

    fn render(&self) -> String {
        self.to_string()
    }
}

impl GenFnScalar for Algebraic {
    fn gen_fn_value(s: u32, eta: &Self) -> Result<Self> {
        let eta = eta
            .as_rational()
            .ok_or_else(|| Error::InvalidInput("eta must be rational".into()))?;
        Algebraic::fuss_catalan_root(s, &eta)
    }
}
