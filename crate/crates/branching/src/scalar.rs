//! Probability scalars: floats, rationals and elements of `Q(G)`.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::algebraic::Algebraic;
use crate::error::{Error, Result};
use crate::fusscat;

/// Arithmetic needed to build and check chain transition tables.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Whether equality is exact.
    const EXACT: bool;

    fn from_rational(q: &BigRational) -> Self;

    fn to_f64(&self) -> f64;

    /// Textual form; exact types print exactly.
    fn render(&self) -> String;

    fn ratio(num: i64, den: i64) -> Self {
        Self::from_rational(&BigRational::new(num.into(), den.into()))
    }

    fn from_biguint(n: &BigUint) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(n.clone())))
    }

    fn powi(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc * self.clone();
        }
        acc
    }

    fn below_zero(&self) -> bool {
        self.to_f64() < 0.0
    }
}

/// Scalars in which the generating function value `G_s(eta)` can be represented.
pub trait GenFnScalar: Scalar {
    fn gen_fn_value(s: u32, eta: &Self) -> Result<Self>;
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn from_rational(q: &BigRational) -> Self {
                rational_to_f64(q) as $t
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn render(&self) -> String {
                format!("{}", self)
            }

            fn powi(&self, k: u32) -> Self {
                Float::powi(*self, k as i32)
            }
        }

        impl GenFnScalar for $t {
            fn gen_fn_value(s: u32, eta: &Self) -> Result<Self> {
                Ok(fusscat::g_eval::<$t>(s, *eta)?.value)
            }
        }
    };
}

float_scalar!(f32);
float_scalar!(f64);

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn render(&self) -> String {
        format!("{}", self)
    }

    fn below_zero(&self) -> bool {
        Signed::is_negative(self)
    }
}

impl GenFnScalar for BigRational {
    fn gen_fn_value(s: u32, eta: &Self) -> Result<Self> {
        let g = Algebraic::fuss_catalan_root(s, eta)?;
        g.as_rational().ok_or_else(|| {
            Error::InvalidInput(format!(
                "G_{s}({eta}) is irrational; use the algebraic or floating mode"
            ))
        })
    }
}

/// Converts `num / den` to the nearest-ish `f64` without overflowing on huge operands.
pub fn big_ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let negative = (num.sign() == Sign::Minus) != (den.sign() == Sign::Minus);
    let a = num.magnitude();
    let b = den.magnitude();
    let shift = a.bits() as i64 - b.bits() as i64 - 62;
    let q = if shift >= 0 {
        a / (b << shift as usize)
    } else {
        (a << (-shift) as usize) / b
    };
    let mut value = q.to_f64().unwrap_or(f64::INFINITY);
    let mut e = shift;
    while e > 0 {
        let step = e.min(1000);
        value *= 2f64.powi(step as i32);
        e -= step;
    }
    while e < 0 {
        let step = (-e).min(1000);
        value /= 2f64.powi(step as i32);
        e += step;
    }
    if negative {
        -value
    } else {
        value
    }
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    big_ratio_to_f64(q.numer(), q.denom())
}

/// Parses `"p/q"` or an integer into an exact rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if let Some((p, q)) = text.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        Some(BigRational::new(p, q))
    } else {
        let p: BigInt = text.parse().ok()?;
        Some(BigRational::from_integer(p))
    }
}

pub(crate) fn float_const<T: Float + FromPrimitive>(x: f64) -> T {
    T::from_f64(x).expect("representable constant")
}
