//! Exact big-rational arithmetic for factorial and Beta-integral formulas.

use std::fmt;
use std::ops::{Add, Div, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An arbitrary-precision rational, always in lowest terms with a positive
/// denominator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactRational(BigRational);

impl ExactRational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Self {
        // `BigRational::new` reduces and normalizes the sign; it panics on a
        // zero denominator.
        Self(BigRational::new(numer.into(), denom.into()))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Self(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn one() -> Self {
        Self(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn recip(&self) -> Self {
        Self(self.0.recip())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = BigRational::one();
        for _ in 0..e {
            acc *= &self.0;
        }
        Self(acc)
    }

    pub fn as_big_rational(&self) -> &BigRational {
        &self.0
    }

    /// Nearest `f64` (or ±inf when out of range).
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or_else(|| {
            // Only reached for huge magnitudes.
            let l = self.ln_abs();
            if self.0.is_negative() {
                -l.exp()
            } else {
                l.exp()
            }
        })
    }

    /// Natural logarithm of the absolute value, accurate for operands far
    /// outside the `f64` range.
    pub fn ln_abs(&self) -> f64 {
        ln_big(self.0.numer()) - ln_big(self.0.denom())
    }

    /// Positive real `k`-th root, evaluated in log space when the value does
    /// not fit an `f64`.
    ///
    /// # Panics
    /// If `k == 0` or the value is not positive.
    pub fn root(&self, k: u32) -> f64 {
        assert!(k > 0, "root order must be positive");
        assert!(self.is_positive(), "root of a non-positive rational");
        let v = self.0.to_f64().unwrap_or(f64::INFINITY);
        if v.is_normal() {
            match k {
                1 => v,
                2 => v.sqrt(),
                3 => v.cbrt(),
                _ => v.powf(1.0 / k as f64),
            }
        } else {
            (self.ln_abs() / k as f64).exp()
        }
    }
}

fn ln_big(x: &BigInt) -> f64 {
    let x = x.abs();
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        x.to_f64().map_or(f64::NAN, f64::ln)
    } else {
        let shift = bits - 64;
        let top: BigInt = &x >> shift;
        top.to_f64().map_or(f64::NAN, f64::ln) + shift as f64 * std::f64::consts::LN_2
    }
}

impl fmt::Display for ExactRational {
    /// Always `p/q`, also for integers.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl From<u64> for ExactRational {
    fn from(v: u64) -> Self {
        Self::from_integer(v)
    }
}

impl From<BigInt> for ExactRational {
    fn from(v: BigInt) -> Self {
        Self::from_integer(v)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for ExactRational {
            type Output = ExactRational;
            fn $m(self, rhs: ExactRational) -> ExactRational {
                ExactRational(self.0.$m(rhs.0))
            }
        }
        impl<'a> $tr<&'a ExactRational> for &'a ExactRational {
            type Output = ExactRational;
            fn $m(self, rhs: &'a ExactRational) -> ExactRational {
                ExactRational((&self.0).$m(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

/// `n!` as a big integer.
pub fn factorial(n: u64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// `n!` as an exact rational.
pub fn factorial_exact(n: u64) -> ExactRational {
    ExactRational::from_integer(factorial(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reduced_with_positive_denominator() {
        let r = ExactRational::new(6, -4);
        assert_eq!(r.numer(), &BigInt::from(-3));
        assert_eq!(r.denom(), &BigInt::from(2));
        assert_eq!(r.to_string(), "-3/2");
        assert_eq!(ExactRational::from(6).to_string(), "6/1");
    }

    #[test]
    fn roots_of_small_values() {
        assert_eq!(ExactRational::from(10).root(2), 10f64.sqrt());
        assert_eq!(ExactRational::from(27).root(3), 3.0);
        assert!((ExactRational::from(16).root(4) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn roots_of_huge_values_use_logs() {
        // 2^5000 has a 50th root of 2^100.
        let big = ExactRational::from_integer(BigInt::one() << 5000u32);
        let r = big.root(50);
        assert!((r / 2f64.powi(100) - 1.0).abs() < 1e-12);
        assert!((big.ln_abs() - 5000.0 * std::f64::consts::LN_2).abs() < 1e-9);
    }

    #[test]
    fn factorials() {
        assert_eq!(factorial(0), BigInt::one());
        assert_eq!(factorial(5), BigInt::from(120));
        assert_eq!(factorial(20).to_string(), "2432902008176640000");
    }

    proptest! {
        #[test]
        fn product_with_reciprocal_is_one(a in 1u64..u64::MAX, b in 1u64..u64::MAX, e in 1u32..6) {
            let x = ExactRational::new(BigInt::from(a).pow(e), BigInt::from(b));
            let y = x.recip();
            prop_assert_eq!(&x * &y, ExactRational::one());
        }
    }
}
