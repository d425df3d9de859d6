//! Exact rationals backed by big integers.

use alloc::string::{String, ToString};
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};
use core::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A rational number in lowest terms with positive denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn from_integer<T: Into<BigInt>>(n: T) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    /// `None` when the denominator is zero.
    pub fn new<N: Into<BigInt>, D: Into<BigInt>>(num: N, den: D) -> Option<Self> {
        let den = den.into();
        if den.is_zero() {
            return None;
        }
        Some(Rational(BigRational::new(num.into(), den)))
    }

    /// `1/den`. Skips the gcd, which matters for denominators with millions of bits.
    pub fn unit_fraction(den: BigUint) -> Self {
        assert!(!den.is_zero(), "unit fraction with zero denominator");
        Rational(BigRational::new_raw(BigInt::one(), BigInt::from(den)))
    }

    /// `2^-k`.
    pub fn pow2_inv(k: u64) -> Self {
        Rational::unit_fraction(BigUint::one() << k)
    }

    /// `1/(n+1)`, the harmonic weight of `n`.
    pub fn harmonic(n: u64) -> Self {
        Rational::unit_fraction(BigUint::from(n) + 1u32)
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

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Rational(self.0.recip()))
        }
    }

    /// Least integer `>= self`.
    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    /// `self * n` for a natural `n`, cancelling against the denominator first.
    pub fn scale(&self, n: &BigUint) -> Self {
        if n.is_zero() {
            return Rational::zero();
        }
        if self.numer().is_one() {
            // 1/d * n: reduce by gcd(n, d) without normalising the full product.
            let d = self.denom().magnitude();
            let g = num_integer::Integer::gcd(n, d);
            let num = BigInt::from(n / &g);
            let den = BigInt::from(d / &g);
            return Rational(BigRational::new_raw(num, den));
        }
        Rational(&self.0 * BigRational::from_integer(BigInt::from(n.clone())))
    }

    /// Compare `self` against `a/b` without building the quotient.
    pub fn cmp_fraction(&self, a: &BigInt, b: &BigInt) -> Ordering {
        (self.numer() * b).cmp(&(a * self.denom()))
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl From<u64> for Rational {
    fn from(n: u64) -> Self {
        Rational::from_integer(n)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero rational");
        Rational(self.0 / rhs.0)
    }
}

impl<'a> Div<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn div(self, rhs: &'a Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero rational");
        Rational(&self.0 / &rhs.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl core::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |a, b| a + b)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom().is_one() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Unreduced nonnegative fraction for long exact sums whose terms have huge denominators.
///
/// Reducing after every step would cost a big gcd each time; callers reduce once at the end if at all.
#[derive(Clone, Debug)]
pub struct Fraction {
    pub num: BigUint,
    pub den: BigUint,
}

impl Fraction {
    pub fn zero() -> Self {
        Fraction {
            num: BigUint::zero(),
            den: BigUint::one(),
        }
    }

    /// Adds `count * (p/q)` for a nonnegative rational `p/q`.
    pub fn add_scaled(&mut self, r: &Rational, count: &BigUint) {
        assert!(!r.is_negative(), "fraction terms must be nonnegative");
        if count.is_zero() || r.is_zero() {
            return;
        }
        let p = r.numer().magnitude() * count;
        let q = r.denom().magnitude();
        if q.is_one() {
            self.num += p * &self.den;
        } else if (&self.den % q).is_zero() {
            self.num += p * (&self.den / q);
        } else if (q % &self.den).is_zero() {
            let m = q / &self.den;
            self.num = &self.num * m + p;
            self.den = q.clone();
        } else {
            self.num = &self.num * q + p * &self.den;
            self.den = &self.den * q;
        }
    }

    pub fn cmp_rational(&self, r: &Rational) -> Ordering {
        if r.is_negative() {
            return Ordering::Greater;
        }
        (&self.num * r.denom().magnitude()).cmp(&(r.numer().magnitude() * &self.den))
    }

    pub fn to_rational(&self) -> Rational {
        Rational::new(BigInt::from(self.num.clone()), BigInt::from(self.den.clone())).unwrap()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRationalError(pub String);

impl fmt::Display for ParseRationalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "not a rational: {:?}", self.0)
    }
}

impl core::error::Error for ParseRationalError {}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::from_str(s).ok()
}

/// Parse a decimal natural with no sign, no leading `+`, no whitespace.
pub fn parse_natural(s: &str) -> Option<BigUint> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigUint::from_str(s).ok()
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts `a` or `a/b` with decimal integers.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRationalError(s.to_string());
        match s.split_once('/') {
            None => parse_int(s).map(Rational::from_integer).ok_or_else(err),
            Some((a, b)) => {
                let a = parse_int(a).ok_or_else(err)?;
                let b = parse_int(b).ok_or_else(err)?;
                Rational::new(a, b).ok_or_else(err)
            }
        }
    }
}

#[cfg(feature = "serde")]
mod serde_impl {
    use super::*;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Wire {
        num: String,
        den: String,
    }

    impl Serialize for Rational {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            Wire {
                num: self.numer().to_string(),
                den: self.denom().to_string(),
            }
            .serialize(s)
        }
    }

    impl<'de> Deserialize<'de> for Rational {
        fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
            let w = Wire::deserialize(d)?;
            let num = parse_int(&w.num).ok_or_else(|| D::Error::custom("bad numerator"))?;
            let den = parse_int(&w.den).ok_or_else(|| D::Error::custom("bad denominator"))?;
            if !den.is_positive() {
                return Err(D::Error::custom("denominator must be positive"));
            }
            let r = Rational::new(num.clone(), den.clone()).unwrap();
            // Reject non-canonical forms so a serialised value has exactly one spelling.
            if r.numer() != &num || r.denom() != &den {
                return Err(D::Error::custom("rational not in lowest terms"));
            }
            Ok(r)
        }
    }
}

/// Serde helpers for naturals too large for `u64`, written as decimal strings.
#[cfg(feature = "serde")]
pub mod big_natural {
    use super::*;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&n.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        let n = parse_natural(&s).ok_or_else(|| D::Error::custom("bad natural"))?;
        if s.len() > 1 && s.starts_with('0') {
            return Err(D::Error::custom("leading zero in natural"));
        }
        Ok(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn normalises() {
        assert_eq!(q("2/4"), q("1/2"));
        assert_eq!(q("3/-6").to_string(), "-1/2");
        assert_eq!(q("6/3").to_string(), "2");
        assert!("1/0".parse::<Rational>().is_err());
        assert!("+1/2".parse::<Rational>().is_err());
        assert!("1.5".parse::<Rational>().is_err());
    }

    #[test]
    fn arithmetic() {
        assert_eq!(q("1/2") + q("1/3"), q("5/6"));
        assert_eq!(q("1/2") - q("1/3"), q("1/6"));
        assert_eq!(q("2/3") * q("3/4"), q("1/2"));
        assert_eq!(q("1/2") / q("1/4"), q("2"));
        assert!(q("1/3") < q("1/2"));
        assert_eq!(q("7/2").ceil(), BigInt::from(4));
    }

    #[test]
    fn unit_fraction_scaling_is_reduced() {
        let r = Rational::unit_fraction(BigUint::from(12u32));
        assert_eq!(r.scale(&BigUint::from(8u32)), q("2/3"));
        assert_eq!(r.scale(&BigUint::from(0u32)), Rational::zero());
        assert_eq!(Rational::pow2_inv(3), q("1/8"));
        assert_eq!(Rational::harmonic(4), q("1/5"));
    }
}
