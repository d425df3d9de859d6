//! The interval partition `I_0 < I_1 < ...` with descending rationals `r_n`, and the weights `w_S`.
//!
//! Interval sizes square at every level, so the bounds are big integers and every sum over a
//! prefix of the naturals is taken block by block.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use crate::omega::DescribedSet;
use crate::rational::{Fraction, Rational};

/// Largest interval size, in bits, that [`build_partition`] will produce.
pub const DEFAULT_MAX_BITS: u64 = 1 << 21;

/// Slacks are only reduced to lowest terms below this size; the gcd is quadratic.
const SLACK_BITS: u64 = 1 << 14;

/// Intervals `I_n = [bounds[n], bounds[n+1])` and rationals `r_0..r_N` for `N` intervals.
#[derive(Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct PartitionData {
    #[cfg_attr(feature = "serde", serde(with = "big_bounds"))]
    pub bounds: Vec<BigUint>,
    pub rationals: Vec<Rational>,
}

#[cfg(feature = "serde")]
mod big_bounds {
    use alloc::string::{String, ToString};
    use alloc::vec::Vec;
    use num_bigint::BigUint;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        let strs: Vec<String> = v.iter().map(|n| n.to_string()).collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigUint>, D::Error> {
        let strs = Vec::<String>::deserialize(d)?;
        strs.iter()
            .map(|s| {
                if s.len() > 1 && s.starts_with('0') {
                    return Err(D::Error::custom("leading zero in natural"));
                }
                crate::rational::parse_natural(s).ok_or_else(|| D::Error::custom("bad natural"))
            })
            .collect()
    }
}

impl fmt::Debug for PartitionData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PartitionData(depth {})", self.depth())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartitionError {
    /// The next interval would exceed the bit budget.
    TooLarge { depth_reached: usize, bits: u64, max_bits: u64 },
}

impl fmt::Display for PartitionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartitionError::TooLarge { depth_reached, bits, max_bits } => write!(
                f,
                "interval I_{depth_reached} needs {bits} bits, budget is {max_bits}"
            ),
        }
    }
}

impl core::error::Error for PartitionError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StructuralError {
    LengthMismatch { bounds: usize, rationals: usize },
    FirstBoundNotZero,
    EmptyInterval(usize),
    NonPositiveRational(usize),
}

impl fmt::Display for StructuralError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StructuralError::LengthMismatch { bounds, rationals } => write!(
                f,
                "{bounds} interval bounds need {bounds} rationals, got {rationals}"
            ),
            StructuralError::FirstBoundNotZero => write!(f, "I_0 must start at 0"),
            StructuralError::EmptyInterval(n) => write!(f, "interval I_{n} is empty"),
            StructuralError::NonPositiveRational(n) => write!(f, "r_{n} is not positive"),
        }
    }
}

impl core::error::Error for StructuralError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Condition {
    /// `|I_{<n}| <= r_n |I_n|` for `n >= 1`.
    Absorbs,
    /// `|I_n| r_{n+1} <= 2^{-n-1}`.
    Small,
    /// `I_0 = {0}` and `r_0 = 1`.
    Start,
    /// `r_{n+1} < r_n`.
    Descending,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConditionCheck {
    pub condition: Condition,
    pub index: usize,
    pub holds: bool,
    /// Exact `rhs - lhs`, omitted when reducing it would need a gcd of huge integers.
    pub slack: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PartitionReport {
    pub depth: usize,
    pub checks: Vec<ConditionCheck>,
}

impl PartitionReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConditionCheck> {
        self.checks.iter().filter(|c| !c.holds)
    }
}

impl PartitionData {
    /// Number of intervals.
    pub fn depth(&self) -> usize {
        self.bounds.len().saturating_sub(1)
    }

    pub fn start(&self, n: usize) -> &BigUint {
        &self.bounds[n]
    }

    /// One past the last element of `I_n`.
    pub fn end(&self, n: usize) -> &BigUint {
        &self.bounds[n + 1]
    }

    pub fn len_of(&self, n: usize) -> BigUint {
        &self.bounds[n + 1] - &self.bounds[n]
    }

    /// `|I_{<n}|`, which equals the start of `I_n`.
    pub fn len_below(&self, n: usize) -> &BigUint {
        &self.bounds[n]
    }

    pub fn r(&self, n: usize) -> &Rational {
        &self.rationals[n]
    }

    /// `[start, end)` of `I_n` when both fit in a `u64`.
    pub fn block_u64(&self, n: usize) -> Option<(u64, u64)> {
        Some((self.bounds.get(n)?.to_u64()?, self.bounds.get(n + 1)?.to_u64()?))
    }

    /// Index of the interval containing `m`.
    pub fn block_of(&self, m: &BigUint) -> Option<usize> {
        if self.depth() == 0 || m >= &self.bounds[self.depth()] {
            return None;
        }
        // Last bound <= m.
        let k = self.bounds.partition_point(|b| b <= m);
        Some(k - 1)
    }

    pub fn block_of_u64(&self, m: u64) -> Option<usize> {
        self.block_of(&BigUint::from(m))
    }
}

fn bits(n: &BigUint) -> u64 {
    n.bits()
}

/// `ceil(a / r)` for positive rational `r`.
fn ceil_div(a: &BigUint, r: &Rational) -> BigUint {
    let p = r.numer().magnitude();
    let q = r.denom().magnitude();
    let t = a * q;
    if p.is_one() {
        t
    } else {
        (t + p - 1u32) / p
    }
}

fn half(r: &Rational) -> Rational {
    if r.numer().is_one() {
        Rational::unit_fraction(r.denom().magnitude() << 1u32)
    } else {
        r * &Rational::new(1, 2).unwrap()
    }
}

/// Greedy partition with `depth` intervals: `L_n = ceil(|I_{<n}| / r_n)`,
/// `r_{n+1} = min(r_n / 2, 2^{-n-1} / L_n)`, starting from `I_0 = {0}`, `r_0 = 1`.
pub fn build_partition(depth: usize) -> Result<PartitionData, PartitionError> {
    build_partition_with_budget(depth, DEFAULT_MAX_BITS)
}

pub fn build_partition_with_budget(depth: usize, max_bits: u64) -> Result<PartitionData, PartitionError> {
    let mut bounds = Vec::with_capacity(depth + 1);
    let mut rationals = Vec::with_capacity(depth + 1);
    bounds.push(BigUint::zero());
    rationals.push(Rational::one());
    for n in 0..depth {
        let below = &bounds[n];
        let len = if n == 0 {
            BigUint::one()
        } else {
            ceil_div(below, &rationals[n])
        };
        if bits(&len) > max_bits {
            return Err(PartitionError::TooLarge {
                depth_reached: n,
                bits: bits(&len),
                max_bits,
            });
        }
        // 2^{-n-1}/L_n = 1/(2^{n+1} L_n).
        let small = Rational::unit_fraction(&len << (n + 1));
        let halved = half(&rationals[n]);
        let next = if lt(&small, &halved) { small } else { halved };
        let end = below + &len;
        bounds.push(end);
        rationals.push(next);
    }
    Ok(PartitionData { bounds, rationals })
}

/// Exact comparison by cross multiplication; avoids the continued fraction walk on huge operands.
fn cmp(a: &Rational, b: &Rational) -> Ordering {
    (a.numer() * b.denom()).cmp(&(b.numer() * a.denom()))
}

fn lt(a: &Rational, b: &Rational) -> bool {
    cmp(a, b) == Ordering::Less
}

fn slack(num: BigInt, den: BigInt) -> Option<Rational> {
    if num.is_zero() {
        return Some(Rational::zero());
    }
    if num.bits() + den.bits() > SLACK_BITS {
        return None;
    }
    Rational::new(num, den)
}

/// Checks conditions (1), (2), (3) and strict descent with exact arithmetic.
pub fn verify_partition(p: &PartitionData) -> Result<PartitionReport, StructuralError> {
    let depth = p.depth();
    if p.bounds.is_empty() || p.rationals.len() != p.bounds.len() {
        return Err(StructuralError::LengthMismatch {
            bounds: p.bounds.len(),
            rationals: p.rationals.len(),
        });
    }
    if !p.bounds[0].is_zero() {
        return Err(StructuralError::FirstBoundNotZero);
    }
    for n in 0..depth {
        if p.bounds[n + 1] <= p.bounds[n] {
            return Err(StructuralError::EmptyInterval(n));
        }
    }
    for (n, r) in p.rationals.iter().enumerate() {
        if r.is_zero() || r.is_negative() {
            return Err(StructuralError::NonPositiveRational(n));
        }
    }
    let mut checks = Vec::new();
    let start_ok = p.rationals[0] == Rational::one() && (depth == 0 || p.len_of(0).is_one());
    checks.push(ConditionCheck {
        condition: Condition::Start,
        index: 0,
        holds: start_ok,
        slack: None,
    });
    for n in 0..depth {
        let len = BigInt::from(p.len_of(n));
        if n >= 1 {
            // r_n |I_n| - |I_{<n}| = (a |I_n| - |I_{<n}| b) / b
            let r = p.r(n);
            let below = BigInt::from(p.len_below(n).clone());
            let num = r.numer() * &len - below * r.denom();
            checks.push(ConditionCheck {
                condition: Condition::Absorbs,
                index: n,
                holds: num >= BigInt::zero(),
                slack: slack(num, r.denom().clone()),
            });
        }
        // 2^{-n-1} - |I_n| r_{n+1} = (b - 2^{n+1} a |I_n|) / (2^{n+1} b)
        let r = p.r(n + 1);
        let num = r.denom() - ((r.numer() * &len) << (n + 1));
        let den = r.denom() << (n + 1);
        checks.push(ConditionCheck {
            condition: Condition::Small,
            index: n,
            holds: num >= BigInt::zero(),
            slack: slack(num, den),
        });
    }
    for n in 0..p.rationals.len().saturating_sub(1) {
        let (a, b) = (p.r(n), p.r(n + 1));
        let num = a.numer() * b.denom() - b.numer() * a.denom();
        checks.push(ConditionCheck {
            condition: Condition::Descending,
            index: n,
            holds: num > BigInt::zero(),
            slack: slack(num, a.denom() * b.denom()),
        });
    }
    checks.sort_by_key(|c| (c.condition, c.index));
    Ok(PartitionReport { depth, checks })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HorizonExceeded {
    pub depth: usize,
}

impl fmt::Display for HorizonExceeded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "point lies beyond the {} intervals of the partition", self.depth)
    }
}

impl core::error::Error for HorizonExceeded {}

/// `w_S`: on `I_n` the weight is `r_n` if `n` is not in `S` and `r_{n+1}` if it is.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockWeight {
    pub set: DescribedSet,
    pub partition: Arc<PartitionData>,
}

impl BlockWeight {
    pub fn new(set: DescribedSet, partition: Arc<PartitionData>) -> Self {
        BlockWeight { set, partition }
    }

    /// Weight on the whole of `I_n`.
    pub fn block_weight(&self, n: usize) -> &Rational {
        if self.set.contains(n as u64) {
            self.partition.r(n + 1)
        } else {
            self.partition.r(n)
        }
    }

    pub fn at(&self, m: &BigUint) -> Result<Rational, HorizonExceeded> {
        let n = self.partition.block_of(m).ok_or(HorizonExceeded {
            depth: self.partition.depth(),
        })?;
        Ok(self.block_weight(n).clone())
    }

    pub fn at_u64(&self, m: u64) -> Result<Rational, HorizonExceeded> {
        self.at(&BigUint::from(m))
    }

    /// `sum_{m < upto} w_S(m)`, exact and unreduced.
    pub fn prefix_sum(&self, upto: &BigUint) -> Result<Fraction, HorizonExceeded> {
        let p = &self.partition;
        if p.depth() == 0 || upto > p.end(p.depth() - 1) {
            return Err(HorizonExceeded { depth: p.depth() });
        }
        let mut total = Fraction::zero();
        for n in 0..p.depth() {
            if p.start(n) >= upto {
                break;
            }
            let top = if p.end(n) < upto { p.end(n) } else { upto };
            total.add_scaled(self.block_weight(n), &(top - p.start(n)));
        }
        Ok(total)
    }

    /// Exact weight of the elements of `[a, b)`, summed per block.
    pub fn interval_sum(&self, a: u64, b: u64) -> Result<Rational, HorizonExceeded> {
        let mut total = Rational::zero();
        if a >= b {
            return Ok(total);
        }
        let first = self.partition.block_of_u64(a).ok_or(HorizonExceeded {
            depth: self.partition.depth(),
        })?;
        let last = self.partition.block_of_u64(b - 1).ok_or(HorizonExceeded {
            depth: self.partition.depth(),
        })?;
        for n in first..=last {
            let lo = self.partition.start(n).max(&BigUint::from(a)).clone();
            let hi = self.partition.end(n).min(&BigUint::from(b)).clone();
            total = total + self.block_weight(n).scale(&(hi - lo));
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn greedy_first_levels() {
        let p = build_partition(3).unwrap();
        assert_eq!(p.bounds, [0u32, 1, 3, 27].map(BigUint::from));
        assert_eq!(p.rationals, [q("1"), q("1/2"), q("1/8"), q("1/192")]);
        let r = verify_partition(&p).unwrap();
        assert!(r.passed());
        assert!(r.checks.iter().all(|c| c.slack.as_ref().is_none_or(|s| !s.is_negative())));
    }

    #[test]
    fn tampered_rational_fails_condition_two() {
        let mut p = build_partition(3).unwrap();
        p.rationals[2] = q("1/2");
        let r = verify_partition(&p).unwrap();
        let bad: Vec<_> = r.failures().map(|c| (c.condition, c.index)).collect();
        assert!(bad.contains(&(Condition::Small, 1)));
        assert!(bad.contains(&(Condition::Descending, 1)));
    }

    #[test]
    fn structural_errors() {
        let mut p = build_partition(3).unwrap();
        p.rationals.pop();
        assert!(matches!(verify_partition(&p), Err(StructuralError::LengthMismatch { .. })));
        let mut p = build_partition(3).unwrap();
        p.bounds[2] = BigUint::from(1u32);
        assert_eq!(verify_partition(&p), Err(StructuralError::EmptyInterval(1)));
    }

    #[test]
    fn weights() {
        let p = Arc::new(build_partition(3).unwrap());
        let w = BlockWeight::new(DescribedSet::empty(), p.clone());
        assert_eq!(w.interval_sum(1, 3).unwrap(), q("1"));
        let w1 = BlockWeight::new(DescribedSet::finite([1]), p.clone());
        assert_eq!(w1.at_u64(2).unwrap(), q("1/8"));
        assert_eq!(w1.at_u64(27), Err(HorizonExceeded { depth: 3 }));
        let all = BlockWeight::new(DescribedSet::all(), p);
        // 1*1/2 + 2*1/8 + 24*1/192
        assert_eq!(all.prefix_sum(&BigUint::from(27u32)).unwrap().to_rational(), q("7/8"));
    }

    #[test]
    fn budget_is_enforced() {
        let e = build_partition_with_budget(12, 64).unwrap_err();
        assert!(matches!(e, PartitionError::TooLarge { depth_reached: 6, .. }));
    }
}
