//! Naturals, finite strings, pairing functions and lazily described subsets of the naturals.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_integer::Integer;

/// Diagonal pairing: walks the diagonals `i + b = s` in order, each by increasing `b`.
///
/// Panics if the code does not fit in a `u64`.
pub fn pair_diag(i: u64, b: u64) -> u64 {
    checked_pair_diag(i, b).expect("pair_diag overflow")
}

pub fn checked_pair_diag(i: u64, b: u64) -> Option<u64> {
    let s = (i as u128) + (b as u128);
    let v = s.checked_mul(s + 1)? / 2 + b as u128;
    u64::try_from(v).ok()
}

fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = 1u128 << ((128 - n.leading_zeros()).div_ceil(2));
    loop {
        let y = (x + n / x) / 2;
        if y >= x {
            return x;
        }
        x = y;
    }
}

/// Largest `s` with `s(s+1)/2 <= k`.
fn triangular_root(k: u64) -> u64 {
    let k = k as u128;
    let mut s = (isqrt(8 * k + 1) - 1) / 2;
    while s * (s + 1) / 2 > k {
        s -= 1;
    }
    while (s + 1) * (s + 2) / 2 <= k {
        s += 1;
    }
    s as u64
}

/// Inverse of [`pair_diag`].
pub fn unpair_diag(k: u64) -> (u64, u64) {
    let s = triangular_root(k) as u128;
    let b = k as u128 - s * (s + 1) / 2;
    ((s - b) as u64, b as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EqualPair(pub u64);

impl fmt::Display for EqualPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unordered pair needs distinct elements, got {} twice", self.0)
    }
}

impl core::error::Error for EqualPair {}

/// Code of the unordered pair `{a, b}`: `max(max-1)/2 + min`. A bijection onto the naturals.
pub fn code_unordered(a: u64, b: u64) -> Result<u64, EqualPair> {
    if a == b {
        return Err(EqualPair(a));
    }
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let v = (hi as u128) * (hi as u128 - 1) / 2 + lo as u128;
    Ok(u64::try_from(v).expect("pair code overflow"))
}

/// Inverse of [`code_unordered`], returned as `(min, max)`.
pub fn decode_unordered(k: u64) -> (u64, u64) {
    // max = m with m(m-1)/2 <= k < m(m+1)/2, i.e. m = triangular_root(k) + 1.
    let m = triangular_root(k) as u128 + 1;
    ((k as u128 - m * (m - 1) / 2) as u64, m as u64)
}

/// A finite sequence of naturals, a node of `ω^{<ω}`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct FiniteString(pub Vec<u64>);

impl FiniteString {
    pub fn root() -> Self {
        FiniteString(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, n: u64) -> Self {
        let mut v = self.0.clone();
        v.push(n);
        FiniteString(v)
    }

    pub fn parent(&self) -> Option<Self> {
        if self.0.is_empty() {
            None
        } else {
            Some(FiniteString(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn last(&self) -> Option<u64> {
        self.0.last().copied()
    }

    /// `self ⊑ other`.
    pub fn is_prefix_of(&self, other: &FiniteString) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn comparable(&self, other: &FiniteString) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }

    /// All prefixes, shortest first, including the empty string and `self`.
    pub fn prefixes(&self) -> impl Iterator<Item = FiniteString> + '_ {
        (0..=self.0.len()).map(move |k| FiniteString(self.0[..k].to_vec()))
    }
}

impl From<Vec<u64>> for FiniteString {
    fn from(v: Vec<u64>) -> Self {
        FiniteString(v)
    }
}

impl fmt::Debug for FiniteString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for FiniteString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        write!(f, "(")?;
        for (k, x) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// A subset of the naturals given by a finite descriptor tree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(
    feature = "serde",
    serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)
)]
pub enum DescribedSet {
    Finite { elements: BTreeSet<u64> },
    Cofinite { excluded: BTreeSet<u64> },
    /// `{base + k*step : k >= 0}`; step 0 is the singleton `{base}`.
    Progression { base: u64, step: u64 },
    /// Union of half-open intervals `[a, b)`.
    Intervals { intervals: Vec<(u64, u64)> },
    /// Sums of nonempty subsets of the generators.
    FsClosure { generators: BTreeSet<u64> },
    /// Positive differences of pairs of generators.
    DeltaImage { generators: BTreeSet<u64> },
    /// Codes of the unordered pairs drawn from `vertices`.
    PairCodes { vertices: Box<DescribedSet> },
    Union { parts: Vec<DescribedSet> },
    Intersection { parts: Vec<DescribedSet> },
    Complement { of: Box<DescribedSet> },
}

/// Coarse cardinality of a set and of its complement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum SizeClass {
    Finite,
    Cofinite,
    /// Infinite and co-infinite.
    Bi,
}

impl SizeClass {
    fn complement(self) -> SizeClass {
        match self {
            SizeClass::Finite => SizeClass::Cofinite,
            SizeClass::Cofinite => SizeClass::Finite,
            SizeClass::Bi => SizeClass::Bi,
        }
    }
}

/// Limits on the eventually periodic normal form; larger sets fall back to structural rules.
const PERIODIC_LIMIT: u64 = 1 << 16;

/// Eventually periodic set: below `threshold` read `prefix`, above it read `pattern[x % period]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Periodic {
    pub threshold: u64,
    pub prefix: Vec<bool>,
    pub pattern: Vec<bool>,
}

impl Periodic {
    pub fn period(&self) -> u64 {
        self.pattern.len() as u64
    }

    pub fn contains(&self, x: u64) -> bool {
        if x < self.threshold {
            self.prefix[x as usize]
        } else {
            self.pattern[(x % self.period()) as usize]
        }
    }

    fn finite(elements: &BTreeSet<u64>, value: bool) -> Option<Periodic> {
        let threshold = elements.last().map_or(0, |m| m + 1);
        if threshold > PERIODIC_LIMIT {
            return None;
        }
        let mut prefix = vec![!value; threshold as usize];
        for &x in elements {
            prefix[x as usize] = value;
        }
        Some(Periodic {
            threshold,
            prefix,
            pattern: vec![!value],
        })
    }

    fn combine(&self, other: &Periodic, f: impl Fn(bool, bool) -> bool) -> Option<Periodic> {
        let threshold = self.threshold.max(other.threshold);
        let period = self.period().lcm(&other.period());
        if threshold > PERIODIC_LIMIT || period > PERIODIC_LIMIT {
            return None;
        }
        let prefix = (0..threshold)
            .map(|x| f(self.contains(x), other.contains(x)))
            .collect();
        // Residues are read at threshold + r so that both operands are in their periodic part.
        let mut pattern = vec![false; period as usize];
        for k in 0..period {
            let x = threshold + k;
            pattern[(x % period) as usize] = f(self.contains(x), other.contains(x));
        }
        Some(Periodic {
            threshold,
            prefix,
            pattern,
        })
    }

    fn negate(&self) -> Periodic {
        Periodic {
            threshold: self.threshold,
            prefix: self.prefix.iter().map(|b| !b).collect(),
            pattern: self.pattern.iter().map(|b| !b).collect(),
        }
    }

    pub fn size_class(&self) -> SizeClass {
        if self.pattern.iter().all(|b| !b) {
            SizeClass::Finite
        } else if self.pattern.iter().all(|b| *b) {
            SizeClass::Cofinite
        } else {
            SizeClass::Bi
        }
    }

    /// Whether all sufficiently large multiples of the period are members.
    pub fn contains_tail_multiples(&self) -> bool {
        self.pattern[0]
    }

    /// Number of residues mod the period that are eventually members.
    pub fn tail_residues(&self) -> usize {
        self.pattern.iter().filter(|b| **b).count()
    }

    /// Some residue class that lies eventually inside the set, as `(residue, period)`.
    pub fn some_tail_class(&self) -> Option<(u64, u64)> {
        self.pattern
            .iter()
            .position(|b| *b)
            .map(|r| (r as u64, self.period()))
    }
}

fn fs_sums(generators: &BTreeSet<u64>, bound: Option<u64>) -> BTreeSet<u64> {
    let mut sums: BTreeSet<u64> = BTreeSet::new();
    for &g in generators {
        if bound.is_some_and(|b| g > b) {
            continue;
        }
        let mut next: Vec<u64> = Vec::with_capacity(sums.len() + 1);
        next.push(g);
        for &s in &sums {
            if let Some(t) = s.checked_add(g) {
                if bound.is_none_or(|b| t <= b) {
                    next.push(t);
                }
            }
        }
        sums.extend(next);
    }
    sums
}

fn differences(generators: &BTreeSet<u64>) -> BTreeSet<u64> {
    let g: Vec<u64> = generators.iter().copied().collect();
    let mut out = BTreeSet::new();
    for (k, &a) in g.iter().enumerate() {
        for &b in &g[k + 1..] {
            out.insert(b - a);
        }
    }
    out
}

impl DescribedSet {
    pub fn empty() -> Self {
        DescribedSet::Finite {
            elements: BTreeSet::new(),
        }
    }

    /// The set of all naturals.
    pub fn all() -> Self {
        DescribedSet::Cofinite {
            excluded: BTreeSet::new(),
        }
    }

    pub fn finite<I: IntoIterator<Item = u64>>(elements: I) -> Self {
        DescribedSet::Finite {
            elements: elements.into_iter().collect(),
        }
    }

    pub fn cofinite<I: IntoIterator<Item = u64>>(excluded: I) -> Self {
        DescribedSet::Cofinite {
            excluded: excluded.into_iter().collect(),
        }
    }

    pub fn progression(base: u64, step: u64) -> Self {
        DescribedSet::Progression { base, step }
    }

    pub fn interval(a: u64, b: u64) -> Self {
        DescribedSet::Intervals {
            intervals: vec![(a, b)],
        }
    }

    pub fn fs_closure<I: IntoIterator<Item = u64>>(generators: I) -> Self {
        DescribedSet::FsClosure {
            generators: generators.into_iter().collect(),
        }
    }

    pub fn delta_image<I: IntoIterator<Item = u64>>(generators: I) -> Self {
        DescribedSet::DeltaImage {
            generators: generators.into_iter().collect(),
        }
    }

    pub fn pair_codes(vertices: DescribedSet) -> Self {
        DescribedSet::PairCodes {
            vertices: Box::new(vertices),
        }
    }

    pub fn complement(self) -> Self {
        DescribedSet::Complement { of: Box::new(self) }
    }

    pub fn union(parts: Vec<DescribedSet>) -> Self {
        DescribedSet::Union { parts }
    }

    pub fn intersection(parts: Vec<DescribedSet>) -> Self {
        DescribedSet::Intersection { parts }
    }

    /// `{n : m does not divide n}`.
    pub fn non_multiples(m: u64) -> Self {
        DescribedSet::progression(0, m).complement()
    }

    pub fn contains(&self, x: u64) -> bool {
        match self {
            DescribedSet::Finite { elements } => elements.contains(&x),
            DescribedSet::Cofinite { excluded } => !excluded.contains(&x),
            DescribedSet::Progression { base, step } => {
                if *step == 0 {
                    x == *base
                } else {
                    x >= *base && (x - base) % step == 0
                }
            }
            DescribedSet::Intervals { intervals } => {
                intervals.iter().any(|&(a, b)| a <= x && x < b)
            }
            DescribedSet::FsClosure { generators } => {
                fs_sums(generators, Some(x)).contains(&x)
            }
            DescribedSet::DeltaImage { generators } => generators
                .iter()
                .any(|&g| g.checked_add(x).is_some_and(|h| generators.contains(&h))),
            DescribedSet::PairCodes { vertices } => {
                let (a, b) = decode_unordered(x);
                vertices.contains(a) && vertices.contains(b)
            }
            DescribedSet::Union { parts } => parts.iter().any(|p| p.contains(x)),
            DescribedSet::Intersection { parts } => parts.iter().all(|p| p.contains(x)),
            DescribedSet::Complement { of } => !of.contains(x),
        }
    }

    /// Members below `horizon`, ascending.
    pub fn enumerate_upto(&self, horizon: u64) -> Vec<u64> {
        match self {
            DescribedSet::Finite { elements } => {
                elements.range(..horizon).copied().collect()
            }
            DescribedSet::Cofinite { excluded } => {
                (0..horizon).filter(|x| !excluded.contains(x)).collect()
            }
            DescribedSet::Progression { base, step } => {
                if *base >= horizon {
                    Vec::new()
                } else if *step == 0 {
                    vec![*base]
                } else {
                    (*base..horizon).step_by(*step as usize).collect()
                }
            }
            DescribedSet::Intervals { intervals } => {
                let mut out: BTreeSet<u64> = BTreeSet::new();
                for &(a, b) in intervals {
                    out.extend(a..b.min(horizon));
                }
                out.into_iter().collect()
            }
            DescribedSet::FsClosure { generators } => {
                if horizon == 0 {
                    return Vec::new();
                }
                fs_sums(generators, Some(horizon - 1)).into_iter().collect()
            }
            DescribedSet::DeltaImage { generators } => differences(generators)
                .range(..horizon)
                .copied()
                .collect(),
            DescribedSet::PairCodes { vertices } => {
                if horizon == 0 {
                    return Vec::new();
                }
                let (_, top) = decode_unordered(horizon - 1);
                let vs = vertices.enumerate_upto(top + 1);
                let mut out = BTreeSet::new();
                for (k, &a) in vs.iter().enumerate() {
                    for &b in &vs[k + 1..] {
                        let c = code_unordered(a, b).unwrap();
                        if c < horizon {
                            out.insert(c);
                        }
                    }
                }
                out.into_iter().collect()
            }
            DescribedSet::Union { parts } => {
                let mut out = BTreeSet::new();
                for p in parts {
                    out.extend(p.enumerate_upto(horizon));
                }
                out.into_iter().collect()
            }
            DescribedSet::Intersection { parts } => match parts.split_first() {
                None => (0..horizon).collect(),
                Some((first, rest)) => first
                    .enumerate_upto(horizon)
                    .into_iter()
                    .filter(|&x| rest.iter().all(|p| p.contains(x)))
                    .collect(),
            },
            DescribedSet::Complement { of } => {
                let inner: BTreeSet<u64> = of.enumerate_upto(horizon).into_iter().collect();
                (0..horizon).filter(|x| !inner.contains(x)).collect()
            }
        }
    }

    /// Exact eventually periodic normal form, when the descriptor admits a small one.
    pub fn periodic(&self) -> Option<Periodic> {
        match self {
            DescribedSet::Finite { elements } => Periodic::finite(elements, true),
            DescribedSet::Cofinite { excluded } => Periodic::finite(excluded, false),
            DescribedSet::Progression { base, step } => {
                if *step == 0 {
                    return Periodic::finite(&[*base].into_iter().collect(), true);
                }
                if *base > PERIODIC_LIMIT || *step > PERIODIC_LIMIT {
                    return None;
                }
                let mut pattern = vec![false; *step as usize];
                pattern[(base % step) as usize] = true;
                Some(Periodic {
                    threshold: *base,
                    prefix: vec![false; *base as usize],
                    pattern,
                })
            }
            DescribedSet::Intervals { intervals } => {
                let top = intervals.iter().map(|&(_, b)| b).max().unwrap_or(0);
                if top > PERIODIC_LIMIT {
                    return None;
                }
                let set = self.enumerate_upto(top).into_iter().collect();
                Periodic::finite(&set, true)
            }
            DescribedSet::FsClosure { generators } => {
                let total: u128 = generators.iter().map(|&g| g as u128).sum();
                if total > PERIODIC_LIMIT as u128 {
                    return None;
                }
                Periodic::finite(&fs_sums(generators, None), true)
            }
            DescribedSet::DeltaImage { generators } => {
                Periodic::finite(&differences(generators), true)
            }
            DescribedSet::PairCodes { vertices } => {
                let v = vertices.periodic()?;
                match v.size_class() {
                    SizeClass::Finite => {
                        let vs: Vec<u64> = (0..v.threshold).filter(|&x| v.contains(x)).collect();
                        let mut codes = BTreeSet::new();
                        for (k, &a) in vs.iter().enumerate() {
                            for &b in &vs[k + 1..] {
                                codes.insert(code_unordered(a, b).ok()?);
                            }
                        }
                        Periodic::finite(&codes, true)
                    }
                    SizeClass::Cofinite if v.prefix.iter().all(|b| *b) => Some(Periodic {
                        threshold: 0,
                        prefix: Vec::new(),
                        pattern: vec![true],
                    }),
                    _ => None,
                }
            }
            DescribedSet::Union { parts } => parts.iter().try_fold(
                Periodic::finite(&BTreeSet::new(), true)?,
                |acc, p| acc.combine(&p.periodic()?, |a, b| a || b),
            ),
            DescribedSet::Intersection { parts } => parts.iter().try_fold(
                Periodic::finite(&BTreeSet::new(), false)?,
                |acc, p| acc.combine(&p.periodic()?, |a, b| a && b),
            ),
            DescribedSet::Complement { of } => Some(of.periodic()?.negate()),
        }
    }

    /// Whether the set is finite, cofinite, or neither; `None` when the descriptor does not decide it.
    pub fn size_class(&self) -> Option<SizeClass> {
        if let Some(p) = self.periodic() {
            return Some(p.size_class());
        }
        match self {
            DescribedSet::Finite { .. }
            | DescribedSet::Intervals { .. }
            | DescribedSet::FsClosure { .. }
            | DescribedSet::DeltaImage { .. } => Some(SizeClass::Finite),
            DescribedSet::Cofinite { .. } => Some(SizeClass::Cofinite),
            DescribedSet::Progression { step, .. } => Some(match step {
                0 => SizeClass::Finite,
                1 => SizeClass::Cofinite,
                _ => SizeClass::Bi,
            }),
            DescribedSet::PairCodes { vertices } => match vertices.size_class()? {
                SizeClass::Finite => Some(SizeClass::Finite),
                // An infinite vertex set missing some vertex v omits every code {v, x}.
                SizeClass::Bi => Some(SizeClass::Bi),
                SizeClass::Cofinite => match vertices.as_ref() {
                    DescribedSet::Cofinite { excluded } if excluded.is_empty() => {
                        Some(SizeClass::Cofinite)
                    }
                    DescribedSet::Cofinite { .. } => Some(SizeClass::Bi),
                    _ => None,
                },
            },
            DescribedSet::Complement { of } => of.size_class().map(SizeClass::complement),
            DescribedSet::Union { parts } => {
                let classes: Option<Vec<SizeClass>> = parts.iter().map(|p| p.size_class()).collect();
                let classes = classes?;
                if classes.contains(&SizeClass::Cofinite) {
                    Some(SizeClass::Cofinite)
                } else if classes.iter().all(|c| *c == SizeClass::Finite) {
                    Some(SizeClass::Finite)
                } else if classes.iter().filter(|c| **c == SizeClass::Bi).count() == 1 {
                    Some(SizeClass::Bi)
                } else {
                    None
                }
            }
            DescribedSet::Intersection { parts } => {
                let classes: Option<Vec<SizeClass>> = parts.iter().map(|p| p.size_class()).collect();
                let classes = classes?;
                if classes.contains(&SizeClass::Finite) {
                    Some(SizeClass::Finite)
                } else if classes.iter().all(|c| *c == SizeClass::Cofinite) {
                    Some(SizeClass::Cofinite)
                } else if classes.iter().filter(|c| **c == SizeClass::Bi).count() == 1 {
                    Some(SizeClass::Bi)
                } else {
                    None
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    #[test]
    fn pairing_examples() {
        assert_eq!(pair_diag(0, 0), 0);
        assert_eq!(pair_diag(1, 0), 1);
        assert_eq!(pair_diag(0, 1), 2);
        assert_eq!(pair_diag(1, 1), 4);
        assert_eq!(unpair_diag(5), (0, 2));
        assert_eq!(checked_pair_diag(u64::MAX, 1), None);
    }

    #[test]
    fn unordered_examples() {
        assert_eq!(code_unordered(0, 1), Ok(0));
        assert_eq!(code_unordered(2, 1), Ok(2));
        assert_eq!(code_unordered(0, 3), Ok(3));
        assert_eq!(code_unordered(4, 4), Err(EqualPair(4)));
        assert_eq!(decode_unordered(3), (0, 3));
    }

    #[test]
    fn root_handles_large_codes() {
        for k in [u64::MAX, u64::MAX - 1, 1 << 63, (1 << 32) + 7] {
            let (i, b) = unpair_diag(k);
            assert_eq!(checked_pair_diag(i, b), Some(k));
        }
    }

    #[test]
    fn strings() {
        let s = FiniteString(vec![3, 1]);
        assert!(FiniteString(vec![3]).is_prefix_of(&s));
        assert!(FiniteString::root().is_prefix_of(&s));
        assert!(!FiniteString(vec![1]).comparable(&s));
        assert_eq!(s.parent(), Some(FiniteString(vec![3])));
        assert_eq!(s.to_string(), "(3,1)");
        assert_eq!(s.prefixes().count(), 3);
    }

    #[test]
    fn descriptor_examples() {
        assert_eq!(DescribedSet::progression(0, 3).enumerate_upto(10), vec![0, 3, 6, 9]);
        assert_eq!(DescribedSet::fs_closure([1, 2]).enumerate_upto(100), vec![1, 2, 3]);
        assert_eq!(DescribedSet::delta_image([1, 4, 6]).enumerate_upto(100), vec![2, 3, 5]);
        assert!(DescribedSet::fs_closure([3, 5, 9]).contains(17));
        assert!(!DescribedSet::fs_closure([3, 5, 9]).contains(13));
        let odd_codes = DescribedSet::pair_codes(DescribedSet::progression(1, 2));
        assert_eq!(odd_codes.enumerate_upto(16), vec![4, 11, 13]);
        assert!(odd_codes.contains(13));
    }

    #[test]
    fn periodic_forms() {
        let a3 = DescribedSet::non_multiples(3);
        let p = a3.periodic().unwrap();
        assert_eq!(p.size_class(), SizeClass::Bi);
        assert!(!p.contains_tail_multiples());
        let evens_minus_odds =
            DescribedSet::intersection(vec![DescribedSet::progression(0, 2), DescribedSet::progression(1, 2).complement()]);
        assert_eq!(evens_minus_odds.size_class(), Some(SizeClass::Bi));
        let six = DescribedSet::intersection(vec![DescribedSet::progression(0, 2), DescribedSet::progression(0, 3)]);
        assert_eq!(six.enumerate_upto(20), vec![0, 6, 12, 18]);
        assert_eq!(six.periodic().unwrap().period(), 6);
        assert_eq!(DescribedSet::cofinite([1, 5]).size_class(), Some(SizeClass::Cofinite));
        assert_eq!(DescribedSet::pair_codes(DescribedSet::all()).size_class(), Some(SizeClass::Cofinite));
        assert_eq!(
            DescribedSet::pair_codes(DescribedSet::progression(0, 2)).size_class(),
            Some(SizeClass::Bi)
        );
    }
}
