//! Finite sums, binary supports, difference sets, and canonical forms of colourings at finite scale.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use crate::ideals::diff_multiplicity;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetError {
    Duplicate(u64),
    Overflow,
    Zero,
}

impl fmt::Display for SetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetError::Duplicate(x) => write!(f, "element {x} listed twice"),
            SetError::Overflow => write!(f, "sum overflows u64"),
            SetError::Zero => write!(f, "0 has empty support"),
        }
    }
}

impl core::error::Error for SetError {}

/// All sums of non-empty subsets of `a`, sorted.
pub fn fs(a: &[u64]) -> Result<Vec<u64>, SetError> {
    let mut seen = BTreeSet::new();
    for &x in a {
        if !seen.insert(x) {
            return Err(SetError::Duplicate(x));
        }
    }
    let mut sums: BTreeSet<u64> = BTreeSet::new();
    for &x in a {
        let mut next: Vec<u64> = Vec::with_capacity(sums.len() + 1);
        next.push(x);
        for &s in &sums {
            next.push(s.checked_add(x).ok_or(SetError::Overflow)?);
        }
        sums.extend(next);
    }
    Ok(sums.into_iter().collect())
}

/// The powers of two summing to a positive natural.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SupportSet {
    pub powers: Vec<u64>,
}

impl SupportSet {
    pub fn min(&self) -> u64 {
        self.powers[0]
    }

    pub fn max(&self) -> u64 {
        *self.powers.last().unwrap()
    }

    pub fn sum(&self) -> u64 {
        self.powers.iter().sum()
    }
}

pub fn support(x: u64) -> Result<SupportSet, SetError> {
    if x == 0 {
        return Err(SetError::Zero);
    }
    let powers = (0..64).map(|j| 1u64 << j).filter(|p| x & p != 0).collect();
    Ok(SupportSet { powers })
}

/// `min α(x)` and `max α(x)` for `x >= 1`.
pub fn support_bounds(x: u64) -> (u64, u64) {
    debug_assert!(x > 0);
    (1 << x.trailing_zeros(), 1 << (63 - x.leading_zeros()))
}

/// Positive differences of distinct elements.
pub fn delta<I: IntoIterator<Item = u64>>(b: I) -> BTreeSet<u64> {
    let v: BTreeSet<u64> = b.into_iter().collect();
    let v: Vec<u64> = v.into_iter().collect();
    let mut out = BTreeSet::new();
    for (k, &x) in v.iter().enumerate() {
        for &y in &v[k + 1..] {
            out.insert(y - x);
        }
    }
    out
}

/// Consecutive supports strictly separated: `max α(h_n) < min α(h_{n+1})`.
pub fn block_disjoint(h: &[u64]) -> bool {
    h.iter().all(|&x| x > 0)
        && h.windows(2).all(|w| support_bounds(w[0]).1 < support_bounds(w[1]).0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Family {
    Ramsey,
    Hindman,
}

impl Family {
    pub fn cases(self) -> u8 {
        match self {
            Family::Ramsey => 4,
            Family::Hindman => 5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CanonicalForm {
    pub family: Family,
    pub case: u8,
}

impl CanonicalForm {
    pub fn new(family: Family, case: u8) -> Option<Self> {
        (1..=family.cases().into()).contains(&case).then_some(CanonicalForm { family, case })
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.family {
            Family::Ramsey => "ramsey",
            Family::Hindman => "hindman",
        };
        write!(f, "{name} case {}", self.case)
    }
}

/// Does `f(x)=f(y) ⇔ key(x)=key(y)` hold on every pair of the domain?
fn biconditional<K: PartialEq>(values: &[u64], keys: &[K]) -> bool {
    let d = values.len();
    (0..d).all(|a| (a + 1..d).all(|b| (values[a] == values[b]) == (keys[a] == keys[b])))
}

/// Picks the case among those holding: constant first, then injective, then the least.
///
/// On tiny domains several biconditionals can hold at once; an injective colouring is
/// reported as injective even when the coarser key happens to separate the domain too.
fn choose(holds: &[bool]) -> Option<u8> {
    let last = holds.len();
    if holds[0] {
        Some(1)
    } else if holds[last - 1] {
        Some(last as u8)
    } else {
        holds.iter().position(|&h| h).map(|p| p as u8 + 1)
    }
}

/// Canonical case of a colouring of pairs on `[t]²`, `t` strictly increasing.
pub fn classify_ramsey(f: &dyn Fn(u64, u64) -> u64, t: &[u64]) -> Option<CanonicalForm> {
    let mut values = Vec::new();
    let mut pairs = Vec::new();
    for (k, &a) in t.iter().enumerate() {
        for &b in &t[k + 1..] {
            values.push(f(a, b));
            pairs.push((a, b));
        }
    }
    let holds = [
        biconditional(&values, &alloc::vec![(); values.len()]),
        biconditional(&values, &pairs.iter().map(|p| p.0).collect::<Vec<_>>()),
        biconditional(&values, &pairs.iter().map(|p| p.1).collect::<Vec<_>>()),
        biconditional(&values, &pairs),
    ];
    choose(&holds).and_then(|c| CanonicalForm::new(Family::Ramsey, c))
}

/// Canonical case of a colouring on a finite set of positive naturals (typically `FS(H)`).
pub fn classify_hindman(f: &dyn Fn(u64) -> u64, domain: &[u64]) -> Option<CanonicalForm> {
    let values: Vec<u64> = domain.iter().map(|&x| f(x)).collect();
    let bounds: Vec<(u64, u64)> = domain.iter().map(|&x| support_bounds(x)).collect();
    let holds = [
        biconditional(&values, &alloc::vec![(); values.len()]),
        biconditional(&values, &bounds.iter().map(|b| b.0).collect::<Vec<_>>()),
        biconditional(&values, &bounds.iter().map(|b| b.1).collect::<Vec<_>>()),
        biconditional(&values, &bounds),
        biconditional(&values, domain),
    ];
    choose(&holds).and_then(|c| CanonicalForm::new(Family::Hindman, c))
}

/// Lexicographically least `T ⊆ [0,n)` of size `m` on whose pairs `f` is canonical.
pub fn canonical_ramsey_search(
    f: &dyn Fn(u64, u64) -> u64,
    n: u64,
    m: usize,
) -> Option<(Vec<u64>, CanonicalForm)> {
    fn go(
        f: &dyn Fn(u64, u64) -> u64,
        n: u64,
        m: usize,
        t: &mut Vec<u64>,
    ) -> Option<(Vec<u64>, CanonicalForm)> {
        if t.len() == m {
            return classify_ramsey(f, t).map(|c| (t.clone(), c));
        }
        let from = t.last().map_or(0, |&x| x + 1);
        let room = (m - t.len()) as u64;
        for x in from..n.saturating_sub(room - 1) {
            t.push(x);
            if let Some(hit) = go(f, n, m, t) {
                return Some(hit);
            }
            t.pop();
        }
        None
    }
    if m as u64 > n {
        return None;
    }
    go(f, n, m, &mut Vec::new())
}

/// Lexicographically least block-disjoint `H` of length `m` with `FS(H) ⊆ [1,N)` on which `f` is canonical.
pub fn canonical_hindman_search(f: &dyn Fn(u64) -> u64, m: usize, n: u64) -> Option<(Vec<u64>, CanonicalForm)> {
    fn go(
        f: &dyn Fn(u64) -> u64,
        m: usize,
        n: u64,
        h: &mut Vec<u64>,
        sum: u64,
    ) -> Option<(Vec<u64>, CanonicalForm)> {
        if h.len() == m {
            let domain = fs(h).ok()?;
            return classify_hindman(f, &domain).map(|c| (h.clone(), c));
        }
        // The next entry's support must start above the previous maximum power.
        let from = h.last().map_or(1, |&x| support_bounds(x).1 << 1);
        let mut x = from;
        while sum.checked_add(x).is_some_and(|s| s < n) {
            if h.last().is_none_or(|&p| support_bounds(p).1 < support_bounds(x).0) {
                h.push(x);
                if let Some(hit) = go(f, m, n, h, sum + x) {
                    return Some(hit);
                }
                h.pop();
            }
            x += 1;
        }
        None
    }
    if m == 0 {
        return None;
    }
    go(f, m, n, &mut Vec::new(), 0)
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SparseReport {
    pub passes: bool,
    /// Differences whose multiplicity exceeds the bound, with that multiplicity.
    pub offenders: Vec<(u64, usize)>,
}

/// Every difference of `a` realised by at most `bound` pairs.
pub fn eventually_sparse_check<I: IntoIterator<Item = u64>>(a: I, bound: usize) -> SparseReport {
    let offenders: Vec<(u64, usize)> = diff_multiplicity(a).into_iter().filter(|&(_, m)| m > bound).collect();
    SparseReport { passes: offenders.is_empty(), offenders }
}

/// Pairs inside `Δ(E)` sharing one difference, built from the two least elements of `E`.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SharedDifference {
    pub b: u64,
    pub c: u64,
    pub delta: u64,
    /// `(d − b, d − c)` for each `d ∈ E` above `c`.
    pub pairs: Vec<(u64, u64)>,
}

pub fn shared_difference_pairs(e: &BTreeSet<u64>) -> Option<SharedDifference> {
    let mut it = e.iter().copied();
    let b = it.next()?;
    let c = it.next()?;
    let pairs = it.map(|d| (d - b, d - c)).collect();
    Some(SharedDifference { b, c, delta: c - b, pairs })
}

/// Partition of a finite domain into the fibres of a colouring.
pub fn fibres<T: Ord + Clone>(domain: &[T], colour: impl Fn(&T) -> u64) -> BTreeMap<u64, Vec<T>> {
    let mut out: BTreeMap<u64, Vec<T>> = BTreeMap::new();
    for x in domain {
        out.entry(colour(x)).or_default().push(x.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::omega::code_unordered;
    use alloc::vec;

    #[test]
    fn finite_sums() {
        assert_eq!(fs(&[1, 2]).unwrap(), vec![1, 2, 3]);
        assert_eq!(fs(&[1, 2, 4]).unwrap(), (1..=7).collect::<Vec<_>>());
        assert_eq!(fs(&[2, 2]), Err(SetError::Duplicate(2)));
        assert!(fs(&[]).unwrap().is_empty());
    }

    #[test]
    fn supports() {
        assert_eq!(support(13).unwrap().powers, vec![1, 4, 8]);
        assert_eq!(support(16).unwrap().powers, vec![16]);
        assert_eq!(support(0), Err(SetError::Zero));
        for x in 1..=10_000u64 {
            let s = support(x).unwrap();
            assert_eq!(s.sum(), x);
            assert_eq!((s.min(), s.max()), support_bounds(x));
        }
    }

    #[test]
    fn differences() {
        assert_eq!(delta([1, 3, 6]), BTreeSet::from([2, 3, 5]));
        assert!(delta([4]).is_empty());
        assert_eq!(delta([0, 1, 2]), BTreeSet::from([1, 2]));
    }

    #[test]
    fn block_disjointness() {
        assert!(block_disjoint(&[1, 6]));
        assert!(block_disjoint(&[3, 4]));
        assert!(!block_disjoint(&[2, 3]));
        assert!(!block_disjoint(&[0, 4]));
    }

    #[test]
    fn ramsey_classification() {
        let t = [0, 1, 2, 3];
        assert_eq!(classify_ramsey(&|_, _| 7, &t).unwrap().case, 1);
        assert_eq!(classify_ramsey(&|a, b| a.min(b), &t).unwrap().case, 2);
        assert_eq!(classify_ramsey(&|a, b| a.max(b), &t).unwrap().case, 3);
        assert_eq!(classify_ramsey(&|a, b| code_unordered(a, b).unwrap(), &t).unwrap().case, 4);
        // f({0,1}) = f({1,2}) but f({0,2}) differs: no canonical shape.
        assert_eq!(classify_ramsey(&|a, b| u64::from(a + b == 2), &[0, 1, 2]), None);
    }

    #[test]
    fn ramsey_search() {
        assert_eq!(canonical_ramsey_search(&|_, _| 0, 5, 3).unwrap(), (vec![0, 1, 2], CanonicalForm { family: Family::Ramsey, case: 1 }));
        let inj = |a, b| code_unordered(a, b).unwrap();
        assert_eq!(canonical_ramsey_search(&inj, 5, 3).unwrap().1.case, 4);
        assert_eq!(canonical_ramsey_search(&inj, 2, 3), None);
    }

    #[test]
    fn hindman_search() {
        let (h, c) = canonical_hindman_search(&|_| 3, 2, 8).unwrap();
        assert_eq!((h, c.case), (vec![1, 2], 1));
        let (h, c) = canonical_hindman_search(&|x| x, 2, 8).unwrap();
        assert_eq!((h, c.case), (vec![1, 2], 5));
        assert_eq!(canonical_hindman_search(&|x| x, 4, 8), None);
        let min_form = |x: u64| support_bounds(x).0;
        let (h, c) = canonical_hindman_search(&min_form, 3, 64).unwrap();
        assert!(block_disjoint(&h));
        assert_eq!(c.case, 2);
    }

    #[test]
    fn sparseness() {
        assert!(eventually_sparse_check([0, 1, 3], 1).passes);
        let r = eventually_sparse_check([0, 1, 2, 3], 2);
        assert_eq!(r.offenders, vec![(1, 3)]);
        let e = BTreeSet::from([1, 4, 9, 16, 25]);
        let s = shared_difference_pairs(&e).unwrap();
        assert_eq!((s.b, s.c, s.delta, s.pairs.len()), (1, 4, 3, 3));
        let d = delta(e.iter().copied());
        assert!(s.pairs.iter().all(|&(x, y)| d.contains(&x) && d.contains(&y) && x - y == 3));
        assert!(!eventually_sparse_check(d, e.len() - 3).passes);
    }
}
