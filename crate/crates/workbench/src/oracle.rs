//! Brute-force reference computations, written without the core library, for cross-checking it.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

/// Subset sums of every nonempty subset, by bitmask.
pub fn finite_sums(gens: &[u64]) -> BTreeSet<u64> {
    assert!(gens.len() < 24, "bitmask enumeration is limited to 23 generators");
    (1u32..1 << gens.len())
        .map(|mask| (0..gens.len()).filter(|j| mask >> j & 1 == 1).map(|j| gens[j]).sum())
        .collect()
}

/// All two-element subsets, as `(smaller, larger)`.
pub fn pairs(vertices: &[u64]) -> BTreeSet<(u64, u64)> {
    let mut out = BTreeSet::new();
    for &a in vertices {
        for &b in vertices {
            if a < b {
                out.insert((a, b));
            }
        }
    }
    out
}

pub fn differences(e: &[u64]) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    for &a in e {
        for &b in e {
            if a > b {
                out.insert(a - b);
            }
        }
    }
    out
}

/// Number of pairs `x > y` of `a` with `x - y = d`.
pub fn pairs_with_difference(a: &BTreeSet<u64>, d: u64) -> usize {
    a.iter().filter(|&&y| a.contains(&(y + d))).count()
}

pub fn harmonic(labels: impl IntoIterator<Item = u64>) -> BigRational {
    labels
        .into_iter()
        .fold(BigRational::zero(), |acc, c| acc + BigRational::new(BigInt::from(1), BigInt::from(c) + 1))
}

/// Every set partition of `{0..n}` as a restricted growth string.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, cur: &mut Vec<usize>, top: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..=top {
            cur.push(b);
            go(n, cur, top.max(b + 1), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, &mut Vec::new(), 0, &mut out);
    out
}

/// Index of the edge `{a < b}` among the edges of `[n]²`, listed lexicographically.
pub fn edge_index(n: u64, a: u64, b: u64) -> usize {
    let (a, b) = (a.min(b), a.max(b));
    ((0..a).map(|x| n - 1 - x).sum::<u64>() + (b - a - 1)) as usize
}

/// The canonical case of a colouring of the pairs of `t`: constant, then injective, then the least.
///
/// Each case is tested by comparing the colour partition of the edges with the partition induced by the case's key.
pub fn ramsey_case(colour: &dyn Fn(u64, u64) -> u64, t: &[u64]) -> Option<u8> {
    let edges: Vec<(u64, u64)> = pairs(t).into_iter().collect();
    let colour_classes = classes(&edges, |&(a, b)| colour(a, b));
    let keyed = |key: &dyn Fn(&(u64, u64)) -> (u64, u64)| classes(&edges, key) == colour_classes;
    let constant = colour_classes.len() <= 1;
    let injective = colour_classes.len() == edges.len();
    let by_min = keyed(&|e: &(u64, u64)| (e.0, 0));
    let by_max = keyed(&|e: &(u64, u64)| (e.1, 0));
    if constant {
        Some(1)
    } else if injective {
        Some(4)
    } else if by_min {
        Some(2)
    } else if by_max {
        Some(3)
    } else {
        None
    }
}

/// The partition of `items` into fibres of `key`, as a set of index sets.
fn classes<T, K: Ord>(items: &[T], key: impl Fn(&T) -> K) -> BTreeSet<BTreeSet<usize>> {
    let mut by: BTreeMap<K, BTreeSet<usize>> = BTreeMap::new();
    for (j, x) in items.iter().enumerate() {
        by.entry(key(x)).or_default().insert(j);
    }
    by.into_values().collect()
}

/// Least `m`-subset of `[0, n)` in lexicographic order with a canonical case.
pub fn least_canonical(colour: &dyn Fn(u64, u64) -> u64, n: u64, m: usize) -> Option<(Vec<u64>, u8)> {
    let mut t: Vec<u64> = (0..m as u64).collect();
    if m as u64 > n {
        return None;
    }
    loop {
        if let Some(c) = ramsey_case(colour, &t) {
            return Some((t, c));
        }
        // Next combination in lexicographic order.
        let mut j = m;
        while j > 0 && t[j - 1] == n - (m - j + 1) as u64 {
            j -= 1;
        }
        if j == 0 {
            return None;
        }
        t[j - 1] += 1;
        for l in j..m {
            t[l] = t[l - 1] + 1;
        }
    }
}

/// Least `n ≤ max_n` such that every colouring of `[n]²` has a canonical `m`-set.
pub fn minimal_canonical_n(m: usize, max_n: u64) -> Option<u64> {
    (m as u64..=max_n).find(|&n| {
        let edges = (n * (n - 1) / 2) as usize;
        set_partitions(edges).iter().all(|p| {
            let f = |a: u64, b: u64| p[edge_index(n, a, b)] as u64;
            least_canonical(&f, n, m).is_some()
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_numbers() {
        let bell: Vec<usize> = (0..8).map(|n| set_partitions(n).len()).collect();
        assert_eq!(bell, [1, 1, 2, 5, 15, 52, 203, 877]);
    }

    #[test]
    fn edges_are_indexed_in_order() {
        let n = 5;
        let listed: Vec<usize> = pairs(&[0, 1, 2, 3, 4]).into_iter().map(|(a, b)| edge_index(n, a, b)).collect();
        assert_eq!(listed, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn small_cases() {
        assert_eq!(finite_sums(&[1, 2, 4]), (1..8).collect());
        assert_eq!(differences(&[1, 3, 6]), [2, 3, 5].into_iter().collect());
        let path = |a: u64, b: u64| u64::from(a == 0 && b == 2);
        assert_eq!(ramsey_case(&path, &[0, 1, 2]), None);
        assert_eq!(ramsey_case(&|a, _| a, &[0, 1, 2]), Some(2));
        assert_eq!(harmonic([0, 1, 3]), BigRational::new(7.into(), 4.into()));
    }

    #[test]
    fn triangles_need_four_points() {
        // Frozen from an exhaustive pass over all colourings of [3]² and [4]².
        assert_eq!(minimal_canonical_n(3, 5), Some(4));
    }
}
