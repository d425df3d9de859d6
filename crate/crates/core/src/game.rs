//! Checking reduction witnesses at a horizon: Katětov maps, subset reductions between block sums, and branching trees.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::construction::{BlockWeight, PartitionData};
use crate::ideals::{in_dual_filter, Answer, Evidence, IdealDescriptor, Verdict};
use crate::omega::{DescribedSet, FiniteString, SizeClass};
use crate::trees::{check_branching, CoherentMap, FiniteTree, Successors};

/// A map `h : ω → ω` given by a rule.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "map", rename_all = "kebab-case"))]
pub enum KatetovMap {
    Identity,
    Constant { value: u64 },
    /// `x ↦ x + offset`.
    Shift { offset: u64 },
    /// `x ↦ values[x]` below `values.len()`, identity above.
    Table { values: Vec<u64> },
}

impl KatetovMap {
    pub fn apply(&self, x: u64) -> Option<u64> {
        match self {
            KatetovMap::Identity => Some(x),
            KatetovMap::Constant { value } => Some(*value),
            KatetovMap::Shift { offset } => x.checked_add(*offset),
            KatetovMap::Table { values } => Some(values.get(x as usize).copied().unwrap_or(x)),
        }
    }

    /// `h⁻¹[a]` as a descriptor, when the set algebra can express it.
    pub fn preimage(&self, a: &DescribedSet) -> Option<DescribedSet> {
        match self {
            KatetovMap::Identity => Some(a.clone()),
            KatetovMap::Constant { value } => Some(if a.contains(*value) { DescribedSet::all() } else { DescribedSet::empty() }),
            KatetovMap::Shift { offset } => shift_down(a, *offset),
            KatetovMap::Table { values } => {
                let len = values.len() as u64;
                let head = DescribedSet::finite((0..len).filter(|&x| a.contains(values[x as usize])));
                let tail = DescribedSet::intersection(alloc::vec![a.clone(), DescribedSet::interval(0, len).complement()]);
                Some(DescribedSet::union(alloc::vec![head, tail]))
            }
        }
    }
}

/// `{x : x + o ∈ a}`.
fn shift_down(a: &DescribedSet, o: u64) -> Option<DescribedSet> {
    Some(match a {
        DescribedSet::Finite { elements } => DescribedSet::finite(elements.iter().filter_map(|e| e.checked_sub(o))),
        DescribedSet::Cofinite { excluded } => DescribedSet::cofinite(excluded.iter().filter_map(|e| e.checked_sub(o))),
        DescribedSet::Progression { base, step } => {
            if *base >= o {
                DescribedSet::progression(base - o, *step)
            } else if *step == 0 {
                DescribedSet::empty()
            } else {
                let k = (o - base).div_ceil(*step);
                DescribedSet::progression(base + k * step - o, *step)
            }
        }
        DescribedSet::Intervals { intervals } => DescribedSet::Intervals {
            intervals: intervals
                .iter()
                .filter(|&&(_, b)| b > o)
                .map(|&(a, b)| (a.saturating_sub(o), b - o))
                .collect(),
        },
        DescribedSet::Union { parts } => DescribedSet::union(parts.iter().map(|p| shift_down(p, o)).collect::<Option<_>>()?),
        DescribedSet::Intersection { parts } => DescribedSet::intersection(parts.iter().map(|p| shift_down(p, o)).collect::<Option<_>>()?),
        DescribedSet::Complement { of } => DescribedSet::Complement { of: Box::new(shift_down(of, o)?) },
        DescribedSet::FsClosure { .. } | DescribedSet::DeltaImage { .. } | DescribedSet::PairCodes { .. } => return None,
    })
}

/// Whether `h⁻¹[a]` lies in the dual filter of the target.
pub fn katetov_witness_check(h: &KatetovMap, target: &IdealDescriptor, a: &DescribedSet, horizon: u64) -> Verdict {
    match h.preimage(a) {
        Some(pre) => in_dual_filter(target, &pre, horizon),
        None => Verdict::unknown(Evidence::Undecided { horizon, partial_weight: None }),
    }
}

/// `Sum_P ⊆ Sum_Q` via `P ⊆* Q` and `w_Q ≤ w_P` beyond the exceptions.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SubsetReduction {
    pub answer: Answer,
    /// Elements of `P \ Q` below the horizon.
    pub exceptions: Vec<u64>,
    /// `w_Q ≤ w_P` on every block from here on, when `P ⊆* Q`.
    pub exception_bound: Option<u64>,
    /// Blocks on which the weight order was checked, and whether it held on all of them.
    pub blocks_checked: usize,
    pub weights_ordered: bool,
}

pub fn check_subset_reduction(p: &DescribedSet, q: &DescribedSet, partition: &alloc::sync::Arc<PartitionData>, horizon: u64) -> SubsetReduction {
    let diff = DescribedSet::intersection(alloc::vec![p.clone(), q.clone().complement()]);
    let exceptions = diff.enumerate_upto(horizon);
    let almost = match diff.size_class() {
        Some(SizeClass::Finite) => Answer::In,
        Some(_) => Answer::Out,
        None => Answer::Unknown,
    };
    if almost != Answer::In {
        return SubsetReduction { answer: almost, exceptions, exception_bound: None, blocks_checked: 0, weights_ordered: false };
    }
    let bound = exceptions.last().map_or(0, |&x| x + 1);
    let wp = BlockWeight::new(p.clone(), partition.clone());
    let wq = BlockWeight::new(q.clone(), partition.clone());
    let depth = partition.depth();
    let blocks: Vec<usize> = (bound as usize..depth).collect();
    let ordered = blocks.iter().all(|&n| wq.block_weight(n) <= wp.block_weight(n));
    SubsetReduction {
        answer: if ordered { Answer::In } else { Answer::Out },
        exceptions,
        exception_bound: Some(bound),
        blocks_checked: blocks.len(),
        weights_ordered: ordered,
    }
}

/// A reduction witness for the gamified order.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "witness", rename_all = "kebab-case"))]
pub enum Witness {
    /// `Φ(x⌢…) = x`: every successor of the root is its own value.
    IdentityHeightOne,
    /// A partial map on strings, with the successor sets a tree may use.
    Coherent { map: CoherentMap, family: Vec<DescribedSet> },
}

/// A finite tree meeting the branching and value conditions at the horizon.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TreeCertificate {
    pub tree: FiniteTree,
    pub map: CoherentMap,
    /// Branching verdict of every internal node, in node order.
    pub branching: Vec<(FiniteString, Verdict)>,
}

fn identity_certificate(target: &IdealDescriptor, a: &DescribedSet, horizon: u64) -> Option<TreeCertificate> {
    let verdict = in_dual_filter(target, a, horizon);
    if !verdict.is_in() {
        return None;
    }
    let children = a.enumerate_upto(horizon);
    let mut map = CoherentMap::new();
    for &x in &children {
        map.insert_coherent(FiniteString::root().child(x), x).ok()?;
    }
    let nodes = core::iter::once(FiniteString::root()).chain(children.iter().map(|&x| FiniteString::root().child(x)));
    let tree = FiniteTree::new(nodes, [(FiniteString::root(), Successors::Described { set: a.clone() })]).ok()?;
    Some(TreeCertificate { tree, map, branching: alloc::vec![(FiniteString::root(), verdict)] })
}

struct Search<'a> {
    map: &'a CoherentMap,
    family: &'a [DescribedSet],
    verdicts: Vec<Verdict>,
    a: &'a DescribedSet,
    horizon: u64,
    nodes: BTreeSet<FiniteString>,
    descriptors: Vec<(FiniteString, Successors)>,
    branching: BTreeMap<FiniteString, Verdict>,
}

impl Search<'_> {
    fn grow(&mut self, s: &FiniteString, depth: usize) -> bool {
        self.nodes.insert(s.clone());
        if let Some(v) = self.map.value_at(s) {
            return self.a.contains(v);
        }
        if depth == 0 {
            return false;
        }
        for j in 0..self.family.len() {
            if !self.verdicts[j].is_in() {
                continue;
            }
            let (nodes, descs, branching) = (self.nodes.clone(), self.descriptors.len(), self.branching.clone());
            let kids = self.family[j].enumerate_upto(self.horizon);
            if kids.iter().all(|&x| self.grow(&s.child(x), depth - 1)) {
                self.descriptors.push((s.clone(), Successors::Described { set: self.family[j].clone() }));
                self.branching.insert(s.clone(), self.verdicts[j].clone());
                return true;
            }
            self.nodes = nodes;
            self.descriptors.truncate(descs);
            self.branching = branching;
        }
        false
    }
}

/// A certificate that `a` is reached, or `None` when no tree of the given depth is found.
pub fn check_reduction_witness(witness: &Witness, target: &IdealDescriptor, a: &DescribedSet, depth: usize, horizon: u64) -> Option<TreeCertificate> {
    match witness {
        Witness::IdentityHeightOne => identity_certificate(target, a, horizon),
        Witness::Coherent { map, family } => {
            let verdicts = family.iter().map(|s| in_dual_filter(target, s, horizon)).collect();
            let mut search = Search {
                map,
                family,
                verdicts,
                a,
                horizon,
                nodes: BTreeSet::new(),
                descriptors: Vec::new(),
                branching: BTreeMap::new(),
            };
            if !search.grow(&FiniteString::root(), depth) {
                return None;
            }
            let tree = FiniteTree::new(search.nodes, search.descriptors).ok()?;
            Some(TreeCertificate { tree, map: map.clone(), branching: search.branching.into_iter().collect() })
        }
    }
}

/// Re-derives the branching verdicts and re-reads every leaf value.
pub fn validate_certificate(c: &TreeCertificate, target: &IdealDescriptor, a: &DescribedSet, horizon: u64) -> bool {
    let verdicts = check_branching(&c.tree, target, horizon);
    let internal_ok = c.tree.nodes().iter().filter(|s| !c.tree.is_leaf(s)).all(|s| verdicts[s].is_in() && c.branching.iter().any(|(t, v)| t == s && v == &verdicts[s]));
    let leaves_ok = c.tree.nodes().iter().filter(|s| c.tree.is_leaf(s)).all(|s| c.map.value_at(s).is_some_and(|v| a.contains(v)));
    internal_ok && leaves_ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::build_partition;
    use alloc::sync::Arc;

    #[test]
    fn katetov_examples() {
        let sum = IdealDescriptor::sum_harmonic();
        let cof = DescribedSet::cofinite([1, 4]);
        assert!(katetov_witness_check(&KatetovMap::Identity, &sum, &cof, 1000).is_in());
        let odd = DescribedSet::progression(1, 2);
        assert!(katetov_witness_check(&KatetovMap::Constant { value: 4 }, &sum, &odd, 1000).is_out());
        let fs = DescribedSet::fs_closure([1, 2, 4]).complement();
        assert!(katetov_witness_check(&KatetovMap::Shift { offset: 3 }, &sum, &fs, 1000).is_unknown());
    }

    #[test]
    fn shifted_preimage() {
        let a = DescribedSet::union(alloc::vec![DescribedSet::progression(1, 3), DescribedSet::interval(2, 9)]);
        let h = KatetovMap::Shift { offset: 5 };
        let pre = h.preimage(&a).unwrap();
        for x in 0..100 {
            assert_eq!(pre.contains(x), a.contains(x + 5), "{x}");
        }
        let t = KatetovMap::Table { values: alloc::vec![7, 8, 2] };
        let pre = t.preimage(&a).unwrap();
        for x in 0..100 {
            assert_eq!(pre.contains(x), a.contains(t.apply(x).unwrap()), "{x}");
        }
    }

    #[test]
    fn subset_examples() {
        let p = Arc::new(build_partition(4).unwrap());
        let evens = DescribedSet::progression(0, 2);
        let r = check_subset_reduction(&evens, &DescribedSet::union(alloc::vec![evens.clone(), DescribedSet::finite([1])]), &p, 100);
        assert_eq!((r.answer, r.exceptions.len()), (Answer::In, 0));
        let p4 = DescribedSet::union(alloc::vec![DescribedSet::finite([0]), DescribedSet::progression(0, 4)]);
        assert_eq!(check_subset_reduction(&p4, &evens, &p, 100).answer, Answer::In);
        let r = check_subset_reduction(&evens, &DescribedSet::progression(1, 2), &p, 100);
        assert_eq!((r.answer, r.exceptions.len()), (Answer::Out, 50));
    }

    #[test]
    fn height_one_identity() {
        let sum = IdealDescriptor::sum_harmonic();
        let a = DescribedSet::cofinite([0, 3]);
        let c = check_reduction_witness(&Witness::IdentityHeightOne, &sum, &a, 1, 50).unwrap();
        assert!(validate_certificate(&c, &sum, &a, 50));
        assert!(check_reduction_witness(&Witness::IdentityHeightOne, &sum, &DescribedSet::finite([1]), 1, 50).is_none());
    }

    #[test]
    fn coherent_search() {
        let sum = IdealDescriptor::sum_harmonic();
        let a = DescribedSet::cofinite([7]);
        let root = FiniteString::root();
        let at_root = CoherentMap::new().extend_coherent(root.clone(), 3).unwrap();
        let c = check_reduction_witness(&Witness::Coherent { map: at_root, family: alloc::vec![] }, &sum, &a, 0, 10).unwrap();
        assert_eq!(c.tree.nodes().len(), 1);
        let mut bad = CoherentMap::new();
        for x in 0..10 {
            bad = bad.extend_coherent(root.child(x), 7).unwrap();
        }
        let family = alloc::vec![DescribedSet::cofinite([])];
        assert!(check_reduction_witness(&Witness::Coherent { map: bad, family: family.clone() }, &sum, &a, 1, 10).is_none());
        let mut good = CoherentMap::new();
        for x in 0..10 {
            good = good.extend_coherent(root.child(x), x).unwrap();
        }
        let b = DescribedSet::cofinite([]);
        let c = check_reduction_witness(&Witness::Coherent { map: good, family }, &sum, &b, 1, 10).unwrap();
        assert!(validate_certificate(&c, &sum, &b, 10));
    }
}
