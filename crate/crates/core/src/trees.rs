//! Finite prefix trees, coherent partial maps on strings, the labelling `ν` and critical nodes.
//!
//! Positivity of infinite successor classes cannot be computed from a finite tree, so internal
//! nodes consult a [`PositivityOracle`]. Only two facts are derived locally: an empty class is
//! never positive, and an internal node whose `⊥`-class is empty has a null `⊥`-class.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::ideals::{in_dual_filter, Evidence, IdealDescriptor, Verdict};
use crate::omega::{DescribedSet, FiniteString};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoherenceConflict {
    pub existing: FiniteString,
    pub existing_value: u64,
    pub new: FiniteString,
    pub new_value: u64,
}

impl fmt::Display for CoherenceConflict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "incoherent assignment: {} ↦ {} against {} ↦ {}",
            self.existing, self.existing_value, self.new, self.new_value
        )
    }
}

impl core::error::Error for CoherenceConflict {}

/// Finite partial map on strings; comparable assigned strings carry equal values.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(
    feature = "serde",
    serde(try_from = "Vec<(FiniteString, u64)>", into = "Vec<(FiniteString, u64)>")
)]
pub struct CoherentMap {
    assignments: BTreeMap<FiniteString, u64>,
}

impl TryFrom<Vec<(FiniteString, u64)>> for CoherentMap {
    type Error = CoherenceConflict;
    fn try_from(v: Vec<(FiniteString, u64)>) -> Result<Self, Self::Error> {
        let mut m = CoherentMap::default();
        for (s, c) in v {
            m.insert_coherent(s, c)?;
        }
        Ok(m)
    }
}

impl From<CoherentMap> for Vec<(FiniteString, u64)> {
    fn from(m: CoherentMap) -> Self {
        m.assignments.into_iter().collect()
    }
}

impl CoherentMap {
    pub fn new() -> Self {
        CoherentMap::default()
    }

    pub fn assignments(&self) -> &BTreeMap<FiniteString, u64> {
        &self.assignments
    }

    pub fn extend_coherent(&self, sigma: FiniteString, c: u64) -> Result<CoherentMap, CoherenceConflict> {
        let mut out = self.clone();
        out.insert_coherent(sigma, c)?;
        Ok(out)
    }

    /// In-place [`CoherentMap::extend_coherent`]; the map is unchanged on conflict.
    pub fn insert_coherent(&mut self, sigma: FiniteString, c: u64) -> Result<(), CoherenceConflict> {
        let conflict = |s: &FiniteString, v: u64| (v != c).then(|| (s.clone(), v));
        // Comparable strings are the prefixes of sigma and its extensions, which sort right after it.
        let hit = sigma
            .prefixes()
            .find_map(|p| self.assignments.get(&p).and_then(|&v| conflict(&p, v)))
            .or_else(|| {
                self.assignments
                    .range(sigma.clone()..)
                    .take_while(|(s, _)| sigma.is_prefix_of(s))
                    .find_map(|(s, &v)| conflict(s, v))
            });
        if let Some((existing, existing_value)) = hit {
            return Err(CoherenceConflict { existing, existing_value, new: sigma, new_value: c });
        }
        self.assignments.insert(sigma, c);
        Ok(())
    }

    /// The value of `Φ` at `σ`: that of any assigned prefix of `σ`.
    pub fn value_at(&self, sigma: &FiniteString) -> Option<u64> {
        sigma.prefixes().find_map(|p| self.assignments.get(&p).copied())
    }

    /// Membership in the downward closure of the strings where `Φ` is defined.
    pub fn in_canonical_tree(&self, sigma: &FiniteString) -> bool {
        self.assignments
            .keys()
            .any(|s| sigma.is_prefix_of(s) || s.is_prefix_of(sigma))
    }
}

/// Immediate successors of a node, as materialised or as an infinite description.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "successors", rename_all = "kebab-case"))]
pub enum Successors {
    /// Exactly the materialised children.
    Explicit,
    Described { set: DescribedSet },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeError {
    MissingRoot,
    NotPrefixClosed(FiniteString),
    UnknownNode(FiniteString),
    ChildOutsideDescriptor { node: FiniteString, child: u64 },
}

impl fmt::Display for TreeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeError::MissingRoot => write!(f, "tree has no root"),
            TreeError::NotPrefixClosed(s) => write!(f, "node {s} has no parent in the tree"),
            TreeError::UnknownNode(s) => write!(f, "descriptor for {s}, which is not a node"),
            TreeError::ChildOutsideDescriptor { node, child } => {
                write!(f, "child {child} of {node} is not in its successor set")
            }
        }
    }
}

impl core::error::Error for TreeError {}

#[cfg(feature = "serde")]
#[derive(serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct TreeWire {
    nodes: Vec<FiniteString>,
    #[serde(default)]
    descriptors: Vec<(FiniteString, Successors)>,
}

/// Prefix-closed finite set of strings with per-node successor descriptors.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "TreeWire", into = "TreeWire"))]
pub struct FiniteTree {
    nodes: BTreeSet<FiniteString>,
    descriptors: BTreeMap<FiniteString, Successors>,
}

#[cfg(feature = "serde")]
impl TryFrom<TreeWire> for FiniteTree {
    type Error = TreeError;
    fn try_from(w: TreeWire) -> Result<Self, TreeError> {
        FiniteTree::new(w.nodes, w.descriptors)
    }
}

#[cfg(feature = "serde")]
impl From<FiniteTree> for TreeWire {
    fn from(t: FiniteTree) -> Self {
        TreeWire {
            nodes: t.nodes.into_iter().collect(),
            descriptors: t.descriptors.into_iter().collect(),
        }
    }
}

impl FiniteTree {
    pub fn new<N, D>(nodes: N, descriptors: D) -> Result<FiniteTree, TreeError>
    where
        N: IntoIterator<Item = FiniteString>,
        D: IntoIterator<Item = (FiniteString, Successors)>,
    {
        let nodes: BTreeSet<FiniteString> = nodes.into_iter().collect();
        if !nodes.contains(&FiniteString::root()) {
            return Err(TreeError::MissingRoot);
        }
        for s in &nodes {
            if let Some(p) = s.parent() {
                if !nodes.contains(&p) {
                    return Err(TreeError::NotPrefixClosed(s.clone()));
                }
            }
        }
        let descriptors: BTreeMap<FiniteString, Successors> = descriptors
            .into_iter()
            .filter(|(_, d)| *d != Successors::Explicit)
            .collect();
        let t = FiniteTree { nodes, descriptors };
        for (s, d) in &t.descriptors {
            if !t.nodes.contains(s) {
                return Err(TreeError::UnknownNode(s.clone()));
            }
            if let Successors::Described { set } = d {
                if let Some(&child) = t.children(s).iter().find(|&&c| !set.contains(c)) {
                    return Err(TreeError::ChildOutsideDescriptor { node: s.clone(), child });
                }
            }
        }
        Ok(t)
    }

    /// The tree with every node carrying the same described successor set.
    pub fn with_uniform_successors(self, set: &DescribedSet) -> Result<FiniteTree, TreeError> {
        let descs: Vec<(FiniteString, Successors)> = self
            .nodes
            .iter()
            .map(|s| (s.clone(), Successors::Described { set: set.clone() }))
            .collect();
        FiniteTree::new(self.nodes, descs)
    }

    pub fn nodes(&self) -> &BTreeSet<FiniteString> {
        &self.nodes
    }

    pub fn contains(&self, s: &FiniteString) -> bool {
        self.nodes.contains(s)
    }

    pub fn children(&self, s: &FiniteString) -> Vec<u64> {
        // Children of s are exactly the nodes of length |s|+1 sharing the prefix s.
        let lo = s.child(0);
        self.nodes
            .range(lo..)
            .take_while(|t| s.is_prefix_of(t))
            .filter(|t| t.len() == s.len() + 1)
            .map(|t| t.last().unwrap())
            .collect()
    }

    pub fn is_leaf(&self, s: &FiniteString) -> bool {
        self.children(s).is_empty()
    }

    pub fn descriptor(&self, s: &FiniteString) -> Successors {
        self.descriptors.get(s).cloned().unwrap_or(Successors::Explicit)
    }

    /// The successor set of a node as a described set.
    pub fn successor_set(&self, s: &FiniteString) -> DescribedSet {
        match self.descriptor(s) {
            Successors::Explicit => DescribedSet::finite(self.children(s)),
            Successors::Described { set } => set,
        }
    }
}

/// Downward closure of the assigned strings, keeping only strings with entries below `horizon`.
pub fn canonical_tree(m: &CoherentMap, horizon: u64) -> FiniteTree {
    let mut nodes = BTreeSet::new();
    nodes.insert(FiniteString::root());
    for s in m.assignments().keys() {
        for p in s.prefixes() {
            if p.0.iter().all(|&x| x < horizon) {
                nodes.insert(p);
            } else {
                break;
            }
        }
    }
    FiniteTree::new(nodes, Vec::new()).expect("prefixes are closed")
}

/// `⊥` or a natural.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(from = "Option<u64>", into = "Option<u64>"))]
pub enum Label {
    Bottom,
    Value(u64),
}

impl From<Option<u64>> for Label {
    fn from(o: Option<u64>) -> Self {
        o.map_or(Label::Bottom, Label::Value)
    }
}

impl From<Label> for Option<u64> {
    fn from(l: Label) -> Self {
        l.value()
    }
}

impl Label {
    pub fn value(self) -> Option<u64> {
        match self {
            Label::Bottom => None,
            Label::Value(c) => Some(c),
        }
    }

    pub fn is_bottom(self) -> bool {
        self == Label::Bottom
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Bottom => write!(f, "⊥"),
            Label::Value(c) => write!(f, "{c}"),
        }
    }
}

/// Judgments about successor classes that no finite computation decides.
pub trait PositivityOracle {
    /// Is `{n : ν(σ⌢n) = c}` positive? `class` is its materialised part.
    fn class_positive(&self, node: &FiniteString, label: u64, class: &BTreeSet<u64>) -> Verdict;
    /// Is `{n : ν(σ⌢n) = ⊥}` null?
    fn bottom_null(&self, node: &FiniteString, class: &BTreeSet<u64>) -> Verdict;
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct Stipulation {
    pub node: FiniteString,
    /// The label class queried; `None` asks whether the `⊥`-class is null.
    pub label: Option<u64>,
    pub holds: bool,
    pub tag: String,
}

/// Oracle backed by a table of tagged stipulations; anything not listed is `Unknown`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StipulatedOracle {
    table: BTreeMap<(FiniteString, Option<u64>), (bool, String)>,
}

impl StipulatedOracle {
    pub fn new<I: IntoIterator<Item = Stipulation>>(entries: I) -> Self {
        let mut table = BTreeMap::new();
        for s in entries {
            table.insert((s.node, s.label), (s.holds, s.tag));
        }
        StipulatedOracle { table }
    }

    fn lookup(&self, node: &FiniteString, label: Option<u64>) -> Verdict {
        match self.table.get(&(node.clone(), label)) {
            None => Verdict::unknown(Evidence::Undecided {
                horizon: 0,
                partial_weight: None,
            }),
            Some((holds, tag)) => {
                let e = Evidence::Assumption { tag: tag.clone() };
                if *holds {
                    Verdict::yes(e)
                } else {
                    Verdict::no(e)
                }
            }
        }
    }
}

impl PositivityOracle for StipulatedOracle {
    fn class_positive(&self, node: &FiniteString, label: u64, _class: &BTreeSet<u64>) -> Verdict {
        self.lookup(node, Some(label))
    }

    fn bottom_null(&self, node: &FiniteString, _class: &BTreeSet<u64>) -> Verdict {
        self.lookup(node, None)
    }
}

/// Which clause of the labelling definition fixed a node's label.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Rule {
    Assigned,
    OutsideCanonical,
    LeastPositive,
    NoPositiveClass,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelledTree {
    pub tree: FiniteTree,
    pub map: CoherentMap,
    pub labels: BTreeMap<FiniteString, Label>,
    pub rules: BTreeMap<FiniteString, Rule>,
}

impl LabelledTree {
    pub fn label(&self, s: &FiniteString) -> Option<Label> {
        self.labels.get(s).copied()
    }

    fn classes(&self, s: &FiniteString) -> BTreeMap<Label, BTreeSet<u64>> {
        let mut out: BTreeMap<Label, BTreeSet<u64>> = BTreeMap::new();
        for n in self.tree.children(s) {
            out.entry(self.labels[&s.child(n)]).or_default().insert(n);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Blocked {
    pub node: FiniteString,
    pub label: Option<u64>,
}

impl fmt::Display for Blocked {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.label {
            Some(c) => write!(f, "oracle cannot decide whether label class {c} at {} is positive", self.node),
            None => write!(f, "oracle cannot decide whether the ⊥-class at {} is null", self.node),
        }
    }
}

impl core::error::Error for Blocked {}

/// Labels every node bottom-up by the four rules; aborts on an undecided oracle query.
pub fn compute_labels(
    t: &FiniteTree,
    m: &CoherentMap,
    oracle: &dyn PositivityOracle,
) -> Result<LabelledTree, Blocked> {
    let mut order: Vec<&FiniteString> = t.nodes().iter().collect();
    order.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
    let mut lt = LabelledTree {
        tree: t.clone(),
        map: m.clone(),
        labels: BTreeMap::new(),
        rules: BTreeMap::new(),
    };
    for s in order {
        let (label, rule) = if let Some(c) = m.value_at(s) {
            (Label::Value(c), Rule::Assigned)
        } else if !m.in_canonical_tree(s) {
            (Label::Bottom, Rule::OutsideCanonical)
        } else {
            let mut chosen = None;
            for (label, class) in lt.classes(s) {
                let Label::Value(c) = label else { continue };
                let v = oracle.class_positive(s, c, &class);
                if v.is_unknown() {
                    return Err(Blocked { node: s.clone(), label: Some(c) });
                }
                if v.is_in() {
                    chosen = Some(c);
                    break;
                }
            }
            match chosen {
                Some(c) => (Label::Value(c), Rule::LeastPositive),
                None => (Label::Bottom, Rule::NoPositiveClass),
            }
        };
        lt.labels.insert(s.clone(), label);
        lt.rules.insert(s.clone(), rule);
    }
    Ok(lt)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CriticalReport {
    pub critical: Vec<FiniteString>,
    pub undetermined: Vec<FiniteString>,
}

/// `⊥`-labelled nodes whose `⊥`-successor class is null.
pub fn find_critical(lt: &LabelledTree, oracle: &dyn PositivityOracle) -> CriticalReport {
    let mut report = CriticalReport::default();
    for s in lt.tree.nodes() {
        if lt.labels[s] != Label::Bottom || !lt.map.in_canonical_tree(s) {
            // Outside the canonical tree every successor is ⊥, and the whole of ω is never null.
            continue;
        }
        let bottoms = lt.classes(s).remove(&Label::Bottom).unwrap_or_default();
        let v = if !lt.tree.is_leaf(s) && bottoms.is_empty() {
            Verdict::yes(Evidence::FiniteSet)
        } else {
            oracle.bottom_null(s, &bottoms)
        };
        if v.is_in() {
            report.critical.push(s.clone());
        } else if v.is_unknown() {
            report.undetermined.push(s.clone());
        }
    }
    report
}

/// For each node, whether its successor set lies in the dual filter of `ideal`.
pub fn check_branching(t: &FiniteTree, ideal: &IdealDescriptor, horizon: u64) -> BTreeMap<FiniteString, Verdict> {
    t.nodes()
        .iter()
        .map(|s| (s.clone(), in_dual_filter(ideal, &t.successor_set(s), horizon)))
        .collect()
}

/// Lexicographically first root-to-leaf path whose leaf carries the assigned value `c`.
pub fn path_value_search(lt: &LabelledTree, c: u64) -> Option<Vec<FiniteString>> {
    path_value_search_from(lt, &FiniteString::root(), c)
}

pub fn path_value_search_from(lt: &LabelledTree, from: &FiniteString, c: u64) -> Option<Vec<FiniteString>> {
    fn go(lt: &LabelledTree, s: &FiniteString, c: u64, path: &mut Vec<FiniteString>) -> bool {
        path.push(s.clone());
        let kids = lt.tree.children(s);
        if kids.is_empty() {
            if lt.map.value_at(s) == Some(c) {
                return true;
            }
        } else {
            for n in kids {
                if go(lt, &s.child(n), c, path) {
                    return true;
                }
            }
        }
        path.pop();
        false
    }
    let mut path = Vec::new();
    go(lt, from, c, &mut path).then_some(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideals::Answer;
    use alloc::string::ToString;
    use alloc::vec;

    fn fs(v: &[u64]) -> FiniteString {
        FiniteString(v.to_vec())
    }

    fn tag(node: FiniteString, label: Option<u64>, holds: bool) -> Stipulation {
        Stipulation { node, label, holds, tag: "test".to_string() }
    }

    #[test]
    fn coherence() {
        let m = CoherentMap::new().extend_coherent(fs(&[3]), 5).unwrap();
        let m2 = m.extend_coherent(fs(&[3, 1]), 5).unwrap();
        assert_eq!(m2.assignments().len(), 2);
        let e = m.extend_coherent(fs(&[3, 1]), 7).unwrap_err();
        assert_eq!((e.existing, e.new), (fs(&[3]), fs(&[3, 1])));
    }

    #[test]
    fn canonical_trees() {
        let m = CoherentMap::new().extend_coherent(fs(&[3, 1]), 5).unwrap();
        let t = canonical_tree(&m, 10);
        assert_eq!(t.nodes().iter().cloned().collect::<Vec<_>>(), vec![fs(&[]), fs(&[3]), fs(&[3, 1])]);
        assert_eq!(canonical_tree(&CoherentMap::new(), 10).nodes().len(), 1);
        let m = m.extend_coherent(fs(&[3, 2]), 6).unwrap();
        assert_eq!(canonical_tree(&m, 10).nodes().len(), 4);
        assert_eq!(canonical_tree(&m, 3).nodes().len(), 1);
    }

    fn evens_tree() -> (FiniteTree, CoherentMap) {
        let nodes: Vec<FiniteString> = core::iter::once(fs(&[])).chain((0..10).map(|n| fs(&[n]))).collect();
        let t = FiniteTree::new(nodes, vec![]).unwrap();
        let mut m = CoherentMap::new();
        for n in (0..10).step_by(2) {
            m = m.extend_coherent(fs(&[n]), 5).unwrap();
        }
        (t, m)
    }

    #[test]
    fn labelling_rules() {
        let (t, m) = evens_tree();
        let oracle = StipulatedOracle::new([tag(fs(&[]), Some(5), true)]);
        let lt = compute_labels(&t, &m, &oracle).unwrap();
        assert_eq!(lt.label(&fs(&[])), Some(Label::Value(5)));
        assert_eq!(lt.label(&fs(&[1])), Some(Label::Bottom));
        assert_eq!(lt.rules[&fs(&[1])], Rule::OutsideCanonical);
        assert_eq!(path_value_search(&lt, 5), Some(vec![fs(&[]), fs(&[0])]));
        assert_eq!(path_value_search(&lt, 6), None);
        let blocked = compute_labels(&t, &m, &StipulatedOracle::default()).unwrap_err();
        assert_eq!(blocked, Blocked { node: fs(&[]), label: Some(5) });
    }

    #[test]
    fn least_positive_label_wins() {
        let (t, mut m) = evens_tree();
        for n in (1..10).step_by(2) {
            m = m.extend_coherent(fs(&[n]), 7).unwrap();
        }
        let oracle = StipulatedOracle::new([tag(fs(&[]), Some(5), true), tag(fs(&[]), Some(7), true)]);
        assert_eq!(compute_labels(&t, &m, &oracle).unwrap().label(&fs(&[])), Some(Label::Value(5)));
        // With 5 declared null, 7 is next; with both null the root is ⊥ and critical.
        let oracle = StipulatedOracle::new([tag(fs(&[]), Some(5), false), tag(fs(&[]), Some(7), true)]);
        assert_eq!(compute_labels(&t, &m, &oracle).unwrap().label(&fs(&[])), Some(Label::Value(7)));
        let oracle = StipulatedOracle::new([tag(fs(&[]), Some(5), false), tag(fs(&[]), Some(7), false)]);
        let lt = compute_labels(&t, &m, &oracle).unwrap();
        assert_eq!(lt.label(&fs(&[])), Some(Label::Bottom));
        assert_eq!(find_critical(&lt, &oracle).critical, vec![fs(&[])]);
    }

    #[test]
    fn criticality_follows_nullity() {
        let (t, m) = evens_tree();
        let oracle = StipulatedOracle::new([tag(fs(&[]), Some(5), false), tag(fs(&[]), None, false)]);
        let lt = compute_labels(&t, &m, &oracle).unwrap();
        assert!(find_critical(&lt, &oracle).critical.is_empty());
        let undecided = StipulatedOracle::new([tag(fs(&[]), Some(5), false)]);
        assert_eq!(find_critical(&lt, &undecided).undetermined, vec![fs(&[])]);
    }

    #[test]
    fn branching() {
        let (t, _) = evens_tree();
        let t = t.with_uniform_successors(&DescribedSet::cofinite([10, 11])).unwrap();
        let v = check_branching(&t, &IdealDescriptor::sum_harmonic(), 100);
        assert!(v.values().all(|v| v.answer == Answer::In));
        let (t, _) = evens_tree();
        let v = check_branching(&t, &IdealDescriptor::sum_harmonic(), 100);
        assert_eq!(v[&fs(&[])].answer, Answer::Out);
        assert!(matches!(
            FiniteTree::new([fs(&[]), fs(&[4])], [(fs(&[]), Successors::Described { set: DescribedSet::progression(1, 2) })]),
            Err(TreeError::ChildOutsideDescriptor { child: 4, .. })
        ));
    }
}
