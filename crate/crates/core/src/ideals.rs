//! Ideals on the naturals and a sound, deliberately partial membership procedure.
//!
//! Membership answers `In` or `Out` only through a fixed list of arguments, each recorded as
//! evidence. Everything else is `Unknown`, never a guess.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::construction::{build_partition, BlockWeight, HorizonExceeded, PartitionData, PartitionError};
use crate::omega::{code_unordered, DescribedSet, Periodic, SizeClass};
use crate::rational::Rational;

/// Partial sums are only reported for horizons up to this size.
const PARTIAL_SUM_HORIZON: u64 = 1 << 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeightFunction {
    /// `1/(n+1)`.
    Harmonic,
    /// `w_S` over a partition.
    Block(BlockWeight),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum DivergenceKind {
    /// The harmonic series restricted to any residue class diverges.
    Harmonic,
    /// Blocks `I_n` with `n` outside `S` each carry weight at least `|I_{<n}|`.
    IntervalBlock,
}

impl WeightFunction {
    pub fn at(&self, m: u64) -> Result<Rational, HorizonExceeded> {
        match self {
            WeightFunction::Harmonic => Ok(Rational::harmonic(m)),
            WeightFunction::Block(w) => w.at_u64(m),
        }
    }

    /// `Some(true)` if the total weight of the naturals is infinite, `Some(false)` if finite.
    pub fn diverges(&self) -> Option<bool> {
        match self {
            WeightFunction::Harmonic => Some(true),
            // Blocks outside S contribute >= |I_{<n}|, blocks inside S at most 2^{-n-1}.
            WeightFunction::Block(w) => match w.set.size_class()? {
                SizeClass::Cofinite => Some(false),
                SizeClass::Finite | SizeClass::Bi => Some(true),
            },
        }
    }

    pub fn divergence_kind(&self) -> Option<DivergenceKind> {
        match (self, self.diverges()) {
            (WeightFunction::Harmonic, _) => Some(DivergenceKind::Harmonic),
            (WeightFunction::Block(_), Some(true)) => Some(DivergenceKind::IntervalBlock),
            _ => None,
        }
    }
}

/// Exact weight of a finite set.
pub fn weight_of<I: IntoIterator<Item = u64>>(w: &WeightFunction, a: I) -> Result<Rational, HorizonExceeded> {
    let mut total = Rational::zero();
    for m in a {
        total = total + w.at(m)?;
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IdealDescriptor {
    Fin,
    /// `{A : sum_{n in A} f(n) < oo}`.
    Sum(WeightFunction),
    /// Asymptotic density zero.
    Den0,
    /// Sets containing no `Δ(B)` for infinite `B`.
    Diff,
    /// Sets containing no `FS(B)` for infinite `B`.
    Hindman,
    /// Sets of pair codes containing no `[B]^2` for infinite `B`.
    Ramsey,
    PowerSet,
}

impl IdealDescriptor {
    pub fn sum_harmonic() -> Self {
        IdealDescriptor::Sum(WeightFunction::Harmonic)
    }

    pub fn sum_block(set: DescribedSet, partition: Arc<PartitionData>) -> Self {
        IdealDescriptor::Sum(WeightFunction::Block(BlockWeight::new(set, partition)))
    }
}

/// Serializable name of an ideal; block sums carry the partition depth and are rebuilt greedily.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "ideal", rename_all = "kebab-case", deny_unknown_fields))]
pub enum IdealSpec {
    Fin,
    SumHarmonic,
    SumBlock { set: DescribedSet, depth: usize },
    Den0,
    Diff,
    Hindman,
    Ramsey,
    PowerSet,
}

impl IdealSpec {
    pub fn instantiate(&self) -> Result<IdealDescriptor, PartitionError> {
        Ok(match self {
            IdealSpec::Fin => IdealDescriptor::Fin,
            IdealSpec::SumHarmonic => IdealDescriptor::sum_harmonic(),
            IdealSpec::SumBlock { set, depth } => {
                IdealDescriptor::sum_block(set.clone(), Arc::new(build_partition(*depth)?))
            }
            IdealSpec::Den0 => IdealDescriptor::Den0,
            IdealSpec::Diff => IdealDescriptor::Diff,
            IdealSpec::Hindman => IdealDescriptor::Hindman,
            IdealSpec::Ramsey => IdealDescriptor::Ramsey,
            IdealSpec::PowerSet => IdealDescriptor::PowerSet,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Answer {
    In,
    Out,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "evidence", rename_all = "kebab-case"))]
pub enum Evidence {
    /// Every ideal here contains all finite sets.
    FiniteSet,
    PowerSet,
    /// An infinite set is not in the ideal of finite sets.
    InfiniteSet,
    /// The whole weight is finite, so the summable ideal is everything.
    ConvergentWeight,
    /// The set contains the residue class `residue mod period` from some point on, where the weight diverges.
    Divergence { kind: DivergenceKind, residue: u64, period: u64 },
    /// `residues` of the `period` classes lie eventually inside the set.
    PositiveDensity { residues: u64, period: u64 },
    /// Sufficiently large multiples of `period` are members, so they contain `Δ(B)` and `FS(B)` for `B ⊆ period·N`.
    TailMultiples { period: u64 },
    /// Large multiples of `period` are missing; any infinite `B` has `period` elements in one residue class.
    Pigeonhole { period: u64 },
    /// The pair codes of an infinite vertex set.
    InfiniteClique,
    /// A finite union of members.
    UnionOfMembers,
    /// A subset of the member `parts[index]`.
    SubsetOfMember { index: usize },
    /// A superset of the non-member `parts[index]`.
    SupersetOfNonMember { index: usize },
    /// A stipulation carried by a scenario rather than a derivation.
    Assumption { tag: alloc::string::String },
    /// No whitelisted argument applies. Reports the partial weight below `horizon` where defined.
    Undecided { horizon: u64, partial_weight: Option<Rational> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Verdict {
    pub answer: Answer,
    pub evidence: Evidence,
}

impl Verdict {
    pub fn yes(evidence: Evidence) -> Self {
        Verdict { answer: Answer::In, evidence }
    }

    pub fn no(evidence: Evidence) -> Self {
        Verdict { answer: Answer::Out, evidence }
    }

    pub fn unknown(evidence: Evidence) -> Self {
        Verdict { answer: Answer::Unknown, evidence }
    }

    pub fn is_in(&self) -> bool {
        self.answer == Answer::In
    }

    pub fn is_out(&self) -> bool {
        self.answer == Answer::Out
    }

    pub fn is_unknown(&self) -> bool {
        self.answer == Answer::Unknown
    }

    /// Swap `In` and `Out`, keeping the evidence.
    pub fn negate(self) -> Self {
        let answer = match self.answer {
            Answer::In => Answer::Out,
            Answer::Out => Answer::In,
            Answer::Unknown => Answer::Unknown,
        };
        Verdict { answer, evidence: self.evidence }
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Answer::In => "in",
            Answer::Out => "out",
            Answer::Unknown => "unknown",
        })
    }
}

fn periodic_verdict(ideal: &IdealDescriptor, p: &Periodic) -> Option<Verdict> {
    let class = p.size_class();
    if class == SizeClass::Finite {
        return Some(Verdict::yes(Evidence::FiniteSet));
    }
    let period = p.period();
    Some(match ideal {
        IdealDescriptor::PowerSet => Verdict::yes(Evidence::PowerSet),
        IdealDescriptor::Fin => Verdict::no(Evidence::InfiniteSet),
        IdealDescriptor::Sum(w) => match w.diverges()? {
            false => Verdict::yes(Evidence::ConvergentWeight),
            true => {
                let (residue, period) = p.some_tail_class()?;
                Verdict::no(Evidence::Divergence {
                    kind: w.divergence_kind()?,
                    residue,
                    period,
                })
            }
        },
        IdealDescriptor::Den0 => Verdict::no(Evidence::PositiveDensity {
            residues: p.tail_residues() as u64,
            period,
        }),
        IdealDescriptor::Diff | IdealDescriptor::Hindman => {
            if p.contains_tail_multiples() {
                Verdict::no(Evidence::TailMultiples { period })
            } else {
                Verdict::yes(Evidence::Pigeonhole { period })
            }
        }
        IdealDescriptor::Ramsey => {
            if class == SizeClass::Cofinite {
                Verdict::no(Evidence::InfiniteClique)
            } else {
                return None;
            }
        }
    })
}

fn class_verdict(ideal: &IdealDescriptor, class: SizeClass) -> Option<Verdict> {
    match (class, ideal) {
        (_, IdealDescriptor::PowerSet) => Some(Verdict::yes(Evidence::PowerSet)),
        (SizeClass::Finite, _) => Some(Verdict::yes(Evidence::FiniteSet)),
        (_, IdealDescriptor::Fin) => Some(Verdict::no(Evidence::InfiniteSet)),
        (_, IdealDescriptor::Sum(w)) if w.diverges() == Some(false) => {
            Some(Verdict::yes(Evidence::ConvergentWeight))
        }
        (SizeClass::Cofinite, IdealDescriptor::Sum(w)) if w.diverges() == Some(true) => {
            Some(Verdict::no(Evidence::Divergence {
                kind: w.divergence_kind()?,
                residue: 0,
                period: 1,
            }))
        }
        (SizeClass::Cofinite, IdealDescriptor::Den0) => Some(Verdict::no(Evidence::PositiveDensity {
            residues: 1,
            period: 1,
        })),
        (SizeClass::Cofinite, IdealDescriptor::Diff | IdealDescriptor::Hindman) => {
            Some(Verdict::no(Evidence::TailMultiples { period: 1 }))
        }
        (SizeClass::Cofinite, IdealDescriptor::Ramsey) => Some(Verdict::no(Evidence::InfiniteClique)),
        _ => None,
    }
}

fn partial_weight(ideal: &IdealDescriptor, a: &DescribedSet, horizon: u64) -> Option<Rational> {
    match ideal {
        IdealDescriptor::Sum(w) if horizon <= PARTIAL_SUM_HORIZON => {
            weight_of(w, a.enumerate_upto(horizon)).ok()
        }
        _ => None,
    }
}

/// Decide `a ∈ ideal` by the whitelist; `horizon` only bounds the partial data reported with `Unknown`.
pub fn membership(ideal: &IdealDescriptor, a: &DescribedSet, horizon: u64) -> Verdict {
    if let IdealDescriptor::PowerSet = ideal {
        return Verdict::yes(Evidence::PowerSet);
    }
    if let Some(p) = a.periodic() {
        if let Some(v) = periodic_verdict(ideal, &p) {
            return v;
        }
    }
    if let Some(v) = a.size_class().and_then(|c| class_verdict(ideal, c)) {
        return v;
    }
    match a {
        DescribedSet::PairCodes { vertices } if *ideal == IdealDescriptor::Ramsey => {
            match vertices.size_class() {
                Some(SizeClass::Finite) => return Verdict::yes(Evidence::FiniteSet),
                Some(_) => return Verdict::no(Evidence::InfiniteClique),
                None => {}
            }
        }
        DescribedSet::Union { parts } => {
            let verdicts: Vec<Verdict> = parts.iter().map(|p| membership(ideal, p, horizon)).collect();
            if let Some(index) = verdicts.iter().position(|v| v.is_out()) {
                return Verdict::no(Evidence::SupersetOfNonMember { index });
            }
            if verdicts.iter().all(|v| v.is_in()) {
                return Verdict::yes(Evidence::UnionOfMembers);
            }
        }
        DescribedSet::Intersection { parts } => {
            if let Some(index) = parts.iter().position(|p| membership(ideal, p, horizon).is_in()) {
                return Verdict::yes(Evidence::SubsetOfMember { index });
            }
        }
        _ => {}
    }
    Verdict::unknown(Evidence::Undecided {
        horizon,
        partial_weight: partial_weight(ideal, a, horizon),
    })
}

/// `a` is positive when it is not in the ideal.
pub fn is_positive(ideal: &IdealDescriptor, a: &DescribedSet, horizon: u64) -> Verdict {
    membership(ideal, a, horizon).negate()
}

/// `a` is in the dual filter when its complement is in the ideal.
pub fn in_dual_filter(ideal: &IdealDescriptor, a: &DescribedSet, horizon: u64) -> Verdict {
    membership(ideal, &a.clone().complement(), horizon)
}

/// Lexicographically least `B` of the given size with `FS(B) ⊆ a` and every sum below `horizon`.
pub fn hindman_witness_search(a: &DescribedSet, size: usize, horizon: u64) -> Option<Vec<u64>> {
    let members: BTreeSet<u64> = a.enumerate_upto(horizon).into_iter().collect();
    let cands: Vec<u64> = members.iter().copied().collect();
    fn go(
        cands: &[u64],
        members: &BTreeSet<u64>,
        from: usize,
        size: usize,
        chosen: &mut Vec<u64>,
        sums: &mut Vec<u64>,
    ) -> bool {
        if chosen.len() == size {
            return true;
        }
        for k in from..cands.len() {
            let x = cands[k];
            // Every new sum x + s must be a member; members are bounded by the horizon.
            let new: Option<Vec<u64>> = sums
                .iter()
                .map(|s| s.checked_add(x).filter(|t| members.contains(t)))
                .collect();
            let Some(new) = new else { continue };
            let keep = sums.len();
            sums.push(x);
            sums.extend(new);
            chosen.push(x);
            if go(cands, members, k + 1, size, chosen, sums) {
                return true;
            }
            chosen.pop();
            sums.truncate(keep);
        }
        false
    }
    let mut chosen = Vec::new();
    let mut sums = Vec::new();
    go(&cands, &members, 0, size, &mut chosen, &mut sums).then_some(chosen)
}

/// Lexicographically least vertex set `T ⊆ [0, horizon)` of the given size with every pair code in `a`.
pub fn ramsey_witness_search(a: &DescribedSet, size: usize, horizon: u64) -> Option<Vec<u64>> {
    fn go(a: &DescribedSet, horizon: u64, from: u64, size: usize, chosen: &mut Vec<u64>) -> bool {
        if chosen.len() == size {
            return true;
        }
        for v in from..horizon {
            if chosen.iter().all(|&u| a.contains(code_unordered(u, v).unwrap())) {
                chosen.push(v);
                if go(a, horizon, v + 1, size, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    let mut chosen = Vec::new();
    go(a, horizon, 0, size, &mut chosen).then_some(chosen)
}

/// How many ways each difference arises in a finite set.
pub fn diff_multiplicity<I: IntoIterator<Item = u64>>(a: I) -> BTreeMap<u64, usize> {
    let v: BTreeSet<u64> = a.into_iter().collect();
    let v: Vec<u64> = v.into_iter().collect();
    let mut out = BTreeMap::new();
    for (k, &x) in v.iter().enumerate() {
        for &y in &v[k + 1..] {
            *out.entry(y - x).or_insert(0) += 1;
        }
    }
    out
}

/// `|a ∩ [0, n]| / n` for `n >= 1`.
pub fn density_at(a: &DescribedSet, n: u64) -> Option<Rational> {
    if n == 0 {
        return None;
    }
    let count = a.enumerate_upto(n + 1).len() as u64;
    Rational::new(count, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn whitelist_examples() {
        let v = membership(&IdealDescriptor::sum_harmonic(), &DescribedSet::finite([1, 5, 9]), 100);
        assert_eq!(v, Verdict::yes(Evidence::FiniteSet));
        let v = membership(&IdealDescriptor::sum_harmonic(), &DescribedSet::progression(0, 2), 100);
        assert_eq!(v.answer, Answer::Out);
        assert!(matches!(v.evidence, Evidence::Divergence { kind: DivergenceKind::Harmonic, .. }));
        let v = membership(&IdealDescriptor::Diff, &DescribedSet::non_multiples(3), 100);
        assert_eq!(v, Verdict::yes(Evidence::Pigeonhole { period: 3 }));
        let v = membership(&IdealDescriptor::Fin, &DescribedSet::cofinite([1]), 100);
        assert_eq!(v.answer, Answer::Out);
        assert!(is_positive(&IdealDescriptor::sum_harmonic(), &DescribedSet::progression(0, 2), 10).is_in());
    }

    #[test]
    fn closure_rules_and_unknowns() {
        let evens_codes = DescribedSet::pair_codes(DescribedSet::progression(0, 2));
        assert_eq!(
            membership(&IdealDescriptor::Ramsey, &evens_codes, 10).evidence,
            Evidence::InfiniteClique
        );
        let mixed = DescribedSet::union(vec![
            DescribedSet::pair_codes(DescribedSet::progression(0, 2)),
            DescribedSet::pair_codes(DescribedSet::progression(1, 2)),
        ])
        .complement();
        let v = membership(&IdealDescriptor::Ramsey, &mixed, 10);
        assert!(v.is_unknown());
        let v = membership(&IdealDescriptor::Den0, &mixed, 10);
        assert!(v.is_unknown());
    }

    #[test]
    fn block_sums() {
        let p = Arc::new(build_partition(4).unwrap());
        let co_infinite = IdealDescriptor::sum_block(DescribedSet::progression(0, 2), p.clone());
        assert!(membership(&co_infinite, &DescribedSet::progression(1, 3), 10).is_out());
        let everything = IdealDescriptor::sum_block(DescribedSet::cofinite([0]), p);
        assert_eq!(
            membership(&everything, &DescribedSet::all(), 10),
            Verdict::yes(Evidence::ConvergentWeight)
        );
    }

    #[test]
    fn searches() {
        // {1,2,3} has FS = {1,...,6} and precedes {1,2,4}.
        assert_eq!(hindman_witness_search(&DescribedSet::interval(1, 8), 3, 8), Some(vec![1, 2, 3]));
        assert_eq!(hindman_witness_search(&DescribedSet::interval(1, 8), 4, 8), None);
        assert_eq!(hindman_witness_search(&DescribedSet::progression(1, 2), 2, 1000), None);
        assert_eq!(hindman_witness_search(&DescribedSet::empty(), 1, 1000), None);
        let evens = DescribedSet::pair_codes(DescribedSet::finite((0..10).step_by(2)));
        assert_eq!(ramsey_witness_search(&evens, 3, 10), Some(vec![0, 2, 4]));
        assert_eq!(ramsey_witness_search(&DescribedSet::all(), 4, 4), Some(vec![0, 1, 2, 3]));
        let mixed = DescribedSet::union(vec![
            DescribedSet::pair_codes(DescribedSet::progression(0, 2)),
            DescribedSet::pair_codes(DescribedSet::progression(1, 2)),
        ])
        .complement();
        assert_eq!(ramsey_witness_search(&mixed, 3, 12), None);
    }

    #[test]
    fn counting() {
        let m = diff_multiplicity([1, 2, 3, 5]);
        assert_eq!(m[&1], 2);
        assert_eq!(m[&2], 2);
        assert_eq!(m[&4], 1);
        assert_eq!(density_at(&DescribedSet::all(), 4), Some(q("5/4")));
        assert_eq!(
            weight_of(&WeightFunction::Harmonic, [1, 2, 3]).unwrap(),
            q("13/12")
        );
    }
}
