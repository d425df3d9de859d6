//! Declared label behaviour of critical nodes: `x ↦ ν(τ_i⌢x)` as a rule plus finite overrides.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::construction::PartitionData;
use crate::omega::{decode_unordered, pair_diag};
use crate::ramsey::support_bounds;
use crate::trees::Label;

/// How the successors of one critical node are labelled, away from the overrides.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "rule", rename_all = "kebab-case", deny_unknown_fields))]
pub enum LabelRule {
    Bottom,
    Constant { value: u64 },
    Identity,
    Shifted { offset: u64 },
    /// `x ∈ I_n ↦ min I_n − 1`, so every label lies in the previous interval; `⊥` on `I_0`.
    BlockFloor,
    /// `x ↦ ⌊log₄(x+1)⌋`: each label owns the block `[4^j − 1, 4^{j+1} − 1)`.
    QuaternaryBlocks,
    /// `x ↦ base^{⌊log₄(x+1)⌋}`: the same blocks with fast-growing labels; `⊥` on overflow.
    QuaternaryPowers { base: u64 },
    /// `x ↦ min α(x)`, `⊥` at 0.
    MinSupport,
    /// `x ↦ max α(x)`, `⊥` at 0.
    MaxSupport,
    /// `x ↦ min α(x) + max α(x)`, injective in the pair of extremes; `⊥` at 0.
    MinPlusMaxSupport,
    /// On pair codes: `{a,b} ↦ min`.
    PairMin,
    /// On pair codes: `{a,b} ↦ max`.
    PairMax,
    /// `x ↦ values[x mod len]`; a finite set of labels.
    Periodic { values: Vec<Option<u64>> },
}

/// A rule with finitely many pointwise exceptions.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LabelModel {
    #[cfg_attr(feature = "serde", serde(flatten))]
    pub rule: LabelRule,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "BTreeMap::is_empty"))]
    pub overrides: BTreeMap<u64, Label>,
}

impl From<LabelRule> for LabelModel {
    fn from(rule: LabelRule) -> Self {
        LabelModel { rule, overrides: BTreeMap::new() }
    }
}

/// Labels of a run of consecutive successors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Segment {
    Bottom,
    Constant(u64),
    /// `x ↦ x + offset`.
    Affine(u64),
}

impl Segment {
    pub fn label(self, x: u64) -> Label {
        match self {
            Segment::Bottom => Label::Bottom,
            Segment::Constant(c) => Label::Value(c),
            Segment::Affine(o) => x.checked_add(o).map_or(Label::Bottom, Label::Value),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelError {
    NeedsPartition,
    BeyondPartition(u64),
    NoSegments,
    EmptyPeriod,
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::NeedsPartition => write!(f, "block-floor labels need an interval partition"),
            ModelError::BeyondPartition(x) => write!(f, "successor {x} lies beyond the partition"),
            ModelError::NoSegments => write!(f, "this rule is only evaluated pointwise"),
            ModelError::EmptyPeriod => write!(f, "periodic rule has no values"),
        }
    }
}

impl core::error::Error for ModelError {}

const SEGMENT_LIMIT: u64 = 1 << 16;

impl LabelModel {
    pub fn new(rule: LabelRule) -> Self {
        rule.into()
    }

    pub fn with_override(mut self, x: u64, label: Label) -> Self {
        self.overrides.insert(x, label);
        self
    }

    fn rule_label(&self, x: u64, p: Option<&PartitionData>) -> Result<Label, ModelError> {
        let some = |v: u64| Ok(Label::Value(v));
        match &self.rule {
            LabelRule::Bottom => Ok(Label::Bottom),
            LabelRule::Constant { value } => some(*value),
            LabelRule::Identity => some(x),
            LabelRule::Shifted { offset } => Ok(Segment::Affine(*offset).label(x)),
            LabelRule::BlockFloor => {
                let p = p.ok_or(ModelError::NeedsPartition)?;
                match p.block_of_u64(x) {
                    None => Err(ModelError::BeyondPartition(x)),
                    Some(0) => Ok(Label::Bottom),
                    Some(n) => some(p.block_u64(n).ok_or(ModelError::BeyondPartition(x))?.0 - 1),
                }
            }
            LabelRule::QuaternaryBlocks => some(quaternary_index(x)),
            LabelRule::QuaternaryPowers { base } => Ok(power_label(*base, quaternary_index(x))),
            LabelRule::MinSupport if x > 0 => some(support_bounds(x).0),
            LabelRule::MaxSupport if x > 0 => some(support_bounds(x).1),
            LabelRule::MinPlusMaxSupport if x > 0 => {
                let (a, b) = support_bounds(x);
                Ok(a.checked_add(b).map_or(Label::Bottom, Label::Value))
            }
            LabelRule::MinSupport | LabelRule::MaxSupport | LabelRule::MinPlusMaxSupport => Ok(Label::Bottom),
            LabelRule::PairMin => some(decode_unordered(x).0),
            LabelRule::PairMax => some(decode_unordered(x).1),
            LabelRule::Periodic { values } => {
                if values.is_empty() {
                    return Err(ModelError::EmptyPeriod);
                }
                Ok(values[(x % values.len() as u64) as usize].into())
            }
        }
    }

    pub fn label(&self, x: u64, p: Option<&PartitionData>) -> Result<Label, ModelError> {
        match self.overrides.get(&x) {
            Some(l) => Ok(*l),
            None => self.rule_label(x, p),
        }
    }

    /// The labels on `[lo, hi)` as maximal runs, overrides split out as single points.
    pub fn segments(&self, lo: u64, hi: u64, p: Option<&PartitionData>) -> Result<Vec<(u64, u64, Segment)>, ModelError> {
        let base = self.rule_segments(lo, hi, p)?;
        let mut out = Vec::new();
        for (a, b, s) in base {
            let mut cur = a;
            for (&x, &l) in self.overrides.range(a..b) {
                if cur < x {
                    out.push((cur, x, s));
                }
                let seg = match l {
                    Label::Bottom => Segment::Bottom,
                    Label::Value(c) => Segment::Constant(c),
                };
                out.push((x, x + 1, seg));
                cur = x + 1;
            }
            if cur < b {
                out.push((cur, b, s));
            }
        }
        Ok(out)
    }

    fn rule_segments(&self, lo: u64, hi: u64, p: Option<&PartitionData>) -> Result<Vec<(u64, u64, Segment)>, ModelError> {
        if lo >= hi {
            return Ok(Vec::new());
        }
        let one = |s| Ok(alloc::vec![(lo, hi, s)]);
        match &self.rule {
            LabelRule::Bottom => one(Segment::Bottom),
            LabelRule::Constant { value } => one(Segment::Constant(*value)),
            LabelRule::Identity => one(Segment::Affine(0)),
            LabelRule::Shifted { offset } => one(Segment::Affine(*offset)),
            LabelRule::BlockFloor => {
                let p = p.ok_or(ModelError::NeedsPartition)?;
                let mut out = Vec::new();
                let mut x = lo;
                while x < hi {
                    let n = p.block_of_u64(x).ok_or(ModelError::BeyondPartition(x))?;
                    let (a, b) = p.block_u64(n).ok_or(ModelError::BeyondPartition(x))?;
                    let seg = if n == 0 { Segment::Bottom } else { Segment::Constant(a - 1) };
                    out.push((x, b.min(hi), seg));
                    x = b;
                }
                Ok(out)
            }
            LabelRule::QuaternaryBlocks | LabelRule::QuaternaryPowers { .. } => {
                let mut out = Vec::new();
                let mut x = lo;
                while x < hi {
                    let j = quaternary_index(x);
                    let end = quaternary_start(j + 1).map_or(hi, |e| e.min(hi));
                    let seg = match self.rule_label(x, p)? {
                        Label::Bottom => Segment::Bottom,
                        Label::Value(c) => Segment::Constant(c),
                    };
                    out.push((x, end, seg));
                    x = end;
                }
                Ok(out)
            }
            LabelRule::Periodic { .. } => {
                if hi - lo > SEGMENT_LIMIT {
                    return Err(ModelError::NoSegments);
                }
                (lo..hi)
                    .map(|x| {
                        let seg = match self.rule_label(x, p)? {
                            Label::Bottom => Segment::Bottom,
                            Label::Value(c) => Segment::Constant(c),
                        };
                        Ok((x, x + 1, seg))
                    })
                    .collect()
            }
            _ => Err(ModelError::NoSegments),
        }
    }

    /// The set of labels the model can produce, when it is finite.
    pub fn finite_image(&self) -> Option<Vec<Label>> {
        let mut out: Vec<Label> = match &self.rule {
            LabelRule::Bottom => alloc::vec![Label::Bottom],
            LabelRule::Constant { value } => alloc::vec![Label::Value(*value)],
            LabelRule::Periodic { values } => values.iter().map(|v| Label::from(*v)).collect(),
            _ => return None,
        };
        out.extend(self.overrides.values().copied());
        out.sort();
        out.dedup();
        Some(out)
    }
}

/// `⌊log₄(x+1)⌋`.
pub fn quaternary_index(x: u64) -> u64 {
    let y = x as u128 + 1;
    (127 - y.leading_zeros() as u64) / 2
}

fn power_label(base: u64, j: u64) -> Label {
    u32::try_from(j)
        .ok()
        .and_then(|j| base.checked_pow(j))
        .map_or(Label::Bottom, Label::Value)
}

/// `4^j − 1`, the first element labelled `j` by [`LabelRule::QuaternaryBlocks`].
pub fn quaternary_start(j: u64) -> Option<u64> {
    if 2 * j >= 64 {
        None
    } else {
        Some((1u64 << (2 * j)) - 1)
    }
}

/// `ν_i`: `⊥ ↦ ⟨0,0⟩`, `c ↦ ⟨1,c⟩`, the colouring fed to the canonical theorems.
pub fn coded_label(l: Label) -> u64 {
    match l {
        Label::Bottom => pair_diag(0, 0),
        Label::Value(c) => pair_diag(1, c),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::build_partition;

    #[test]
    fn quaternary() {
        assert_eq!((0..16).map(quaternary_index).collect::<Vec<_>>(), [0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 2]);
        assert_eq!(quaternary_start(2), Some(15));
        let m = LabelModel::new(LabelRule::QuaternaryBlocks);
        let s = m.segments(2, 20, None).unwrap();
        assert_eq!(s, [(2, 3, Segment::Constant(0)), (3, 15, Segment::Constant(1)), (15, 20, Segment::Constant(2))]);
    }

    #[test]
    fn block_floor() {
        let p = build_partition(3).unwrap();
        let m = LabelModel::new(LabelRule::BlockFloor).with_override(5, Label::Bottom);
        assert_eq!(m.label(0, Some(&p)).unwrap(), Label::Bottom);
        assert_eq!(m.label(2, Some(&p)).unwrap(), Label::Value(0));
        assert_eq!(m.label(4, Some(&p)).unwrap(), Label::Value(2));
        assert_eq!(m.label(5, Some(&p)).unwrap(), Label::Bottom);
        let s = m.segments(0, 27, Some(&p)).unwrap();
        assert_eq!(s.len(), 5);
        assert_eq!(s[3], (5, 6, Segment::Bottom));
        assert!(m.label(27, Some(&p)).is_err());
        assert_eq!(m.label(1, None), Err(ModelError::NeedsPartition));
    }

    #[test]
    fn pointwise_rules() {
        let l = |r: LabelRule, x| LabelModel::new(r).label(x, None).unwrap();
        assert_eq!(l(LabelRule::MinSupport, 12), Label::Value(4));
        assert_eq!(l(LabelRule::MaxSupport, 12), Label::Value(8));
        assert_eq!(l(LabelRule::MinPlusMaxSupport, 13), Label::Value(9));
        assert_eq!(l(LabelRule::MinSupport, 0), Label::Bottom);
        assert_eq!(l(LabelRule::PairMin, crate::omega::code_unordered(3, 7).unwrap()), Label::Value(3));
        assert_eq!(l(LabelRule::Periodic { values: alloc::vec![Some(1), None] }, 3), Label::Bottom);
        assert!(LabelModel::new(LabelRule::MinSupport).segments(0, 4, None).is_err());
    }
}
