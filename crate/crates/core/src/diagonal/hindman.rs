//! The harmonic summable ideal against the Hindman ideal: sparse subsequences of canonical anchors.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use super::model::{coded_label, LabelModel};
use super::{harmonic_sum, Check, Contradiction, Outcome, StageError};
use crate::ramsey::{block_disjoint, classify_hindman, fs};
use crate::rational::Rational;
use crate::trees::Label;

/// Anchors used to classify a declared form.
const CLASSIFY_ANCHORS: usize = 4;

/// Finite sums enumerated for one chosen set before giving up.
const FS_LIMIT: usize = 1 << 16;

/// Where `H[i]` comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "source", rename_all = "kebab-case"))]
pub enum AnchorSource {
    Explicit { anchors: Vec<u64> },
    /// `h_n = coeff · 2^{shift·n}`, block-disjoint when `0 < coeff < 2^shift`.
    Geometric { coeff: u64, shift: u32 },
}

impl AnchorSource {
    /// The anchors below `horizon`, in increasing order.
    pub fn below(&self, horizon: u64) -> Vec<u64> {
        match self {
            AnchorSource::Explicit { anchors } => anchors.iter().copied().filter(|&h| h < horizon).collect(),
            AnchorSource::Geometric { coeff, shift } => {
                let mut out = Vec::new();
                if *coeff == 0 || *shift == 0 {
                    return out;
                }
                let mut n = 0u32;
                while let Some(h) = (*shift).checked_mul(n).filter(|&s| s < 64).and_then(|s| coeff.checked_mul(1u64 << s)) {
                    if h >= horizon || (h >> (shift * n)) != *coeff {
                        break;
                    }
                    out.push(h);
                    n += 1;
                }
                out
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HindmanNode {
    /// Declared canonical case, 1 to 5.
    pub case: u8,
    pub anchors: AnchorSource,
    pub labels: LabelModel,
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HindmanScenario {
    pub horizon: u64,
    pub nodes: Vec<HindmanNode>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HindmanStage {
    pub k: u64,
    pub i: u64,
    pub b: u64,
    pub node: usize,
    pub case: u8,
    /// `h_{n_b}` and its position `n_b` in `H[i]`.
    pub anchor: u64,
    pub anchor_index: usize,
    /// Labels of the relevant sums must exceed this.
    pub threshold: u64,
    pub d: Vec<u64>,
    pub c: Vec<u64>,
    /// `Σ_{c∈C} 1/(c+1)`, compared with `2^{-k}`.
    pub weight: Rational,
    pub checks: Vec<Check>,
}

fn label_of(model: &LabelModel, x: u64) -> Result<Label, StageError> {
    Ok(model.label(x, None)?)
}

fn above(model: &LabelModel, x: u64, m: u64) -> Result<bool, StageError> {
    Ok(matches!(label_of(model, x)?, Label::Value(c) if c > m))
}

fn threshold(case: u8, k: u64) -> Option<u64> {
    let k32 = u32::try_from(k).ok()?;
    match case {
        2 | 3 => 1u64.checked_shl(k32).filter(|_| k < 64),
        4 => (k + 1).checked_mul(1u64.checked_shl(k32).filter(|_| k < 64)?),
        5 => 1u64.checked_shl(2 * k32).filter(|_| 2 * k < 64),
        _ => None,
    }
}

/// Sums `h + y` for `y ∈ FS(prev) ∪ {0}`: the finite sums whose largest summand is `h`.
fn max_anchored(h: u64, prev: &[u64]) -> Result<Vec<u64>, StageError> {
    let mut out = alloc::vec![h];
    if !prev.is_empty() {
        out.extend(fs_checked(prev)?.into_iter().map(|y| y + h));
    }
    out.sort_unstable();
    Ok(out)
}

fn fs_checked(a: &[u64]) -> Result<Vec<u64>, StageError> {
    if a.len() >= 17 || 1usize << a.len() > FS_LIMIT {
        return Err(StageError::HorizonExhausted { stage: 0, detail: format!("FS of {} anchors is too large to enumerate", a.len()) });
    }
    fs(a).map_err(|_| StageError::Hypothesis("anchors must be distinct, positive and have non-overflowing sums"))
}

/// The anchors of node `i` chosen so far, and their positions in `H[i]`.
#[derive(Default)]
struct Chosen {
    anchors: Vec<u64>,
    positions: Vec<usize>,
}

pub struct HindmanRun {
    pub outcome: Outcome<HindmanStage>,
    /// Final chosen anchors per enumeration index `i`.
    pub anchors: BTreeMap<u64, Vec<u64>>,
}

pub fn run(s: &HindmanScenario, stages: u64) -> Result<HindmanRun, StageError> {
    if s.nodes.is_empty() {
        return Err(StageError::NoNodes);
    }
    let mut pools = Vec::new();
    for (node, n) in s.nodes.iter().enumerate() {
        let h = n.anchors.below(s.horizon);
        if !block_disjoint(&h) || h.first() == Some(&0) {
            return Err(StageError::Hypothesis("anchors must be positive and block-disjoint"));
        }
        let probe = &h[..h.len().min(CLASSIFY_ANCHORS)];
        let domain = fs_checked(probe)?;
        let f = |x: u64| label_of(&n.labels, x).map(coded_label).unwrap_or(u64::MAX);
        let found = classify_hindman(&f, &domain).map(|c| c.case);
        if found != Some(n.case) {
            return Err(StageError::FormMismatch { node, declared: n.case, found });
        }
        if n.case == 1 {
            let c = label_of(&n.labels, probe[0])?;
            return Ok(HindmanRun { outcome: Outcome::Contradiction { report: constant_refutation(node, c, probe, domain.len()) }, anchors: BTreeMap::new() });
        }
        pools.push(h);
    }
    let mut chosen: BTreeMap<u64, Chosen> = BTreeMap::new();
    let mut pending = Vec::new();
    for k in 0..stages {
        let (i, b) = super::stage_indices(k);
        let node = (i % s.nodes.len() as u64) as usize;
        let n = &s.nodes[node];
        let pool = &pools[node];
        let st = chosen.entry(i).or_default();
        let m = threshold(n.case, k).ok_or(StageError::HorizonExhausted { stage: k, detail: "threshold overflows".into() })?;
        let from = st.positions.last().map_or(0, |&p| p + 1);
        let mut pick = None;
        for (pos, &h) in pool.iter().enumerate().skip(from) {
            let ok = match n.case {
                2 | 3 => above(&n.labels, h, m)?,
                // The packet {h} ∪ {h + h_s : s < b}.
                4 => above(&n.labels, h, m)? && st.anchors.iter().try_fold(true, |acc, &a| Ok::<_, StageError>(acc && above(&n.labels, h + a, m)?))?,
                // Finite stand-in for clearing the finitely many bad sums: every new sum is labelled above M.
                _ => max_anchored(h, &st.anchors)?.into_iter().try_fold(true, |acc, x| Ok::<_, StageError>(acc && above(&n.labels, x, m)?))?,
            };
            if ok {
                pick = Some((pos, h));
                break;
            }
        }
        let (pos, h) = pick.ok_or_else(|| StageError::HorizonExhausted {
            stage: k,
            detail: format!("no anchor below the horizon has labels above {m}"),
        })?;
        st.anchors.push(h);
        st.positions.push(pos);
        pending.push((k, i, b, node, pos, h, m));
    }
    // D for the min-anchored case depends on later anchors, so every D is built from the final lists.
    let mut out = Vec::new();
    let mut seen: BTreeMap<u64, Vec<BTreeSet<u64>>> = BTreeMap::new();
    for (k, i, b, node, pos, h, m) in pending {
        let n = &s.nodes[node];
        let anchors = &chosen[&i].anchors;
        let bi = b as usize;
        let d = if n.case == 2 {
            let later = &anchors[bi + 1..];
            let mut d = alloc::vec![h];
            if !later.is_empty() {
                d.extend(fs_checked(later)?.into_iter().map(|y| y + h));
            }
            d.sort_unstable();
            d
        } else {
            max_anchored(h, &anchors[..bi])?
        };
        let mut labels = BTreeSet::new();
        let mut well = true;
        for &x in &d {
            match label_of(&n.labels, x)? {
                Label::Value(c) => {
                    labels.insert(c);
                }
                Label::Bottom => well = false,
            }
        }
        let weight = harmonic_sum(labels.iter().copied());
        let bound = Rational::pow2_inv(k);
        let mut checks = alloc::vec![
            Check::new("well-labelled", well),
            Check::new("sum 1/(c+1) < 2^-k", weight < bound),
            Check::new("labels exceed threshold", labels.iter().all(|&c| c > m)),
        ];
        match n.case {
            2 | 3 => checks.push(Check::new("C is a singleton", labels.len() == 1)),
            4 => {
                checks.push(Check::new("at most b+1 labels", labels.len() <= bi + 1));
                let lhs = Rational::new(b + 1, (k + 1) as u128 * (1u128 << k)).unwrap_or_else(Rational::zero);
                checks.push(Check::new("(b+1)/((k+1)2^k) <= 2^-k", lhs <= bound));
            }
            _ => checks.push(Check::new("|D| = 2^b", d.len() as u128 == 1u128 << b)),
        }
        let dset: BTreeSet<u64> = d.iter().copied().collect();
        let prev = seen.entry(i).or_default();
        checks.push(Check::new("D disjoint across b", prev.iter().all(|p| p.is_disjoint(&dset))));
        prev.push(dset);
        let done = prev.len() == anchors.len();
        if done {
            let union: BTreeSet<u64> = prev.iter().flatten().copied().collect();
            let full: BTreeSet<u64> = fs_checked(anchors)?.into_iter().collect();
            checks.push(Check::new("union of D equals FS(anchors)", union == full));
        }
        out.push(HindmanStage { k, i, b, node, case: n.case, anchor: h, anchor_index: pos, threshold: m, d, c: labels.into_iter().collect(), weight, checks });
    }
    let anchors = chosen.into_iter().map(|(i, c)| (i, c.anchors)).collect();
    Ok(HindmanRun { outcome: Outcome::Stages { stages: out }, anchors })
}

fn constant_refutation(node: usize, c: Label, probe: &[u64], fs_size: usize) -> Contradiction {
    Contradiction {
        node,
        reason: format!(
            "every finite sum of the anchors is labelled {c}; that label class is null at a critical node, yet it contains an FS-set, which is Hindman-positive"
        ),
        evidence: alloc::vec![
            ("anchors checked".to_string(), Rational::from_integer(probe.len() as u64)),
            ("finite sums with the constant label".to_string(), Rational::from_integer(fs_size as u64)),
            ("label (-1 for bottom)".to_string(), c.value().map_or(Rational::from_integer(-1i64), Rational::from_integer)),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagonal::{all_hold, LabelRule};

    fn node(case: u8, rule: LabelRule) -> HindmanNode {
        HindmanNode { case, anchors: AnchorSource::Geometric { coeff: 1, shift: 1 }, labels: LabelModel::new(rule) }
    }

    fn scenario(case: u8, rule: LabelRule) -> HindmanScenario {
        HindmanScenario { horizon: 1 << 62, nodes: alloc::vec![node(case, rule)] }
    }

    #[test]
    fn geometric_anchors() {
        assert_eq!(AnchorSource::Geometric { coeff: 3, shift: 2 }.below(200), [3, 12, 48, 192]);
        assert_eq!(AnchorSource::Geometric { coeff: 1, shift: 1 }.below(u64::MAX).len(), 64);
    }

    #[test]
    fn every_case_runs() {
        for (case, rule) in [(2, LabelRule::MinSupport), (3, LabelRule::MaxSupport), (4, LabelRule::MinPlusMaxSupport), (5, LabelRule::Identity)] {
            let r = run(&scenario(case, rule), 6).unwrap();
            let st = r.outcome.stages().unwrap();
            assert_eq!(st.len(), 6);
            for s in st {
                assert!(all_hold(&s.checks), "case {case} stage {}: {:?}", s.k, s.checks);
            }
        }
    }

    #[test]
    fn case_five_counts() {
        let r = run(&scenario(5, LabelRule::Identity), 10).unwrap();
        let s = &r.outcome.stages().unwrap()[9];
        assert_eq!((s.i, s.b), (0, 3));
        assert_eq!(s.d.len(), 8);
    }

    #[test]
    fn case_two_singleton() {
        let r = run(&scenario(2, LabelRule::MinSupport), 6).unwrap();
        for s in r.outcome.stages().unwrap() {
            assert_eq!(s.c.len(), 1);
            assert!(s.c[0] > 1 << s.k);
        }
    }

    #[test]
    fn constant_is_refuted() {
        let r = run(&scenario(1, LabelRule::Constant { value: 4 }), 4).unwrap();
        assert!(r.outcome.contradiction().is_some());
    }

    #[test]
    fn wrong_declaration() {
        let e = run(&scenario(3, LabelRule::MinSupport), 4).err().unwrap();
        assert_eq!(e, StageError::FormMismatch { node: 0, declared: 3, found: Some(2) });
    }
}
