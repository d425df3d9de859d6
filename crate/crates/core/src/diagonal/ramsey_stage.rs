//! The harmonic summable ideal against the Ramsey ideal: sparse vertex sequences inside canonical sets.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use super::model::{coded_label, LabelModel};
use super::{harmonic_sum, Check, Contradiction, Outcome, StageError};
use crate::omega::{code_unordered, DescribedSet};
use crate::ramsey::classify_ramsey;
use crate::rational::Rational;
use crate::trees::Label;

const CLASSIFY_VERTICES: usize = 4;

/// Vertex enumeration bound; `T[i]` is materialised below it.
const VERTEX_LIMIT: u64 = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RamseyNode {
    /// Declared canonical case, 1 to 4.
    pub case: u8,
    /// `T[i]`.
    pub vertices: DescribedSet,
    /// Labels of successors, read at pair codes.
    pub labels: LabelModel,
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RamseyScenario {
    /// Vertices of every `T[i]` are taken below this bound.
    pub vertex_horizon: u64,
    pub nodes: Vec<RamseyNode>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RamseyStage {
    pub k: u64,
    pub i: u64,
    pub b: u64,
    pub node: usize,
    pub case: u8,
    /// `t_b`.
    pub vertex: u64,
    pub threshold: u64,
    /// `D_{⟨i,b⟩}` as vertex pairs `(min, max)`.
    pub d: Vec<(u64, u64)>,
    pub c: Vec<u64>,
    pub weight: Rational,
    pub checks: Vec<Check>,
}

fn pair_label(model: &LabelModel, a: u64, b: u64) -> Result<Label, StageError> {
    let code = code_unordered(a, b).map_err(|_| StageError::Hypothesis("a pair needs two distinct vertices"))?;
    Ok(model.label(code, None)?)
}

fn above(model: &LabelModel, a: u64, b: u64, m: u64) -> Result<bool, StageError> {
    Ok(matches!(pair_label(model, a, b)?, Label::Value(c) if c > m))
}

fn threshold(case: u8, k: u64) -> Option<u64> {
    let p = 1u64.checked_shl(u32::try_from(k).ok()?).filter(|_| k < 64)?;
    match case {
        2 | 3 => Some(p),
        4 => k.checked_mul(p),
        _ => None,
    }
}

fn ordered(a: u64, b: u64) -> (u64, u64) {
    (a.min(b), a.max(b))
}

pub struct RamseyRun {
    pub outcome: Outcome<RamseyStage>,
    pub anchors: BTreeMap<u64, Vec<u64>>,
}

pub fn run(s: &RamseyScenario, stages: u64) -> Result<RamseyRun, StageError> {
    if s.nodes.is_empty() {
        return Err(StageError::NoNodes);
    }
    if s.vertex_horizon > VERTEX_LIMIT {
        return Err(StageError::Hypothesis("vertex horizon above 65536"));
    }
    let mut pools = Vec::new();
    for (node, n) in s.nodes.iter().enumerate() {
        let t = n.vertices.enumerate_upto(s.vertex_horizon);
        let probe = &t[..t.len().min(CLASSIFY_VERTICES)];
        if probe.len() < 2 {
            return Err(StageError::HorizonExhausted { stage: 0, detail: format!("node {node} has fewer than two vertices") });
        }
        let f = |a: u64, b: u64| pair_label(&n.labels, a, b).map(coded_label).unwrap_or(u64::MAX);
        let found = classify_ramsey(&f, probe).map(|c| c.case);
        if found != Some(n.case) {
            return Err(StageError::FormMismatch { node, declared: n.case, found });
        }
        if n.case == 1 {
            let c = pair_label(&n.labels, probe[0], probe[1])?;
            let pairs = probe.len() * (probe.len() - 1) / 2;
            return Ok(RamseyRun { outcome: Outcome::Contradiction { report: constant_refutation(node, c, probe.len(), pairs) }, anchors: BTreeMap::new() });
        }
        pools.push(t);
    }
    let mut chosen: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    let mut pending = Vec::new();
    for k in 0..stages {
        let (i, b) = super::stage_indices(k);
        let node = (i % s.nodes.len() as u64) as usize;
        let n = &s.nodes[node];
        let pool = &pools[node];
        let st = chosen.entry(i).or_default();
        let m = threshold(n.case, k).ok_or(StageError::HorizonExhausted { stage: k, detail: "threshold overflows".into() })?;
        let from = st.last().map_or(0, |&t| pool.partition_point(|&v| v <= t));
        let mut pick = None;
        for (j, &t) in pool.iter().enumerate().skip(from) {
            let ok = match n.case {
                // c_t read at the next vertex of T.
                2 => match pool.get(j + 1) {
                    Some(&s2) => above(&n.labels, t, s2, m)?,
                    None => false,
                },
                // c_t read at the least vertex of T.
                3 => j > 0 && above(&n.labels, pool[0], t, m)?,
                _ => pool.iter().filter(|&&v| v != t).try_fold(true, |acc, &v| Ok::<_, StageError>(acc && above(&n.labels, v, t, m)?))?,
            };
            if ok {
                pick = Some(t);
                break;
            }
        }
        let t = pick.ok_or_else(|| StageError::HorizonExhausted {
            stage: k,
            detail: format!("no vertex below the horizon has labels above {m}"),
        })?;
        st.push(t);
        pending.push((k, i, b, node, t, m));
    }
    let mut out = Vec::new();
    let mut seen: BTreeMap<u64, Vec<BTreeSet<(u64, u64)>>> = BTreeMap::new();
    for (k, i, b, node, t, m) in pending {
        let n = &s.nodes[node];
        let anchors = &chosen[&i];
        let bi = b as usize;
        let partners: &[u64] = if n.case == 2 { &anchors[bi + 1..] } else { &anchors[..bi] };
        let d: Vec<(u64, u64)> = partners.iter().map(|&r| ordered(r, t)).collect();
        let mut labels = BTreeSet::new();
        let mut well = true;
        for &(x, y) in &d {
            match pair_label(&n.labels, x, y)? {
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
            2 | 3 => checks.push(Check::new("C has at most one label", labels.len() <= 1)),
            _ if k > 0 => {
                let lhs = Rational::new(b, k as u128 * (1u128 << k)).unwrap_or_else(Rational::zero);
                checks.push(Check::new("b/(k2^k) <= 2^-k", lhs <= bound));
            }
            _ => {}
        }
        let dset: BTreeSet<(u64, u64)> = d.iter().copied().collect();
        let prev = seen.entry(i).or_default();
        checks.push(Check::new("D disjoint across b", prev.iter().all(|p| p.is_disjoint(&dset))));
        prev.push(dset);
        if prev.len() == anchors.len() {
            let union: BTreeSet<(u64, u64)> = prev.iter().flatten().copied().collect();
            let mut full = BTreeSet::new();
            for (x, &a) in anchors.iter().enumerate() {
                for &c in &anchors[x + 1..] {
                    full.insert(ordered(a, c));
                }
            }
            checks.push(Check::new("union of D equals pairs of anchors", union == full));
        }
        out.push(RamseyStage { k, i, b, node, case: n.case, vertex: t, threshold: m, d, c: labels.into_iter().collect(), weight, checks });
    }
    Ok(RamseyRun { outcome: Outcome::Stages { stages: out }, anchors: chosen })
}

fn constant_refutation(node: usize, c: Label, vertices: usize, pairs: usize) -> Contradiction {
    Contradiction {
        node,
        reason: format!(
            "every pair of the canonical set is labelled {c}; that label class is null at a critical node, yet it contains all pairs of an infinite set"
        ),
        evidence: alloc::vec![
            ("vertices checked".to_string(), Rational::from_integer(vertices as u64)),
            ("pairs with the constant label".to_string(), Rational::from_integer(pairs as u64)),
            ("label (-1 for bottom)".to_string(), c.value().map_or(Rational::from_integer(-1i64), Rational::from_integer)),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagonal::{all_hold, LabelRule};

    fn scenario(case: u8, rule: LabelRule) -> RamseyScenario {
        RamseyScenario { vertex_horizon: 4096, nodes: alloc::vec![RamseyNode { case, vertices: DescribedSet::all(), labels: LabelModel::new(rule) }] }
    }

    #[test]
    fn every_case_runs() {
        for (case, rule) in [(2, LabelRule::PairMin), (3, LabelRule::PairMax), (4, LabelRule::Identity)] {
            let r = run(&scenario(case, rule), 6).unwrap();
            for s in r.outcome.stages().unwrap() {
                assert!(all_hold(&s.checks), "case {case} stage {}: {:?}", s.k, s.checks);
            }
        }
    }

    #[test]
    fn pairs_of_four_anchors() {
        let r = run(&scenario(4, LabelRule::Identity), 10).unwrap();
        let st = r.outcome.stages().unwrap();
        let of_zero: Vec<_> = st.iter().filter(|s| s.i == 0).collect();
        assert_eq!(of_zero.len(), 4);
        let total: usize = of_zero.iter().map(|s| s.d.len()).sum();
        assert_eq!(total, 6);
    }

    #[test]
    fn constant_is_refuted() {
        assert!(run(&scenario(1, LabelRule::Constant { value: 0 }), 3).unwrap().outcome.contradiction().is_some());
    }
}
