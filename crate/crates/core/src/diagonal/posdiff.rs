//! The difference ideal against the harmonic summable ideal: strongly sparse label sets with heavy successor sets.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use num_bigint::BigUint;

use super::model::{LabelModel, Segment};
use super::{labels_of_runs, Check, Contradiction, Outcome, Run, StageError, WeightBound};
use crate::ramsey::delta;
use crate::rational::{Fraction, Rational};
use crate::trees::Label;

/// Below this many elements per run a chosen set is summed exactly.
pub const EXACT_ELEMENTS: u64 = 1024;

/// Window used to exhibit the harmonic pigeonhole when a node has finitely many labels.
const FINITE_LABEL_WINDOW: u64 = 1024;

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PosdiffScenario {
    /// Successors are searched in `[0, horizon)`.
    pub horizon: u64,
    pub nodes: Vec<LabelModel>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PosdiffStage {
    pub k: u64,
    pub i: u64,
    pub b: u64,
    pub node: usize,
    /// `max` of the earlier labels, 0 when there are none.
    pub top: u64,
    /// One more than the largest earlier difference, 1 when there are none.
    pub modulus: u64,
    pub residue: u64,
    /// Dyadic lower bound on the chosen residue class below the horizon.
    pub tally: Rational,
    pub d: Vec<Run>,
    pub c: Vec<u64>,
    pub weight: WeightBound,
    pub checks: Vec<Check>,
}

/// Elements of `[a, b)` whose label under `seg` exceeds `threshold` and is `≡ r (mod m)`.
fn class_run(a: u64, b: u64, seg: Segment, threshold: u64, m: u64, r: u64) -> Option<Run> {
    match seg {
        Segment::Bottom => None,
        Segment::Constant(c) => (c > threshold && c % m == r).then(|| Run::interval(a, b)),
        Segment::Affine(o) => {
            // x + o > threshold and x + o ≡ r.
            let lo = a.max((threshold + 1).saturating_sub(o));
            let target = (r + m - o % m) % m;
            let first = lo + (target + m - lo % m) % m;
            (first < b).then(|| Run { start: first, step: m, count: (b - 1 - first) / m + 1 })
        }
    }
}

/// Elements of a run inside `[lo, hi)`, as a run.
fn clip(r: &Run, lo: u64, hi: u64) -> Option<Run> {
    let last = r.last()?;
    let step = r.step.max(1);
    let first = if lo <= r.start { r.start } else { r.start + (lo - r.start).div_ceil(step) * step };
    let end = hi.min(last + 1);
    (first < end).then(|| Run { start: first, step, count: (end - 1 - first) / step + 1 })
}

fn dyadic_range(j: u32) -> (u64, u64) {
    let lo = (1u128 << j) - 1;
    let hi = ((1u128 << (j + 1)) - 1).min(u64::MAX as u128);
    (lo as u64, hi as u64)
}

/// `Σ_j |R ∩ [2^j−1, 2^{j+1}−1)| / 2^{j+1}`, a lower bound on `Σ_{x∈R} 1/(x+1)`.
pub fn dyadic_lower_bound(runs: &[Run]) -> Rational {
    let mut total = Rational::zero();
    for j in 0..64u32 {
        let (lo, hi) = dyadic_range(j);
        let count: u64 = runs.iter().filter_map(|r| clip(r, lo, hi)).map(|r| r.count).sum();
        if count > 0 {
            total = total + Rational::pow2_inv(j as u64 + 1).scale(&BigUint::from(count));
        }
    }
    total
}

/// Greedy finite subset of the runs with harmonic weight at least 1, exact for small runs.
fn choose_heavy(runs: &[Run]) -> Option<(Vec<Run>, WeightBound)> {
    let one = Rational::one();
    let unit = BigUint::from(1u8);
    let mut acc = Fraction::zero();
    let mut exact = true;
    let mut chosen: Vec<Run> = Vec::new();
    for r in runs {
        let step = r.step.max(1);
        let mut taken = 0u64;
        while taken < r.count {
            let x = r.start + taken * step;
            if taken < EXACT_ELEMENTS {
                acc.add_scaled(&Rational::harmonic(x), &unit);
                push_point(&mut chosen, x, step);
                taken += 1;
            } else {
                let j = 127 - (x as u128 + 1).leading_zeros();
                let (_, hi) = dyadic_range(j);
                let piece = clip(&Run { start: x, step, count: r.count - taken }, x, hi)?;
                acc.add_scaled(&Rational::pow2_inv(j as u64 + 1), &BigUint::from(piece.count));
                exact = false;
                taken += piece.count;
                chosen.push(piece);
            }
            if acc.cmp_rational(&one).is_ge() {
                return Some((chosen, WeightBound { value: acc.to_rational(), exact }));
            }
        }
    }
    None
}

fn push_point(chosen: &mut Vec<Run>, x: u64, step: u64) {
    if let Some(last) = chosen.last_mut() {
        if last.step == step && last.last().is_some_and(|l| l + step == x) || last.count == 1 && x > last.start && last.step == 1 && x - last.start == step {
            if last.count == 1 {
                last.step = step;
            }
            last.count += 1;
            return;
        }
    }
    chosen.push(Run::point(x));
}

pub struct PosdiffRun {
    pub outcome: Outcome<PosdiffStage>,
}

pub fn run(s: &PosdiffScenario, stages: u64) -> Result<PosdiffRun, StageError> {
    if s.nodes.is_empty() {
        return Err(StageError::NoNodes);
    }
    for (node, model) in s.nodes.iter().enumerate() {
        if model.finite_image().is_some() {
            return Ok(PosdiffRun { outcome: Outcome::Contradiction { report: finite_label_refutation(node, model)? } });
        }
    }
    let mut labels: BTreeSet<u64> = BTreeSet::new();
    let mut d_by_i: BTreeMap<u64, Vec<Run>> = BTreeMap::new();
    let mut out = Vec::new();
    for k in 0..stages {
        let (i, b) = super::stage_indices(k);
        let node = (i % s.nodes.len() as u64) as usize;
        let model = &s.nodes[node];
        let top = labels.last().copied().unwrap_or(0);
        let old_diffs = delta(labels.iter().copied());
        let modulus = old_diffs.last().copied().unwrap_or(0) + 1;
        let threshold = top.checked_add(modulus).ok_or(StageError::HorizonExhausted {
            stage: k,
            detail: "label threshold overflows".into(),
        })?;
        let segs = model.segments(0, s.horizon, None)?;
        let class_runs = |r: u64| -> Vec<Run> { segs.iter().filter_map(|&(a, b, seg)| class_run(a, b, seg, threshold, modulus, r)).collect() };
        // Only residues that some label above the threshold can occupy are worth tallying.
        let mut candidates: BTreeSet<u64> = BTreeSet::new();
        for &(_, _, seg) in &segs {
            match seg {
                Segment::Constant(c) if c > threshold => {
                    candidates.insert(c % modulus);
                }
                Segment::Affine(_) => {
                    candidates.extend(0..modulus);
                }
                _ => {}
            }
        }
        let mut best: Option<(u64, Rational)> = None;
        for &r in &candidates {
            let t = dyadic_lower_bound(&class_runs(r));
            if best.as_ref().is_none_or(|(_, bt)| t > *bt) {
                best = Some((r, t));
            }
        }
        let exhausted = |detail: &str| StageError::HorizonExhausted { stage: k, detail: detail.into() };
        let (residue, tally) = best.ok_or_else(|| exhausted("no label above the threshold below the horizon"))?;
        let (d, weight) = choose_heavy(&class_runs(residue))
            .ok_or_else(|| exhausted(&format!("residue class {residue} mod {modulus} has weight below 1 at the horizon")))?;
        let c = labels_of_runs(model, &d, None)
            .map_err(|e| match e {
                StageError::HorizonExhausted { detail, .. } => StageError::HorizonExhausted { stage: k, detail },
                e => e,
            })?;
        let mut checks = Vec::new();
        checks.push(Check::new("well-labelled", c.is_some()));
        let c: Vec<u64> = c.unwrap_or_default().into_iter().collect();
        checks.push(Check::new("harmonic weight of D_k >= 1", weight.value >= Rational::one()));
        checks.push(Check::new("labels exceed top + modulus", c.iter().all(|&x| x > threshold)));
        checks.push(Check::new("labels in one residue class", c.iter().all(|&x| x % modulus == residue)));
        let mut upto: BTreeSet<u64> = labels.clone();
        upto.extend(c.iter().copied());
        let sparse = c.iter().all(|&x| upto.iter().all(|&y| x == y || !old_diffs.contains(&x.abs_diff(y))));
        checks.push(Check::new("strong sparseness", sparse));
        let prev = d_by_i.entry(i).or_default();
        checks.push(Check::new("D disjoint across b", prev.iter().all(|p| d.iter().all(|q| !p.meets(q)))));
        prev.extend(d.iter().copied());
        labels = upto;
        out.push(PosdiffStage { k, i, b, node, top, modulus, residue, tally, d, c, weight, checks });
    }
    Ok(PosdiffRun { outcome: Outcome::Stages { stages: out } })
}

/// Finitely many labels split the successors into finitely many null classes, yet the harmonic sum diverges.
fn finite_label_refutation(node: usize, model: &LabelModel) -> Result<Contradiction, StageError> {
    let unit = BigUint::from(1u8);
    let mut classes: BTreeMap<Label, Fraction> = BTreeMap::new();
    let mut total = Fraction::zero();
    for x in 0..FINITE_LABEL_WINDOW {
        let w = Rational::harmonic(x);
        total.add_scaled(&w, &unit);
        classes.entry(model.label(x, None)?).or_insert_with(Fraction::zero).add_scaled(&w, &unit);
    }
    let count = classes.len() as u64;
    let total = total.to_rational();
    let largest = classes.values().map(Fraction::to_rational).max().unwrap_or_else(Rational::zero);
    Ok(Contradiction {
        node,
        reason: format!(
            "a critical node with {count} distinct labels: each label class is null, so has finite harmonic weight, but the classes partition the successors whose harmonic sum diverges"
        ),
        evidence: alloc::vec![
            ("labels".to_string(), Rational::from_integer(count)),
            (format!("harmonic sum below {FINITE_LABEL_WINDOW}"), total.clone()),
            ("largest class below the window".to_string(), largest),
            ("pigeonhole share".to_string(), total * Rational::new(1, count).unwrap()),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagonal::{all_hold, LabelRule};

    fn scenario(rule: LabelRule, horizon: u64) -> PosdiffScenario {
        PosdiffScenario { horizon, nodes: alloc::vec![LabelModel::new(rule)] }
    }

    #[test]
    fn identity_stage_zero() {
        let r = run(&scenario(LabelRule::Identity, 1 << 20), 2).unwrap();
        let st = r.outcome.stages().unwrap();
        assert_eq!((st[0].top, st[0].modulus), (0, 1));
        assert_eq!(st[0].d, [Run::interval(2, 7)]);
        assert_eq!(st[0].weight.value, Rational::new(153, 140).unwrap());
        assert!(st[0].weight.exact);
        assert_eq!(st[1].modulus, 5);
        for s in st {
            assert!(all_hold(&s.checks), "{:?}", s.checks);
        }
        assert!(matches!(run(&scenario(LabelRule::Identity, 1 << 20), 4), Err(StageError::HorizonExhausted { stage: 2, .. })));
    }

    #[test]
    fn quaternary_blocks() {
        // Stopping just below 4^20 - 1 keeps every block whole, so residue tallies tie.
        let r = run(&scenario(LabelRule::QuaternaryBlocks, (1 << 40) - 1), 4).unwrap();
        let st = r.outcome.stages().unwrap();
        let labels: Vec<u64> = st.iter().flat_map(|s| s.c.clone()).collect();
        assert_eq!(labels, [2, 4, 9, 18]);
        for s in st {
            assert!(all_hold(&s.checks), "{:?}", s.checks);
        }
    }

    #[test]
    fn powers_run_long() {
        let r = run(&scenario(LabelRule::QuaternaryPowers { base: 3 }, 1 << 62), 6).unwrap();
        let st = r.outcome.stages().unwrap();
        for s in st {
            assert!(all_hold(&s.checks), "{:?}", s.checks);
        }
        let c: Vec<u64> = st.iter().flat_map(|s| s.c.clone()).collect();
        assert!(crate::diagonal::harmonic_sum(c) < Rational::from_integer(2u64));
    }

    #[test]
    fn finite_labels_refuted() {
        let r = run(&scenario(LabelRule::Periodic { values: alloc::vec![Some(3), Some(5)] }, 1 << 20), 4).unwrap();
        let c = r.outcome.contradiction().unwrap();
        assert_eq!(c.evidence[0].1, Rational::from_integer(2u64));
    }

    #[test]
    fn dyadic_bound_is_below_exact() {
        let runs = [Run::interval(0, 100), Run { start: 3, step: 7, count: 50 }];
        let exact: Rational = runs.iter().flat_map(|r| r.iter().collect::<Vec<_>>()).map(Rational::harmonic).sum();
        assert!(dyadic_lower_bound(&runs) <= exact);
    }
}
