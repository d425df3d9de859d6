//! Collecting stages into the forbidden label set `C` and the positive sets `D[i]`, and meeting a claimed tree.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use super::hindman::HindmanRun;
use super::posdiff::{PosdiffRun, PosdiffStage};
use super::pwfin::{interval_weight, PwfinRun, PwfinScenario};
use super::ramsey_stage::RamseyRun;
use super::{all_hold, harmonic_sum, Check, Run, StageError};
use crate::construction::BlockWeight;
use crate::ideals::{in_dual_filter, IdealDescriptor, Verdict};
use crate::omega::{code_unordered, FiniteString};
use crate::rational::Rational;
use crate::trees::{path_value_search_from, FiniteTree, Label, LabelledTree};

/// Why `D[i]` is positive for the target's dual filter.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "kebab-case"))]
pub enum Positivity {
    /// Each of `pieces` stages contributed at least `per_piece`, so the weight grows without bound.
    WeightTally { pieces: u64, per_piece: Rational, total: Rational },
    /// `D[i] = FS(anchors)` at the horizon.
    FiniteSums { anchors: Vec<u64> },
    /// `D[i] = [vertices]²` at the horizon.
    Clique { vertices: Vec<u64> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PositiveSet {
    pub i: u64,
    pub d: Vec<Run>,
    pub certificate: Positivity,
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Assembly {
    /// `w_P` or `harmonic`.
    pub weight: String,
    pub stages: u64,
    pub c: Vec<Run>,
    /// Weight of `C` as assembled so far.
    pub c_weight: Rational,
    /// `Σ_{k<K} 2^{-k}` and `Σ_{k≥K} 2^{-k}`; their sum bounds the weight of the full `C`.
    pub stage_bound: Rational,
    pub tail_bound: Rational,
    pub total_bound: Rational,
    pub d: Vec<PositiveSet>,
    pub checks: Vec<Check>,
}

impl Assembly {
    pub fn contains_label(&self, c: u64) -> bool {
        self.c.iter().any(|r| r.contains(c))
    }

    pub fn positive_set(&self, i: u64) -> Option<&PositiveSet> {
        self.d.iter().find(|p| p.i == i)
    }
}

fn geometric(stages: u64) -> (Rational, Rational) {
    let tail = if stages == 0 { Rational::from_integer(2u64) } else { Rational::pow2_inv(stages - 1) };
    (Rational::from_integer(2u64) - tail.clone(), tail)
}

fn points(c: &BTreeSet<u64>) -> Vec<Run> {
    let mut out: Vec<Run> = Vec::new();
    for &x in c {
        match out.last_mut() {
            Some(r) if r.step == 1 && r.last().is_some_and(|l| l + 1 == x) => r.count += 1,
            _ => out.push(Run::point(x)),
        }
    }
    out
}

fn finish(weight: &str, stages: u64, c: Vec<Run>, c_weight: Rational, d: Vec<PositiveSet>) -> Assembly {
    let (stage_bound, tail_bound) = geometric(stages);
    let total_bound = &stage_bound + &tail_bound;
    let checks = alloc::vec![
        Check::new("weight of C within the stage bounds", c_weight <= stage_bound),
        Check::new("stage bound plus tail at most 2", total_bound <= Rational::from_integer(2u64)),
    ];
    Assembly { weight: weight.into(), stages, c, c_weight, stage_bound, tail_bound, total_bound, d, checks }
}

fn guard<S>(stages: &[S], checks: impl Fn(&S) -> (&[Check], u64)) -> Result<(), StageError> {
    for s in stages {
        let (cs, k) = checks(s);
        if !all_hold(cs) {
            return Err(StageError::Invariant { stage: k, name: "stage check" });
        }
    }
    Ok(())
}

fn no_stages() -> StageError {
    StageError::Hypothesis("a contradiction report has no stages to assemble")
}

pub fn assemble_pwfin(s: &PwfinScenario, r: &PwfinRun) -> Result<Assembly, StageError> {
    let stages = r.outcome.stages().ok_or_else(no_stages)?;
    guard(stages, |s| (&s.checks, s.k))?;
    let mut c: Vec<(u64, u64)> = stages.iter().flat_map(|s| s.c.iter().copied()).collect();
    c.sort();
    let wp = BlockWeight::new(s.p.clone(), r.partition.clone());
    let c_weight = interval_weight(&c, &wp)?;
    let mut d: BTreeMap<u64, (Vec<Run>, u64, Rational)> = BTreeMap::new();
    for st in stages {
        let e = d.entry(st.i).or_insert_with(|| (Vec::new(), 0, Rational::zero()));
        e.0.extend(st.d.iter().map(|&(a, b)| Run::interval(a, b)));
        e.1 += 1;
        e.2 = e.2.clone() + st.w_q_d.clone();
    }
    let third = Rational::new(1, 3).unwrap();
    let d = d
        .into_iter()
        .map(|(i, (runs, pieces, total))| PositiveSet { i, d: runs, certificate: Positivity::WeightTally { pieces, per_piece: third.clone(), total } })
        .collect();
    let runs = c.iter().map(|&(a, b)| Run::interval(a, b)).collect();
    Ok(finish("w_P", stages.len() as u64, runs, c_weight, d))
}

pub fn assemble_posdiff(r: &PosdiffRun) -> Result<Assembly, StageError> {
    let stages = r.outcome.stages().ok_or_else(no_stages)?;
    guard(stages, |s| (&s.checks, s.k))?;
    let c: BTreeSet<u64> = stages.iter().flat_map(|s| s.c.iter().copied()).collect();
    let c_weight = harmonic_sum(c.iter().copied());
    let mut d: BTreeMap<u64, (Vec<Run>, u64, Rational)> = BTreeMap::new();
    for st in stages {
        let e = d.entry(st.i).or_insert_with(|| (Vec::new(), 0, Rational::zero()));
        e.0.extend(st.d.iter().copied());
        e.1 += 1;
        e.2 = e.2.clone() + st.weight.value.clone();
    }
    let d = d
        .into_iter()
        .map(|(i, (runs, pieces, total))| PositiveSet { i, d: runs, certificate: Positivity::WeightTally { pieces, per_piece: Rational::one(), total } })
        .collect();
    let mut a = finish("harmonic", stages.len() as u64, points(&c), c_weight, d);
    // C need not be summable here; it must instead realise each difference in one stage only.
    a.checks[0] = Check::new("each difference of C realised in one stage", differences_confined(stages));
    Ok(a)
}

/// No difference of `C_k` with `⋃_{j≤k} C_j` is realised at two different stages.
fn differences_confined(stages: &[PosdiffStage]) -> bool {
    let mut seen: BTreeMap<u64, u64> = BTreeMap::new();
    let mut earlier: BTreeSet<u64> = BTreeSet::new();
    for st in stages {
        let ck: BTreeSet<u64> = st.c.iter().copied().collect();
        earlier.extend(ck.iter().copied());
        for &x in &ck {
            for &y in &earlier {
                if x != y && *seen.entry(x.abs_diff(y)).or_insert(st.k) != st.k {
                    return false;
                }
            }
        }
    }
    true
}

pub fn assemble_hindman(r: &HindmanRun) -> Result<Assembly, StageError> {
    let stages = r.outcome.stages().ok_or_else(no_stages)?;
    guard(stages, |s| (&s.checks, s.k))?;
    let c: BTreeSet<u64> = stages.iter().flat_map(|s| s.c.iter().copied()).collect();
    let mut d: BTreeMap<u64, BTreeSet<u64>> = BTreeMap::new();
    for st in stages {
        d.entry(st.i).or_default().extend(st.d.iter().copied());
    }
    let d = d
        .into_iter()
        .map(|(i, set)| PositiveSet { i, d: points(&set), certificate: Positivity::FiniteSums { anchors: r.anchors[&i].clone() } })
        .collect();
    Ok(finish("harmonic", stages.len() as u64, points(&c), harmonic_sum(c.iter().copied()), d))
}

pub fn assemble_ramsey(r: &RamseyRun) -> Result<Assembly, StageError> {
    let stages = r.outcome.stages().ok_or_else(no_stages)?;
    guard(stages, |s| (&s.checks, s.k))?;
    let c: BTreeSet<u64> = stages.iter().flat_map(|s| s.c.iter().copied()).collect();
    let mut d: BTreeMap<u64, BTreeSet<u64>> = BTreeMap::new();
    for st in stages {
        let e = d.entry(st.i).or_default();
        for &(a, b) in &st.d {
            e.insert(code_unordered(a, b).map_err(|_| StageError::Invariant { stage: st.k, name: "distinct pair" })?);
        }
    }
    let d = d
        .into_iter()
        .map(|(i, set)| PositiveSet { i, d: points(&set), certificate: Positivity::Clique { vertices: r.anchors[&i].clone() } })
        .collect();
    Ok(finish("harmonic", stages.len() as u64, points(&c), harmonic_sum(c.iter().copied()), d))
}

/// Outcome of meeting a claimed branching tree with an assembled diagonalisation.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "collision", rename_all = "kebab-case"))]
pub enum Collision {
    /// `τ⌢x` lies in the tree, `x ∈ D[i]`, its label `c` is forbidden, and `path` realises `c`.
    Found { node: FiniteString, x: u64, label: u64, path: Vec<FiniteString> },
    /// The successors of `τ` are not shown to be in the dual filter.
    NotBranching { node: FiniteString, verdict: Verdict },
    /// Nothing found below the horizon; says nothing about the infinite argument.
    Inconclusive { reason: String },
}

/// Looks for `x ∈ D` among the successors of `tau` in `tree` whose label under `lt` lies in `C`.
pub fn collision_check(
    tree: &FiniteTree,
    lt: &LabelledTree,
    ideal: &IdealDescriptor,
    horizon: u64,
    tau: &FiniteString,
    d: &[Run],
    a: &Assembly,
) -> Collision {
    if !tree.contains(tau) {
        return Collision::Inconclusive { reason: alloc::format!("{tau} is not a node of the tree") };
    }
    let verdict = in_dual_filter(ideal, &tree.successor_set(tau), horizon);
    if !verdict.is_in() {
        return Collision::NotBranching { node: tau.clone(), verdict };
    }
    // Paths are searched on the claimed tree, labels read off the canonical labelling.
    let on_tree = LabelledTree { tree: tree.clone(), map: lt.map.clone(), labels: BTreeMap::new(), rules: BTreeMap::new() };
    let mut hits = 0usize;
    for x in tree.children(tau) {
        if !d.iter().any(|r| r.contains(x)) {
            continue;
        }
        let child = tau.child(x);
        let Some(Label::Value(c)) = lt.label(&child) else { continue };
        if !a.contains_label(c) {
            continue;
        }
        hits += 1;
        let path = path_value_search_from(&on_tree, &child, c).or_else(|| path_value_search_from(&on_tree, &FiniteString::root(), c));
        if let Some(path) = path {
            return Collision::Found { node: tau.clone(), x, label: c, path };
        }
    }
    Collision::Inconclusive {
        reason: alloc::format!("{hits} successors of {tau} in D carry a forbidden label, none realised by a path below the horizon"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagonal::WeightBound;

    fn stage(k: u64, c: &[u64]) -> PosdiffStage {
        PosdiffStage {
            k,
            i: 0,
            b: k,
            node: 0,
            top: 0,
            modulus: 1,
            residue: 0,
            tally: Rational::zero(),
            d: Vec::new(),
            c: c.to_vec(),
            weight: WeightBound { value: Rational::zero(), exact: true },
            checks: Vec::new(),
        }
    }

    #[test]
    fn repeated_differences_within_a_stage_are_allowed() {
        assert!(differences_confined(&[stage(0, &[2, 3, 4]), stage(1, &[10, 20, 30])]));
    }

    #[test]
    fn a_difference_met_again_later_is_not() {
        // 5 - 4 = 1 reappears at stage 1.
        assert!(!differences_confined(&[stage(0, &[3, 4]), stage(1, &[5])]));
        // 10 - 4 = 6 against 16 - 10 = 6 is fine: both at stage 1.
        assert!(differences_confined(&[stage(0, &[4]), stage(1, &[10, 16])]));
    }
}
