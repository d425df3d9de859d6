//! Summable ideals `Sum_P` against `Sum_Q` with `P \ Q` infinite: the three-colour pigeonhole engine.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_bigint::BigUint;

use super::model::{LabelModel, Segment};
use super::{Check, Contradiction, Outcome, Run, StageError};
use crate::construction::{BlockWeight, PartitionData};
use crate::omega::{pair_diag, DescribedSet, SizeClass};
use crate::rational::Rational;
use crate::trees::Label;

/// `0` for `⊥`, `1` for a label in `I_{<n}`, `2` for a label in `I_{≥n}`.
pub fn coarse_colour(model: &LabelModel, p: &PartitionData, n: usize, x: u64) -> Result<u8, StageError> {
    let label = model.label(x, Some(p))?;
    let start = p.block_u64(n).ok_or(StageError::Horizon(crate::construction::HorizonExceeded { depth: p.depth() }))?.0;
    Ok(match label {
        Label::Bottom => 0,
        Label::Value(c) if c < start => 1,
        Label::Value(_) => 2,
    })
}

fn segment_colour(seg: Segment, block_start: u64) -> u8 {
    match seg {
        Segment::Bottom => 0,
        Segment::Constant(c) if c < block_start => 1,
        Segment::Constant(_) | Segment::Affine(_) => 2,
    }
}

/// A largest monochromatic part of `I_n` under the coarse colouring.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Extraction {
    pub n: usize,
    pub colour: u8,
    pub size: u64,
    pub block_len: u64,
    /// `F_n` as the labelled runs it is made of.
    #[cfg_attr(feature = "serde", serde(skip))]
    pub pieces: Vec<(u64, u64, Segment)>,
}

impl Extraction {
    pub fn runs(&self) -> Vec<Run> {
        self.pieces.iter().map(|&(a, b, _)| Run::interval(a, b)).collect()
    }
}

/// `F_n` and `t_n`: the largest colour class of `I_n`, least colour on ties.
pub fn extract_fn(model: &LabelModel, p: &PartitionData, n: usize) -> Result<Extraction, StageError> {
    let (a, b) = p.block_u64(n).ok_or(crate::construction::HorizonExceeded { depth: p.depth() })?;
    let segs = model.segments(a, b, Some(p))?;
    let mut counts = [0u64; 3];
    for &(x, y, s) in &segs {
        counts[segment_colour(s, a) as usize] += y - x;
    }
    let colour = (0..3u8).max_by(|&u, &v| counts[u as usize].cmp(&counts[v as usize]).then(v.cmp(&u))).unwrap();
    let pieces = segs.into_iter().filter(|&(_, _, s)| segment_colour(s, a) == colour).collect();
    Ok(Extraction { n, colour, size: counts[colour as usize], block_len: b - a, pieces })
}

/// `w_Q(F_n)`, exact.
pub fn weight_of_extraction(e: &Extraction, w: &BlockWeight) -> Rational {
    w.block_weight(e.n).scale(&BigUint::from(e.size))
}

/// Exact weight of a finite union of intervals under a block weight.
pub fn interval_weight(runs: &[(u64, u64)], w: &BlockWeight) -> Result<Rational, StageError> {
    let mut total = Rational::zero();
    for &(a, b) in &merge(runs.to_vec()) {
        total = total + w.interval_sum(a, b)?;
    }
    Ok(total)
}

fn merge(mut v: Vec<(u64, u64)>) -> Vec<(u64, u64)> {
    v.retain(|&(a, b)| a < b);
    v.sort();
    let mut out: Vec<(u64, u64)> = Vec::new();
    for (a, b) in v {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum PwCase {
    /// Labels drop below the current interval on a large part.
    Below,
    /// Labels stay at or above the current interval.
    Above,
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PwfinScenario {
    pub p: DescribedSet,
    pub q: DescribedSet,
    /// Number of intervals of the greedy partition to build.
    pub depth: usize,
    pub nodes: Vec<LabelModel>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PwfinStage {
    pub k: u64,
    pub i: u64,
    pub b: u64,
    pub node: usize,
    pub case: PwCase,
    pub n: usize,
    pub f_size: u64,
    /// `|G_n|` and the shared label `c^i_n`, below-case only.
    pub g_size: Option<u64>,
    pub label: Option<u64>,
    /// `D_k` and `C_k` as unions of half-open intervals.
    pub d: Vec<(u64, u64)>,
    pub c: Vec<(u64, u64)>,
    pub w_p_c: Rational,
    pub w_q_d: Rational,
    pub checks: Vec<Check>,
}

/// The colour profile of one node over the indices `n ∈ P \ Q` inside the partition.
pub fn colour_profile(model: &LabelModel, p: &PartitionData, pq: &DescribedSet) -> Result<BTreeMap<usize, Extraction>, StageError> {
    let mut out = BTreeMap::new();
    for n in 0..p.depth() {
        if pq.contains(n as u64) && p.block_u64(n).is_some() {
            out.insert(n, extract_fn(model, p, n)?);
        }
    }
    Ok(out)
}

pub struct PwfinRun {
    pub partition: Arc<PartitionData>,
    pub outcome: Outcome<PwfinStage>,
}

/// Runs `stages` stages. A node whose profile is dominated by `⊥` is refuted instead.
pub fn run(s: &PwfinScenario, stages: u64) -> Result<PwfinRun, StageError> {
    if s.nodes.is_empty() {
        return Err(StageError::NoNodes);
    }
    let pq = DescribedSet::intersection(alloc::vec![s.p.clone(), s.q.clone().complement()]);
    match pq.size_class() {
        Some(SizeClass::Finite) => return Err(StageError::Hypothesis("P \\ Q must be infinite")),
        None => return Err(StageError::Hypothesis("P \\ Q must be decidably infinite")),
        Some(_) => {}
    }
    let partition = Arc::new(
        crate::construction::build_partition(s.depth)
            .map_err(|_| StageError::Hypothesis("partition depth beyond the bit budget"))?,
    );
    let p = &*partition;
    let wp = BlockWeight::new(s.p.clone(), partition.clone());
    let wq = BlockWeight::new(s.q.clone(), partition.clone());

    let mut profiles = Vec::new();
    let mut cases = Vec::new();
    for (node, model) in s.nodes.iter().enumerate() {
        let prof = colour_profile(model, p, &pq)?;
        let mut tally = [0usize; 3];
        for e in prof.values() {
            tally[e.colour as usize] += 1;
        }
        let t = (0..3).max_by(|&u, &v| tally[u].cmp(&tally[v]).then(v.cmp(&u))).unwrap();
        if t == 0 {
            return Ok(PwfinRun { partition: partition.clone(), outcome: Outcome::Contradiction { report: bottom_refutation(node, &prof, &wq) } });
        }
        cases.push(if t == 1 { PwCase::Below } else { PwCase::Above });
        profiles.push(prof);
    }

    let mut used: BTreeSet<u64> = BTreeSet::new();
    let mut previous_d: BTreeMap<u64, Vec<(u64, u64)>> = BTreeMap::new();
    let mut out = Vec::new();
    for k in 0..stages {
        let (i, b) = super::stage_indices(k);
        let node = (i % s.nodes.len() as u64) as usize;
        let model = &s.nodes[node];
        let case = cases[node];
        let wanted = if case == PwCase::Below { 1 } else { 2 };
        let start_k = if (k as usize) < p.depth() { p.block_u64(k as usize).map(|x| x.0) } else { None };
        let mut chosen = None;
        for (&n, e) in &profiles[node] {
            if e.colour != wanted || used.contains(&pair_diag(i, n as u64)) {
                continue;
            }
            match case {
                PwCase::Below => {
                    let (label, g) = largest_label_class(e);
                    // Fresh: the label lies outside I_{<k}.
                    let fresh = match start_k {
                        Some(sk) => label >= sk,
                        None => false,
                    };
                    if fresh {
                        chosen = Some((n, Some((label, g))));
                        break;
                    }
                }
                PwCase::Above => {
                    if n as u64 > k {
                        chosen = Some((n, None));
                        break;
                    }
                }
            }
        }
        let Some((n, g)) = chosen else {
            return Err(StageError::Starved { stage: k });
        };
        used.insert(pair_diag(i, n as u64));
        let e = &profiles[node][&n];
        let (block_a, block_b) = p.block_u64(n).unwrap();
        let two_k = Rational::pow2_inv(k);
        let mut checks = Vec::new();
        let (d, c, g_size, label) = match g {
            Some((label, g)) => {
                let d: Vec<(u64, u64)> = g.clone();
                let g_size: u64 = d.iter().map(|&(a, b)| b - a).sum();
                let below = BigUint::from(block_a);
                // |G_n| · |I_{<n}| ≥ |F_n|
                checks.push(Check::new("|G_n| >= |F_n|/|I_<n|", BigUint::from(g_size) * &below >= BigUint::from(e.size)));
                checks.push(Check::new("c in I_<n", label < block_a));
                checks.push(Check::new("c outside I_<k", start_k.is_some_and(|sk| label >= sk)));
                (d, alloc::vec![(label, label + 1)], Some(g_size), Some(label))
            }
            None => {
                let d: Vec<(u64, u64)> = e.pieces.iter().map(|&(a, b, _)| (a, b)).collect();
                let mut c = Vec::new();
                for &(a, b, seg) in &e.pieces {
                    match seg {
                        Segment::Affine(o) => c.push((a + o, b + o)),
                        Segment::Constant(v) => c.push((v, v + 1)),
                        Segment::Bottom => {}
                    }
                }
                checks.push(Check::new("n > k", n as u64 > k));
                (d, merge(c), None, None)
            }
        };
        let w_p_c = interval_weight(&c, &wp)?;
        let w_q_d = interval_weight(&d, &wq)?;
        checks.push(Check::new("|F_n| >= |I_n|/3", BigUint::from(e.size) * 3u32 >= BigUint::from(e.block_len)));
        checks.push(Check::new("w_P(C_k) <= 2^-k", w_p_c <= two_k));
        if case == PwCase::Above {
            checks.push(Check::new("w_P(C_k) <= 2^-(n+1)", w_p_c <= Rational::pow2_inv(n as u64 + 1)));
        }
        checks.push(Check::new("w_Q(D_k) >= 1/3", w_q_d >= Rational::new(1, 3).unwrap()));
        checks.push(Check::new("D_k inside I_n", d.iter().all(|&(a, b)| a >= block_a && b <= block_b)));
        let labels_ok = d.iter().all(|&(a, b)| {
            model.segments(a, b, Some(p)).is_ok_and(|segs| {
                segs.iter().all(|&(x, y, seg)| match seg {
                    Segment::Bottom => false,
                    Segment::Constant(v) => c.iter().any(|&(u, w)| u <= v && v < w),
                    Segment::Affine(o) => c.iter().any(|&(u, w)| u <= x + o && y + o <= w),
                })
            })
        });
        checks.push(Check::new("labels of D_k lie in C_k", labels_ok));
        let prev = previous_d.entry(i).or_default();
        let disjoint = prev.iter().all(|&(a, b)| d.iter().all(|&(u, w)| w <= a || b <= u));
        checks.push(Check::new("D disjoint across b", disjoint));
        prev.extend(d.iter().copied());
        out.push(PwfinStage {
            k,
            i,
            b,
            node,
            case,
            n,
            f_size: e.size,
            g_size,
            label,
            d,
            c,
            w_p_c,
            w_q_d,
            checks,
        });
    }
    Ok(PwfinRun { partition, outcome: Outcome::Stages { stages: out } })
}

/// The most frequent label of a below-coloured `F_n` (least label on ties), with its runs.
fn largest_label_class(e: &Extraction) -> (u64, Vec<(u64, u64)>) {
    let mut by_label: BTreeMap<u64, (u64, Vec<(u64, u64)>)> = BTreeMap::new();
    for &(a, b, seg) in &e.pieces {
        if let Segment::Constant(c) = seg {
            let entry = by_label.entry(c).or_default();
            entry.0 += b - a;
            entry.1.push((a, b));
        }
    }
    let (&label, _) = by_label
        .iter()
        .max_by(|x, y| x.1 .0.cmp(&y.1 .0).then(y.0.cmp(x.0)))
        .expect("a below-coloured block has constant labels");
    (label, by_label.remove(&label).unwrap().1)
}

/// `⊥` dominates: the `⊥`-class is declared null yet each `F_n` adds at least `1/3` to its `w_Q`.
fn bottom_refutation(node: usize, prof: &BTreeMap<usize, Extraction>, wq: &BlockWeight) -> Contradiction {
    let mut total = Rational::zero();
    let mut count = 0u64;
    for e in prof.values().filter(|e| e.colour == 0) {
        total = total + weight_of_extraction(e, wq);
        count += 1;
    }
    Contradiction {
        node,
        reason: format!(
            "the ⊥-successors of a critical node form a null set, but {count} intervals indexed in P \\ Q put weight at least 1/3 each into them; the weight grows without bound"
        ),
        evidence: alloc::vec![
            ("intervals".to_string(), Rational::from_integer(count)),
            ("w_Q of the bottom class".to_string(), total),
            ("lower bound".to_string(), Rational::new(count, 3u64).unwrap()),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::build_partition;
    use crate::diagonal::LabelRule;

    #[test]
    fn colours() {
        let p = build_partition(3).unwrap();
        let bottom = LabelModel::new(LabelRule::Bottom);
        assert_eq!(coarse_colour(&bottom, &p, 2, 5).unwrap(), 0);
        let m = LabelModel::new(LabelRule::Identity).with_override(5, Label::Value(1));
        assert_eq!(coarse_colour(&m, &p, 2, 5).unwrap(), 1);
        let m = LabelModel::new(LabelRule::Identity).with_override(1, Label::Value(20));
        assert_eq!(coarse_colour(&m, &p, 1, 1).unwrap(), 2);
        let e = extract_fn(&bottom, &p, 2).unwrap();
        assert_eq!((e.colour, e.size), (0, 24));
    }

    #[test]
    fn balanced_colouring() {
        let p = build_partition(3).unwrap();
        let mut m = LabelModel::new(LabelRule::Bottom);
        for x in 3..27u64 {
            let l = match x % 3 {
                0 => Label::Bottom,
                1 => Label::Value(1),
                _ => Label::Value(3),
            };
            m = m.with_override(x, l);
        }
        let e = extract_fn(&m, &p, 2).unwrap();
        assert_eq!((e.colour, e.size), (0, 8));
        let wq = BlockWeight::new(DescribedSet::empty(), Arc::new(p));
        assert_eq!(weight_of_extraction(&e, &wq), Rational::one());
    }

    fn scenario(rule: LabelRule) -> PwfinScenario {
        PwfinScenario {
            p: DescribedSet::all(),
            q: DescribedSet::progression(0, 5),
            depth: 5,
            nodes: alloc::vec![LabelModel::new(rule)],
        }
    }

    #[test]
    fn below_case() {
        let r = run(&scenario(LabelRule::BlockFloor), 4).unwrap();
        let stages = r.outcome.stages().unwrap();
        assert_eq!(stages.len(), 4);
        assert_eq!(stages[0].c, [(0, 1)]);
        assert!(stages[0].w_p_c <= Rational::one());
        for s in stages {
            assert_eq!(s.case, PwCase::Below);
            assert!(super::super::all_hold(&s.checks), "{:?}", s.checks);
        }
        assert!(matches!(run(&scenario(LabelRule::BlockFloor), 5), Err(StageError::Starved { stage: 4 })));
    }

    #[test]
    fn above_case() {
        let r = run(&scenario(LabelRule::Identity), 4).unwrap();
        for s in r.outcome.stages().unwrap() {
            assert_eq!(s.case, PwCase::Above);
            assert!(s.n as u64 > s.k);
            assert!(super::super::all_hold(&s.checks), "{:?}", s.checks);
        }
    }

    #[test]
    fn bottom_refuted() {
        let r = run(&scenario(LabelRule::Bottom), 4).unwrap();
        let c = r.outcome.contradiction().unwrap();
        assert_eq!(c.evidence[0].1, Rational::from_integer(4u64));
        let mut s = scenario(LabelRule::Identity);
        s.q = DescribedSet::cofinite([3]);
        assert!(matches!(run(&s, 1), Err(StageError::Hypothesis(_))));
    }
}
