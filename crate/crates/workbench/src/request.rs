//! Every computation the workbench certifies, as a serialisable request with a deterministic result.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use katetov_core::construction::{build_partition, verify_partition, BlockWeight, PartitionData, PartitionError};
use katetov_core::diagonal::assemble::{
    assemble_hindman, assemble_posdiff, assemble_pwfin, assemble_ramsey, collision_check, Assembly, Collision,
};
use katetov_core::diagonal::{all_hold, hindman, posdiff, pwfin, ramsey_stage, Check, Outcome, StageError};
use katetov_core::game::{
    check_reduction_witness, check_subset_reduction, katetov_witness_check, validate_certificate, KatetovMap, Witness,
};
use katetov_core::ideals::{
    hindman_witness_search, in_dual_filter, is_positive, membership, ramsey_witness_search, IdealDescriptor, IdealSpec,
};
use katetov_core::omega::code_unordered;
use katetov_core::ramsey::fs;
use katetov_core::trees::{
    check_branching, compute_labels, find_critical, path_value_search, CoherentMap, FiniteTree, Label, LabelledTree,
    PositivityOracle, StipulatedOracle, Successors,
};
use katetov_core::ideals::{Answer, Evidence, Verdict};
use katetov_core::{DescribedSet, FiniteString, Rational};
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::checks;
use crate::scenario::{Assumption, CollisionSetup, Expected, Scenario, Setup, TreeSetup};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Request {
    Construct { depth: usize },
    VerifyConstruction { partition: PartitionData },
    Weights { set: DescribedSet, depth: usize, elements: Vec<u64> },
    /// `Σ_{m < max I_{depth-1}} w_S(m)` against 1.
    WeightBound { set: DescribedSet, depth: usize },
    Membership { ideal: IdealSpec, set: DescribedSet, horizon: u64 },
    HindmanSearch { set: DescribedSet, size: usize, horizon: u64 },
    RamseySearch { set: DescribedSet, size: usize, horizon: u64 },
    Diagonalize { scenario: Scenario, stages: u64 },
    CheckReduction { claim: Claim },
    Labelling { scenario: Scenario },
    Pigeonhole { depth: usize, n: usize, q: DescribedSet, samples: usize },
    SubsetSample { depth: usize, pairs: usize, horizon: u64 },
    Identities { hindman: Scenario, ramsey: Scenario, stages: u64 },
    CanonicalOracle { exhaustive_n: u64, sample_n: u64, samples: usize, max_n: u64 },
    Sparseness { below: u64, sizes: Vec<usize> },
    Pairing { bound: u64, code_bound: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "claim", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Claim {
    /// `h⁻¹[set]` in the dual filter of the target.
    Katetov { h: KatetovMap, target: IdealSpec, set: DescribedSet, horizon: u64 },
    /// `Sum_P ⊆ Sum_Q`; with `set`, also the height-one identity tree for it.
    Subset { p: DescribedSet, q: DescribedSet, depth: usize, horizon: u64, set: Option<DescribedSet> },
    Tree { witness: Witness, target: IdealSpec, set: DescribedSet, depth: usize, horizon: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Execution {
    pub passed: bool,
    pub assumptions: Vec<Assumption>,
    pub result: Value,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunError {
    /// Malformed input; exit code 2.
    Usage(String),
    /// A verification that could not be carried out; exit code 1.
    Failed(String),
    /// The horizon, depth or scenario is too small; exit code 3.
    Exhausted(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Usage(_) => 2,
            RunError::Failed(_) => 1,
            RunError::Exhausted(_) => 3,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Usage(m) => write!(f, "usage: {m}"),
            RunError::Failed(m) => write!(f, "failed: {m}"),
            RunError::Exhausted(m) => write!(f, "horizon exhausted: {m}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<StageError> for RunError {
    fn from(e: StageError) -> Self {
        match e {
            StageError::HorizonExhausted { .. } | StageError::Starved { .. } | StageError::Horizon(_) => {
                RunError::Exhausted(e.to_string())
            }
            _ => RunError::Failed(e.to_string()),
        }
    }
}

impl From<PartitionError> for RunError {
    fn from(e: PartitionError) -> Self {
        RunError::Exhausted(e.to_string())
    }
}

pub(crate) fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialise")
}

fn done(passed: bool, result: Value) -> Result<Execution, RunError> {
    Ok(Execution { passed, assumptions: Vec::new(), result })
}

pub(crate) fn partition(depth: usize) -> Result<Arc<PartitionData>, RunError> {
    if depth == 0 {
        return Err(RunError::Usage("depth must be at least 1".into()));
    }
    Ok(Arc::new(build_partition(depth)?))
}

fn ideal(spec: &IdealSpec) -> Result<IdealDescriptor, RunError> {
    Ok(spec.instantiate()?)
}

impl Request {
    pub fn execute(&self, seed: u64) -> Result<Execution, RunError> {
        match self {
            Request::Construct { depth } => {
                let p = partition(*depth)?;
                let report = verify_partition(&p).map_err(|e| RunError::Failed(e.to_string()))?;
                done(report.passed(), json!({ "partition": &*p, "report": report }))
            }
            Request::VerifyConstruction { partition } => match verify_partition(partition) {
                Ok(report) => {
                    let failures: Vec<_> = report.failures().cloned().collect();
                    done(report.passed(), json!({ "report": report, "failures": failures }))
                }
                Err(e) => done(false, json!({ "structural_error": e.to_string() })),
            },
            Request::Weights { set, depth, elements } => {
                let w = BlockWeight::new(set.clone(), partition(*depth)?);
                let mut values = Vec::new();
                let mut total = Rational::zero();
                for &m in elements.iter().collect::<BTreeSet<_>>() {
                    let v = w.at_u64(m).map_err(|e| RunError::Exhausted(e.to_string()))?;
                    total = &total + &v;
                    values.push((m, v));
                }
                done(true, json!({ "weights": values, "total": total }))
            }
            Request::WeightBound { set, depth } => weight_bound(set, *depth),
            Request::Membership { ideal: spec, set, horizon } => {
                let i = ideal(spec)?;
                done(true, json!({ "membership": membership(&i, set, *horizon), "positive": is_positive(&i, set, *horizon) }))
            }
            Request::HindmanSearch { set, size, horizon } => {
                if *size == 0 {
                    return Err(RunError::Usage("size must be at least 1".into()));
                }
                let w = hindman_witness_search(set, *size, *horizon);
                let sums = w.as_ref().map(|b| fs(b).expect("witnesses have distinct elements"));
                done(true, json!({ "witness": w, "sums": sums }))
            }
            Request::RamseySearch { set, size, horizon } => {
                if *size < 2 {
                    return Err(RunError::Usage("size must be at least 2".into()));
                }
                let w = ramsey_witness_search(set, *size, *horizon);
                let codes = w.as_ref().map(|t| {
                    let mut c: Vec<u64> = Vec::new();
                    for (j, &a) in t.iter().enumerate() {
                        c.extend(t[j + 1..].iter().map(|&b| code_unordered(a, b).expect("distinct vertices")));
                    }
                    c.sort();
                    c
                });
                done(true, json!({ "witness": w, "pair_codes": codes }))
            }
            Request::Diagonalize { scenario, stages } => diagonalize(scenario, *stages),
            Request::CheckReduction { claim } => check_reduction(claim),
            Request::Labelling { scenario } => match &scenario.setup {
                Setup::Tree(t) => labelling(t),
                _ => Err(RunError::Usage(format!("{} is not a tree scenario", scenario.name))),
            },
            Request::Pigeonhole { depth, n, q, samples } => checks::pigeonhole(*depth, *n, q, *samples, seed),
            Request::SubsetSample { depth, pairs, horizon } => checks::subset_sample(*depth, *pairs, *horizon, seed),
            Request::Identities { hindman, ramsey, stages } => checks::identities(hindman, ramsey, *stages),
            Request::CanonicalOracle { exhaustive_n, sample_n, samples, max_n } => {
                checks::canonical_oracle(*exhaustive_n, *sample_n, *samples, *max_n, seed)
            }
            Request::Sparseness { below, sizes } => checks::sparseness(*below, sizes),
            Request::Pairing { bound, code_bound } => checks::pairing(*bound, *code_bound),
        }
    }
}

fn weight_bound(set: &DescribedSet, depth: usize) -> Result<Execution, RunError> {
    let p = partition(depth)?;
    let w = BlockWeight::new(set.clone(), p.clone());
    let last = depth - 1;
    let upto: BigUint = p.end(last) - 1u32;
    let sum = w.prefix_sum(&upto).map_err(|e| RunError::Exhausted(e.to_string()))?;
    let below_one = sum.cmp_rational(&Rational::one()).is_lt();
    // Reducing the sum needs a gcd of integers as large as the partition; skip it when they are huge.
    let exact = (p.end(last).bits() < 1 << 12).then(|| sum.to_rational());
    done(below_one, json!({ "upto": upto.to_string(), "sum": exact, "below_one": below_one }))
}

fn stage_checks<S>(o: &Outcome<S>, checks: impl Fn(&S) -> &[Check]) -> bool {
    o.stages().is_none_or(|st| st.iter().all(|s| all_hold(checks(s))))
}

fn assembled(a: Option<Result<Assembly, StageError>>) -> Result<Option<Assembly>, RunError> {
    a.transpose().map_err(RunError::from)
}

fn diagonalize(s: &Scenario, stages: u64) -> Result<Execution, RunError> {
    let mut assumptions = s.assumptions.clone();
    let (passed, result) = match &s.setup {
        Setup::Pwfin { engine } => {
            let r = pwfin::run(engine, stages)?;
            let ok = stage_checks(&r.outcome, |s| &s.checks);
            let a = assembled((ok && r.outcome.stages().is_some()).then(|| assemble_pwfin(engine, &r)))?;
            let ok = ok && a.as_ref().is_none_or(|a| all_hold(&a.checks));
            (ok, json!({ "engine": "pwfin", "outcome": r.outcome, "assembly": a }))
        }
        Setup::Posdiff { engine } => {
            let r = posdiff::run(engine, stages)?;
            let ok = stage_checks(&r.outcome, |s| &s.checks);
            let a = assembled((ok && r.outcome.stages().is_some()).then(|| assemble_posdiff(&r)))?;
            let ok = ok && a.as_ref().is_none_or(|a| all_hold(&a.checks));
            (ok, json!({ "engine": "posdiff", "outcome": r.outcome, "assembly": a }))
        }
        Setup::Hindman { engine } => {
            let r = hindman::run(engine, stages)?;
            let ok = stage_checks(&r.outcome, |s| &s.checks);
            let a = assembled((ok && r.outcome.stages().is_some()).then(|| assemble_hindman(&r)))?;
            let ok = ok && a.as_ref().is_none_or(|a| all_hold(&a.checks));
            (ok, json!({ "engine": "hindman", "outcome": r.outcome, "anchors": r.anchors, "assembly": a }))
        }
        Setup::Ramsey { engine } => {
            let r = ramsey_stage::run(engine, stages)?;
            let ok = stage_checks(&r.outcome, |s| &s.checks);
            let a = assembled((ok && r.outcome.stages().is_some()).then(|| assemble_ramsey(&r)))?;
            let ok = ok && a.as_ref().is_none_or(|a| all_hold(&a.checks));
            (ok, json!({ "engine": "ramsey", "outcome": r.outcome, "anchors": r.anchors, "assembly": a }))
        }
        Setup::Collision(c) => {
            let (ok, v) = collision(c, stages)?;
            assumptions.push(Assumption {
                tag: "critical-node".into(),
                statement: format!("{} is critical: no label class among its successors is positive", c.tau),
            });
            (ok, v)
        }
        Setup::Tree(_) => return Err(RunError::Usage(format!("{} is a tree scenario; it has no stages", s.name))),
    };
    assumptions.sort();
    assumptions.dedup();
    Ok(Execution { passed, assumptions, result })
}

/// Declares `tau` and its prefixes critical; used to label a collision tree.
struct DeclaredCritical(FiniteString);

impl PositivityOracle for DeclaredCritical {
    fn class_positive(&self, node: &FiniteString, _label: u64, _class: &BTreeSet<u64>) -> Verdict {
        if node.is_prefix_of(&self.0) {
            Verdict::no(Evidence::Assumption { tag: "critical-node".into() })
        } else {
            Verdict::unknown(Evidence::Undecided { horizon: 0, partial_weight: None })
        }
    }

    fn bottom_null(&self, node: &FiniteString, _class: &BTreeSet<u64>) -> Verdict {
        if node.is_prefix_of(&self.0) {
            Verdict::yes(Evidence::Assumption { tag: "critical-node".into() })
        } else {
            Verdict::unknown(Evidence::Undecided { horizon: 0, partial_weight: None })
        }
    }
}

fn collision(c: &CollisionSetup, stages: u64) -> Result<(bool, Value), RunError> {
    let r = posdiff::run(&c.engine, stages)?;
    if !stage_checks(&r.outcome, |s| &s.checks) {
        return Ok((false, json!({ "engine": "posdiff", "outcome": r.outcome })));
    }
    if r.outcome.stages().is_none() {
        return Err(RunError::Failed("the run refuted the node; there is nothing to collide with".into()));
    }
    let a = assemble_posdiff(&r)?;
    let d = a.positive_set(c.i).ok_or_else(|| RunError::Exhausted(format!("no stage built D[{}]", c.i)))?.d.clone();
    let model = &c.engine.nodes[(c.i % c.engine.nodes.len() as u64) as usize];
    let kids = c.successors.enumerate_upto(c.children);
    let mut map = CoherentMap::new();
    for &x in &kids {
        if let Label::Value(v) = model.label(x, None).map_err(|e| RunError::Failed(e.to_string()))? {
            map.insert_coherent(c.tau.child(x), v).map_err(|e| RunError::Failed(e.to_string()))?;
        }
    }
    let nodes: Vec<FiniteString> = c.tau.prefixes().chain(kids.iter().map(|&x| c.tau.child(x))).collect();
    let tree = FiniteTree::new(nodes, [(c.tau.clone(), Successors::Described { set: c.successors.clone() })])
        .map_err(|e| RunError::Usage(e.to_string()))?;
    let lt = compute_labels(&tree, &map, &DeclaredCritical(c.tau.clone())).map_err(|e| RunError::Failed(e.to_string()))?;
    let target = ideal(&c.ideal)?;
    let hit = collision_check(&tree, &lt, &target, c.horizon, &c.tau, &d, &a);
    let ok = all_hold(&a.checks) && !matches!(hit, Collision::NotBranching { .. });
    Ok((ok, json!({ "engine": "posdiff", "outcome": r.outcome, "assembly": a, "collision": hit })))
}

fn check_reduction(claim: &Claim) -> Result<Execution, RunError> {
    match claim {
        Claim::Katetov { h, target, set, horizon } => {
            let v = katetov_witness_check(h, &ideal(target)?, set, *horizon);
            done(v.is_in(), json!({ "preimage": h.preimage(set), "verdict": v }))
        }
        Claim::Subset { p, q, depth, horizon, set } => {
            let part = partition(*depth)?;
            let red = check_subset_reduction(p, q, &part, *horizon);
            let mut ok = red.answer == Answer::In;
            let mut tree = Value::Null;
            if let Some(a) = set {
                let source = IdealDescriptor::sum_block(p.clone(), part.clone());
                let target = IdealDescriptor::sum_block(q.clone(), part.clone());
                let in_source = in_dual_filter(&source, a, *horizon);
                let cert = check_reduction_witness(&Witness::IdentityHeightOne, &target, a, 1, *horizon);
                let valid = cert.as_ref().is_some_and(|c| validate_certificate(c, &target, a, *horizon));
                ok = ok && in_source.is_in() && valid;
                tree = json!({ "source_verdict": in_source, "certificate": cert, "validates": valid });
            }
            done(ok, json!({ "reduction": red, "height_one": tree }))
        }
        Claim::Tree { witness, target, set, depth, horizon } => {
            let t = ideal(target)?;
            let cert = check_reduction_witness(witness, &t, set, *depth, *horizon);
            let valid = cert.as_ref().is_some_and(|c| validate_certificate(c, &t, set, *horizon));
            done(valid, json!({ "certificate": cert, "validates": valid }))
        }
    }
}

pub(crate) fn stipulation_assumptions(t: &TreeSetup) -> Vec<Assumption> {
    let mut out: Vec<Assumption> = t
        .stipulations
        .iter()
        .map(|s| Assumption {
            tag: s.tag.clone(),
            statement: match s.label {
                Some(c) => format!("at {}: the class of label {c} is {}", s.node, if s.holds { "positive" } else { "not positive" }),
                None => format!("at {}: the bottom class is {}", s.node, if s.holds { "null" } else { "not null" }),
            },
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Labels, branching verdicts and the two separation properties of one tree.
#[derive(Serialize)]
pub(crate) struct LabelReport {
    pub labels: Vec<(FiniteString, Label, katetov_core::trees::Rule)>,
    pub branching: Vec<(FiniteString, Verdict)>,
    pub all_in: bool,
    pub root: Label,
    pub path: Option<Vec<FiniteString>>,
    pub critical: katetov_core::trees::CriticalReport,
    pub maximal_paths_assigned: bool,
    /// `Some` when the hypothesis of the property holds.
    pub value_path_found: Option<bool>,
    pub critical_found: Option<bool>,
    pub expectations_met: bool,
}

pub(crate) fn label_tree(t: &TreeSetup) -> Result<LabelReport, RunError> {
    let oracle = StipulatedOracle::new(t.stipulations.clone());
    let lt: LabelledTree = compute_labels(&t.tree, &t.map, &oracle).map_err(|e| RunError::Failed(e.to_string()))?;
    let target = ideal(&t.ideal)?;
    let verdicts = check_branching(&t.tree, &target, t.horizon);
    let branching: Vec<(FiniteString, Verdict)> =
        verdicts.into_iter().filter(|(s, _)| !t.tree.is_leaf(s)).collect();
    let all_in = branching.iter().all(|(_, v)| v.is_in());
    let root = lt.label(&FiniteString::root()).expect("the root is labelled");
    let path = root.value().and_then(|c| path_value_search(&lt, c));
    let critical = find_critical(&lt, &oracle);
    let maximal_paths_assigned = t.tree.nodes().iter().filter(|s| t.tree.is_leaf(s)).all(|s| t.map.value_at(s).is_some());
    let value_path_found = (all_in && root.value().is_some()).then(|| path.is_some());
    let critical_found = (all_in && root.is_bottom() && maximal_paths_assigned).then(|| !critical.critical.is_empty());
    let root_ok = match &t.expected_root {
        None => true,
        Some(Expected::Bottom) => root.is_bottom(),
        Some(Expected::Value(c)) => root.value() == Some(*c),
    };
    let critical_ok = t.expected_critical.as_ref().is_none_or(|e| *e == critical.critical);
    let labels = t.tree.nodes().iter().map(|s| (s.clone(), lt.labels[s], lt.rules[s])).collect();
    Ok(LabelReport {
        labels,
        branching,
        all_in,
        root,
        path,
        critical,
        maximal_paths_assigned,
        value_path_found,
        critical_found,
        expectations_met: root_ok && critical_ok,
    })
}

fn labelling(t: &TreeSetup) -> Result<Execution, RunError> {
    let r = label_tree(t)?;
    let passed = r.value_path_found != Some(false) && r.critical_found != Some(false) && r.expectations_met;
    Ok(Execution { passed, assumptions: stipulation_assumptions(t), result: to_value(&r) })
}
