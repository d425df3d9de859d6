//! Batch checks behind the acceptance criteria, each compared with an independent computation.

use std::collections::{BTreeMap, BTreeSet};

use katetov_core::construction::BlockWeight;
use katetov_core::diagonal::pwfin::{extract_fn, weight_of_extraction};
use katetov_core::diagonal::{all_hold, hindman, ramsey_stage, LabelModel, LabelRule};
use katetov_core::game::{check_reduction_witness, check_subset_reduction, validate_certificate, Witness};
use katetov_core::ideals::{in_dual_filter, Answer, IdealDescriptor};
use katetov_core::omega::{code_unordered, decode_unordered, pair_diag, unpair_diag};
use katetov_core::ramsey::{canonical_ramsey_search, delta, eventually_sparse_check, shared_difference_pairs};
use katetov_core::trees::Label;
use katetov_core::{DescribedSet, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::oracle;
use crate::request::{partition, Execution, RunError};
use crate::scenario::{Scenario, Setup};

fn done(passed: bool, result: serde_json::Value) -> Result<Execution, RunError> {
    Ok(Execution { passed, assumptions: Vec::new(), result })
}

/// Random three-colourings of `I_n`: `⊥`, a label below `I_n`, a label inside `I_n`.
pub fn pigeonhole(depth: usize, n: usize, q: &DescribedSet, samples: usize, seed: u64) -> Result<Execution, RunError> {
    let p = partition(depth)?;
    let (a, b) = p.block_u64(n).ok_or_else(|| RunError::Exhausted(format!("I_{n} is not inside the partition")))?;
    if a == 0 {
        return Err(RunError::Usage("the block must not start at 0, or no label lies below it".into()));
    }
    let w = BlockWeight::new(q.clone(), p.clone());
    let third = Rational::new(1, 3).expect("nonzero");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut min_size, mut min_weight) = (u64::MAX, None::<Rational>);
    let mut failures = Vec::new();
    for sample in 0..samples {
        let colours: Vec<u8> = (a..b).map(|_| rng.gen_range(0..3)).collect();
        let mut model = LabelModel::new(LabelRule::Bottom);
        for (x, &c) in (a..b).zip(&colours) {
            let l = match c {
                0 => Label::Bottom,
                1 => Label::Value(0),
                _ => Label::Value(a + x),
            };
            model = model.with_override(x, l);
        }
        let e = extract_fn(&model, &p, n)?;
        let mut counts = [0u64; 3];
        for &c in &colours {
            counts[c as usize] += 1;
        }
        let top = *counts.iter().max().expect("three colours");
        let colour = counts.iter().position(|&c| c == top).expect("present") as u8;
        let weight = weight_of_extraction(&e, &w);
        // Each element of I_n carries the same weight, so F weighs |F| times that of its first element.
        let expected = w.at_u64(a).map_err(|e| RunError::Exhausted(e.to_string()))?.scale(&top.into());
        let ok = e.colour == colour
            && e.size == top
            && 3 * e.size >= b - a
            && weight == expected
            && (q.contains(n as u64) || weight >= third);
        if !ok {
            failures.push(json!({ "sample": sample, "extraction": e, "counts": counts }));
        }
        min_size = min_size.min(e.size);
        if min_weight.as_ref().is_none_or(|m| weight < *m) {
            min_weight = Some(weight);
        }
    }
    let passed = failures.is_empty() && samples > 0;
    done(
        passed,
        json!({
            "block": [a, b],
            "n_in_q": q.contains(n as u64),
            "samples": samples,
            "min_size": min_size,
            "min_weight": min_weight,
            "failures": failures,
        }),
    )
}

fn random_progression(rng: &mut ChaCha8Rng) -> DescribedSet {
    DescribedSet::progression(rng.gen_range(0..6), rng.gen_range(1..6))
}

/// `Q = (P ∪ R) \ F` for random progressions `P`, `R` and a finite `F`, so `P ⊆* Q`.
pub fn subset_sample(depth: usize, pairs: usize, horizon: u64, seed: u64) -> Result<Execution, RunError> {
    let part = partition(depth)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut passed = pairs > 0;
    for _ in 0..pairs {
        let p = random_progression(&mut rng);
        let r = random_progression(&mut rng);
        let f: BTreeSet<u64> = (0..rng.gen_range(0..4)).map(|_| rng.gen_range(0..depth as u64)).collect();
        let q = DescribedSet::intersection(vec![DescribedSet::union(vec![p.clone(), r]), DescribedSet::cofinite(f.clone())]);
        let red = check_subset_reduction(&p, &q, &part, horizon);
        // Oracle: blocks outside F have w_Q ≤ w_P, read directly off r_n.
        let weight = |s: &DescribedSet, n: usize| if s.contains(n as u64) { part.r(n + 1) } else { part.r(n) };
        let bound = red.exception_bound.unwrap_or(u64::MAX) as usize;
        let oracle_ok = (0..depth).filter(|n| !f.contains(&(*n as u64))).all(|n| weight(&q, n) <= weight(&p, n))
            && (bound..depth).all(|n| weight(&q, n) <= weight(&p, n))
            && red.exceptions.iter().all(|x| f.contains(x) && p.contains(*x));
        let a = DescribedSet::cofinite(f.iter().copied());
        let target = IdealDescriptor::sum_block(q.clone(), part.clone());
        let source = IdealDescriptor::sum_block(p.clone(), part.clone());
        let cert = check_reduction_witness(&Witness::IdentityHeightOne, &target, &a, 1, horizon);
        let valid = cert.as_ref().is_some_and(|c| validate_certificate(c, &target, &a, horizon));
        let ok = red.answer == Answer::In && oracle_ok && valid && in_dual_filter(&source, &a, horizon).is_in();
        passed &= ok;
        rows.push(json!({ "p": p, "q": q, "reduction": red, "oracle": oracle_ok, "certificate_validates": valid, "passed": ok }));
    }
    done(passed, json!({ "pairs": rows }))
}

fn engine_of<'a>(s: &'a Scenario, want: &str) -> Result<&'a Setup, RunError> {
    match (&s.setup, want) {
        (Setup::Hindman { .. }, "hindman") | (Setup::Ramsey { .. }, "ramsey") => Ok(&s.setup),
        _ => Err(RunError::Usage(format!("{} is not a {want} scenario", s.name))),
    }
}

/// `⋃_b D_{⟨0,b⟩}` against `FS(anchors)` and `[anchors]²`, enumerated by the oracle.
pub fn identities(h: &Scenario, r: &Scenario, stages: u64) -> Result<Execution, RunError> {
    let Setup::Hindman { engine: he } = engine_of(h, "hindman")? else { unreachable!() };
    let Setup::Ramsey { engine: re } = engine_of(r, "ramsey")? else { unreachable!() };
    let hr = hindman::run(he, stages)?;
    let rr = ramsey_stage::run(re, stages)?;
    let hs = hr.outcome.stages().ok_or_else(|| RunError::Failed("the Hindman run ended in a contradiction".into()))?;
    let rs = rr.outcome.stages().ok_or_else(|| RunError::Failed("the Ramsey run ended in a contradiction".into()))?;
    let h_anchors = hr.anchors.get(&0).cloned().unwrap_or_default();
    let r_anchors = rr.anchors.get(&0).cloned().unwrap_or_default();
    let h_union: BTreeSet<u64> = hs.iter().filter(|s| s.i == 0).flat_map(|s| s.d.iter().copied()).collect();
    let r_union: BTreeSet<(u64, u64)> = rs.iter().filter(|s| s.i == 0).flat_map(|s| s.d.iter().copied()).collect();
    let fs_ok = h_union == oracle::finite_sums(&h_anchors);
    let clique_ok = r_union == oracle::pairs(&r_anchors);
    let checks_ok = hs.iter().all(|s| all_hold(&s.checks)) && rs.iter().all(|s| all_hold(&s.checks));
    let passed = fs_ok && clique_ok && checks_ok && h_anchors.len() >= 4 && r_anchors.len() >= 4;
    done(
        passed,
        json!({
            "hindman": { "anchors": h_anchors, "sums": h_union.len(), "matches_oracle": fs_ok },
            "ramsey": { "anchors": r_anchors, "pairs": r_union.len(), "matches_oracle": clique_ok },
            "stage_checks": checks_ok,
        }),
    )
}

fn compare(f: &dyn Fn(u64, u64) -> u64, n: u64, m: usize) -> bool {
    let core = canonical_ramsey_search(f, n, m).map(|(t, c)| (t, c.case));
    core == oracle::least_canonical(f, n, m)
}

/// Core canonical search against the set-partition oracle, and the least `n` for triangles.
pub fn canonical_oracle(exhaustive_n: u64, sample_n: u64, samples: usize, max_n: u64, seed: u64) -> Result<Execution, RunError> {
    const M: usize = 3;
    let edges = |n: u64| (n * (n - 1) / 2) as usize;
    let mut mismatches = Vec::new();
    let all = oracle::set_partitions(edges(exhaustive_n));
    for p in &all {
        let f = |a: u64, b: u64| p[oracle::edge_index(exhaustive_n, a, b)] as u64;
        if !compare(&f, exhaustive_n, M) {
            mismatches.push(p.clone());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e = edges(sample_n);
    for _ in 0..samples {
        // A random restricted growth string: each edge joins an earlier class or opens a new one.
        let mut p = Vec::with_capacity(e);
        let mut top = 0usize;
        for _ in 0..e {
            let b = rng.gen_range(0..=top);
            top = top.max(b + 1);
            p.push(b);
        }
        let f = |a: u64, b: u64| p[oracle::edge_index(sample_n, a, b)] as u64;
        if !compare(&f, sample_n, M) {
            mismatches.push(p);
        }
    }
    let oracle_n = oracle::minimal_canonical_n(M, max_n);
    let core_n = (M as u64..=max_n).find(|&n| {
        oracle::set_partitions(edges(n)).iter().all(|p| {
            let f = |a: u64, b: u64| p[oracle::edge_index(n, a, b)] as u64;
            canonical_ramsey_search(&f, n, M).is_some()
        })
    });
    let passed = mismatches.is_empty() && oracle_n == core_n;
    done(
        passed,
        json!({
            "exhaustive": { "n": exhaustive_n, "partitions": all.len() },
            "sampled": { "n": sample_n, "samples": samples },
            "mismatches": mismatches.len(),
            "first_mismatch": mismatches.first(),
            "minimal_n": { "m": M, "searched_up_to": max_n, "oracle": oracle_n, "core": core_n },
        }),
    )
}

fn subsets(below: u64, size: usize, from: u64, cur: &mut Vec<u64>, out: &mut dyn FnMut(&[u64])) {
    if cur.len() == size {
        out(cur);
        return;
    }
    for x in from..below {
        cur.push(x);
        subsets(below, size, x + 1, cur, out);
        cur.pop();
    }
}

/// Every `E ⊆ [0, below)` of the given sizes: `Δ(E)` has difference `c − b` at least `|E| − 2` times.
pub fn sparseness(below: u64, sizes: &[usize]) -> Result<Execution, RunError> {
    let mut checked: BTreeMap<usize, u64> = BTreeMap::new();
    let mut failures = Vec::new();
    for &size in sizes {
        if size < 3 {
            return Err(RunError::Usage("sets need at least three elements".into()));
        }
        subsets(below, size, 0, &mut Vec::new(), &mut |e| {
            *checked.entry(size).or_default() += 1;
            let set: BTreeSet<u64> = e.iter().copied().collect();
            let diffs = oracle::differences(e);
            let sd = shared_difference_pairs(&set).expect("at least two elements");
            let pairs_ok = sd.pairs.len() == size - 2
                && sd.pairs.iter().all(|&(x, y)| diffs.contains(&x) && diffs.contains(&y) && x - y == sd.delta);
            let mult = oracle::pairs_with_difference(&diffs, sd.delta);
            let report = eventually_sparse_check(delta(e.iter().copied()), size - 3);
            let flagged = report.offenders.iter().find(|(d, _)| *d == sd.delta).map(|&(_, m)| m);
            let ok = delta(e.iter().copied()) == diffs && pairs_ok && mult >= size - 2 && !report.passes && flagged == Some(mult);
            if !ok && failures.len() < 10 {
                failures.push(json!({ "e": e, "shared": sd, "oracle_multiplicity": mult, "report": report }));
            }
        });
    }
    done(failures.is_empty(), json!({ "below": below, "checked": checked, "failures": failures }))
}

/// Monotonicity in `b`, `b ≤ ⟨i,b⟩` and inverses of both codings, exhaustively.
pub fn pairing(bound: u64, code_bound: u64) -> Result<Execution, RunError> {
    let mut seen = BTreeSet::new();
    let mut bad = Vec::new();
    for i in 0..=bound {
        for b in 0..=bound {
            let k = pair_diag(i, b);
            let monotone = (0..=bound).all(|b2| (b2 < b) == (pair_diag(i, b2) < k));
            if !seen.insert(k) || unpair_diag(k) != (i, b) || b > k || !monotone {
                bad.push((i, b));
            }
        }
    }
    let mut codes = BTreeSet::new();
    let mut bad_codes = Vec::new();
    for a in 0..=code_bound {
        for b in a + 1..=code_bound {
            let k = code_unordered(a, b).expect("distinct");
            if !codes.insert(k) || decode_unordered(k) != (a, b) || code_unordered(b, a) != Ok(k) {
                bad_codes.push((a, b));
            }
        }
    }
    // The codes of pairs below code_bound + 1 are exactly an initial segment.
    let onto = codes.iter().copied().eq(0..codes.len() as u64);
    let passed = bad.is_empty() && bad_codes.is_empty() && onto;
    done(passed, json!({ "pairs": seen.len(), "codes": codes.len(), "onto_initial_segment": onto, "bad": bad, "bad_codes": bad_codes }))
}
