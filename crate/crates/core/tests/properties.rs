use std::collections::BTreeSet;
use std::sync::Arc;

use katetov_core::construction::{build_partition, BlockWeight};
use katetov_core::diagonal::Run;
use katetov_core::game::{katetov_witness_check, KatetovMap};
use katetov_core::ideals::{diff_multiplicity, in_dual_filter, weight_of, IdealDescriptor, WeightFunction};
use katetov_core::omega::{code_unordered, decode_unordered, pair_diag, unpair_diag};
use katetov_core::ramsey::{classify_hindman, classify_ramsey, delta, fs, support};
use katetov_core::trees::{compute_labels, CoherentMap, FiniteTree, StipulatedOracle, Stipulation};
use katetov_core::{DescribedSet, FiniteString, Rational};
use proptest::prelude::*;

#[test]
fn pairing_is_a_monotone_bijection() {
    let mut seen = BTreeSet::new();
    for i in 0..=100 {
        for b in 0..=100 {
            let k = pair_diag(i, b);
            assert!(seen.insert(k));
            assert_eq!(unpair_diag(k), (i, b));
            assert!(b <= k);
            if b > 0 {
                assert!(pair_diag(i, b - 1) < k);
            }
        }
    }
    // The first diagonals fill an initial segment.
    for k in 0..5050 {
        assert!(seen.contains(&k));
    }
}

#[test]
fn unordered_code_is_a_bijection() {
    let mut seen = BTreeSet::new();
    for a in 0..=50 {
        for b in a + 1..=50 {
            let k = code_unordered(a, b).unwrap();
            assert_eq!(k, code_unordered(b, a).unwrap());
            assert_eq!(decode_unordered(k), (a, b));
            assert!(seen.insert(k));
        }
        assert!(code_unordered(a, a).is_err());
    }
}

/// Brute force: any `m + 1` naturals have two in one residue class mod `m`.
#[test]
fn pigeonhole_mod_m_small() {
    fn go(m: u64, from: u64, left: usize, residues: &mut Vec<u64>) {
        if left == 0 {
            let distinct: BTreeSet<u64> = residues.iter().copied().collect();
            assert!(distinct.len() < residues.len());
            return;
        }
        for x in from..40 {
            residues.push(x % m);
            go(m, x + 1, left - 1, residues);
            residues.pop();
        }
    }
    for m in 2..=4 {
        go(m, 0, m as usize + 1, &mut Vec::new());
    }
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-1000i64..1000, 1i64..1000).prop_map(|(n, d)| Rational::new(n, d).unwrap())
}

fn described() -> impl Strategy<Value = DescribedSet> {
    let leaf = prop_oneof![
        prop::collection::btree_set(0u64..60, 0..6).prop_map(DescribedSet::finite),
        prop::collection::btree_set(0u64..60, 0..6).prop_map(DescribedSet::cofinite),
        (0u64..20, 0u64..7).prop_map(|(b, s)| DescribedSet::progression(b, s)),
        (0u64..50, 0u64..30).prop_map(|(a, l)| DescribedSet::interval(a, a + l)),
    ];
    leaf.prop_recursive(3, 12, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 1..3).prop_map(DescribedSet::union),
            prop::collection::vec(inner.clone(), 1..3).prop_map(DescribedSet::intersection),
            inner.prop_map(DescribedSet::complement),
        ]
    })
}

proptest! {
    #[test]
    fn rational_field_laws(a in small_rational(), b in small_rational(), c in small_rational()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        let s: Rational = format!("{a}").parse().unwrap();
        prop_assert_eq!(s, a);
    }

    #[test]
    fn weight_is_finitely_additive(a in prop::collection::btree_set(0u64..200, 0..30), mask in any::<u64>()) {
        let (l, r): (Vec<u64>, Vec<u64>) = a.iter().partition(|&&x| mask >> (x % 64) & 1 == 1);
        let w = WeightFunction::Harmonic;
        let whole = weight_of(&w, a.iter().copied()).unwrap();
        prop_assert_eq!(whole, &weight_of(&w, l).unwrap() + &weight_of(&w, r).unwrap());
    }

    #[test]
    fn block_weight_is_finitely_additive(a in prop::collection::btree_set(0u64..500, 0..30), mask in any::<u64>(), s in described()) {
        let p = Arc::new(build_partition(4).unwrap());
        let w = WeightFunction::Block(BlockWeight::new(s, p));
        let (l, r): (Vec<u64>, Vec<u64>) = a.iter().partition(|&&x| mask >> (x % 64) & 1 == 1);
        let whole = weight_of(&w, a.iter().copied()).unwrap();
        prop_assert_eq!(whole, &weight_of(&w, l).unwrap() + &weight_of(&w, r).unwrap());
    }

    #[test]
    fn enumeration_matches_membership(s in described(), h in 0u64..120) {
        let e = s.enumerate_upto(h);
        prop_assert!(e.windows(2).all(|w| w[0] < w[1]));
        let direct: Vec<u64> = (0..h).filter(|&x| s.contains(x)).collect();
        prop_assert_eq!(e, direct);
    }

    #[test]
    fn difference_table_counts_pairs(a in prop::collection::btree_set(0u64..300, 0..25)) {
        let total: usize = diff_multiplicity(a.iter().copied()).values().sum();
        prop_assert_eq!(total, a.len() * a.len().saturating_sub(1) / 2);
    }

    #[test]
    fn finite_sums_are_bounded(a in prop::collection::btree_set(1u64..200, 1..8)) {
        let v: Vec<u64> = a.iter().copied().collect();
        let s = fs(&v).unwrap();
        prop_assert!(s.len() < 1 << v.len());
        prop_assert_eq!(s.first().copied(), v.first().copied());
        prop_assert_eq!(s.last().copied(), Some(v.iter().sum::<u64>()));
        prop_assert!(delta(v.iter().copied()).iter().all(|&d| d > 0 && d < 200));
    }

    #[test]
    fn support_round_trips(x in 1u64..1_000_000) {
        prop_assert_eq!(support(x).unwrap().sum(), x);
    }

    #[test]
    fn runs_meet_iff_they_share_an_element(
        a in (0u64..60, 0u64..8, 0u64..15), b in (0u64..60, 0u64..8, 0u64..15)
    ) {
        let r = Run { start: a.0, step: a.1, count: a.2 };
        let s = Run { start: b.0, step: b.1, count: b.2 };
        let left: BTreeSet<u64> = r.iter().collect();
        let brute = s.iter().any(|x| left.contains(&x));
        // A zero step repeats its start, which `iter` reports as one point.
        prop_assert_eq!(r.meets(&s), brute);
    }

    #[test]
    fn shifted_preimages_are_pointwise(s in described(), o in 0u64..20) {
        let h = KatetovMap::Shift { offset: o };
        let pre = h.preimage(&s).unwrap();
        for x in 0..80 {
            prop_assert_eq!(pre.contains(x), s.contains(x + o));
        }
    }

    #[test]
    fn identity_map_agrees_with_dual_membership(s in described()) {
        for ideal in [IdealDescriptor::sum_harmonic(), IdealDescriptor::Fin, IdealDescriptor::Den0, IdealDescriptor::Diff] {
            prop_assert_eq!(katetov_witness_check(&KatetovMap::Identity, &ideal, &s, 500), in_dual_filter(&ideal, &s, 500));
        }
    }

    #[test]
    fn verdicts_do_not_flip_with_horizon(s in described(), h in 1u64..300) {
        for ideal in [IdealDescriptor::sum_harmonic(), IdealDescriptor::Den0, IdealDescriptor::Diff, IdealDescriptor::Hindman] {
            let lo = in_dual_filter(&ideal, &s, h);
            let hi = in_dual_filter(&ideal, &s, 4 * h);
            if !lo.is_unknown() {
                prop_assert_eq!(lo.answer, hi.answer);
            }
        }
    }

    #[test]
    fn coherent_maps_never_disagree_on_comparable_strings(entries in prop::collection::vec((prop::collection::vec(0u64..3, 0..4), 0u64..3), 0..12)) {
        let mut m = CoherentMap::new();
        for (s, c) in entries {
            let s = FiniteString(s);
            match m.extend_coherent(s.clone(), c) {
                Ok(next) => m = next,
                Err(e) => {
                    // Only a genuine conflict may reject.
                    prop_assert!(e.existing.comparable(&s) && e.existing_value != c);
                    prop_assert_eq!(m.assignments().get(&e.existing), Some(&e.existing_value));
                }
            }
        }
        let a: Vec<_> = m.assignments().iter().collect();
        for (s, c) in &a {
            for (t, d) in &a {
                if s.comparable(t) {
                    prop_assert_eq!(c, d);
                }
            }
        }
    }

    /// Labels are stable under recomputation, and assigned nodes keep their value whatever the oracle says.
    #[test]
    fn labelling_is_deterministic(vals in prop::collection::vec(0u64..4, 4), holds in prop::collection::vec(any::<bool>(), 8)) {
        let root = FiniteString::root();
        let mut m = CoherentMap::new();
        for (x, &v) in vals.iter().enumerate() {
            m = m.extend_coherent(root.child(x as u64).child(0), v).unwrap();
        }
        let nodes: Vec<FiniteString> = std::iter::once(root.clone())
            .chain((0..4).flat_map(|x| [root.child(x), root.child(x).child(0)]))
            .collect();
        let tree = FiniteTree::new(nodes, []).unwrap();
        let mut stips = Vec::new();
        for (j, &h) in holds.iter().enumerate() {
            stips.push(Stipulation { node: root.clone(), label: Some(j as u64 % 4), holds: h, tag: "t".into() });
            for x in 0..4 {
                stips.push(Stipulation { node: root.child(x), label: Some(j as u64 % 4), holds: h, tag: "t".into() });
            }
        }
        // Later stipulations win; make the root decide every label.
        let oracle = StipulatedOracle::new(stips);
        let a = compute_labels(&tree, &m, &oracle).unwrap();
        let b = compute_labels(&tree, &m, &oracle).unwrap();
        prop_assert_eq!(&a, &b);
        for (x, &v) in vals.iter().enumerate() {
            prop_assert_eq!(a.label(&root.child(x as u64).child(0)).and_then(|l| l.value()), Some(v));
        }
    }

    /// A colouring canonical on some domain keeps its case on subdomains large enough to tell cases apart.
    #[test]
    fn canonical_cases_restrict(t in prop::collection::btree_set(0u64..40, 4..7), which in 0usize..4, drop in 0usize..4) {
        let t: Vec<u64> = t.into_iter().collect();
        let f = move |a: u64, b: u64| match which {
            0 => 7,
            1 => a.min(b),
            2 => a.max(b),
            _ => code_unordered(a, b).unwrap(),
        };
        let full = classify_ramsey(&f, &t).unwrap().case;
        let mut sub = t.clone();
        sub.remove(drop.min(sub.len() - 1));
        let part = classify_ramsey(&f, &sub).unwrap().case;
        // Three or more vertices still separate min, max and pair.
        prop_assert_eq!(part, full);
    }

    #[test]
    fn hindman_cases_restrict(k in 2usize..5, which in 0usize..5) {
        let h: Vec<u64> = (0..k).map(|j| 1u64 << (2 * j)).collect();
        let f = move |x: u64| {
            let s = support(x).unwrap();
            match which {
                0 => 1,
                1 => s.min(),
                2 => s.max(),
                3 => s.min() * 1000 + s.max(),
                _ => x,
            }
        };
        let full = classify_hindman(&f, &fs(&h).unwrap()).unwrap().case;
        prop_assert_eq!(full as usize, if k == 2 && which >= 3 { 5 } else { which + 1 });
        let sub = fs(&h[..k - 1]).unwrap();
        let part = classify_hindman(&f, &sub).unwrap().case as usize;
        let expected = match k - 1 {
            1 => 1,
            2 if which >= 3 => 5,
            _ => which + 1,
        };
        prop_assert_eq!(part, expected);
    }
}
