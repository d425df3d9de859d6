//! Stage-by-stage diagonalisation engines over declared critical-node models.
//!
//! Stage `k = ⟨i, b⟩` handles the `i`-th critical node, cycling through the declared models
//! (the enumeration of critical nodes may repeat). Every stage records its choices together
//! with the exact rationals its invariants were checked against.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_integer::Integer;

use crate::construction::HorizonExceeded;
use crate::omega::unpair_diag;
use crate::rational::Rational;

pub mod assemble;
pub mod hindman;
pub mod model;
pub mod posdiff;
pub mod pwfin;
pub mod ramsey_stage;

pub use model::{LabelModel, LabelRule, ModelError, Segment};

/// `k ↦ (i, b)`.
pub fn stage_indices(k: u64) -> (u64, u64) {
    unpair_diag(k)
}

/// `{start + j*step : j < count}`, a piece of a chosen set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Run {
    pub start: u64,
    pub step: u64,
    pub count: u64,
}

impl Run {
    pub fn interval(a: u64, b: u64) -> Run {
        Run { start: a, step: 1, count: b.saturating_sub(a) }
    }

    pub fn point(x: u64) -> Run {
        Run { start: x, step: 1, count: 1 }
    }

    pub fn last(&self) -> Option<u64> {
        (self.count > 0).then(|| self.start + (self.count - 1) * self.step)
    }

    pub fn contains(&self, x: u64) -> bool {
        match self.last() {
            None => false,
            Some(l) => x >= self.start && x <= l && (x - self.start) % self.step.max(1) == 0,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.count).map(move |j| self.start + j * self.step)
    }

    /// Whether two runs share an element, by solving the pair of congruences.
    pub fn meets(&self, other: &Run) -> bool {
        let (Some(l1), Some(l2)) = (self.last(), other.last()) else {
            return false;
        };
        let lo = self.start.max(other.start);
        let hi = l1.min(l2);
        if lo > hi {
            return false;
        }
        let (d1, d2) = (self.step.max(1) as i128, other.step.max(1) as i128);
        let (s1, s2) = (self.start as i128, other.start as i128);
        let g = d1.gcd(&d2);
        if (s2 - s1).rem_euclid(g) != 0 {
            return false;
        }
        // x = s1 + d1*t with d1*t ≡ s2 - s1 (mod d2).
        let m = d2 / g;
        let ext = (d1 / g).extended_gcd(&m);
        let t0 = (((s2 - s1) / g) * ext.x).rem_euclid(m.max(1));
        let x0 = s1 + d1 * t0;
        let l = d1 / g * d2;
        // Least solution that is at least lo.
        let x = if x0 >= lo as i128 { x0 - (x0 - lo as i128) / l * l } else { x0 + (lo as i128 - x0 + l - 1) / l * l };
        x <= hi as i128
    }
}

/// Weight of a finite set of successors, with how it was obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WeightBound {
    pub value: Rational,
    /// `true` when `value` is the exact sum, `false` when it is a proven lower bound.
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StageError {
    Model(ModelError),
    Horizon(HorizonExceeded),
    /// No admissible choice below the scenario horizon.
    HorizonExhausted { stage: u64, detail: String },
    /// The scenario is too small to supply a fresh index.
    Starved { stage: u64 },
    /// The declared canonical form disagrees with the labels on a queried prefix.
    FormMismatch { node: usize, declared: u8, found: Option<u8> },
    /// A stage invariant failed; this indicates an engine defect.
    Invariant { stage: u64, name: &'static str },
    /// The scenario violates the hypothesis of the argument it runs.
    Hypothesis(&'static str),
    NoNodes,
}

impl fmt::Display for StageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StageError::Model(e) => write!(f, "{e}"),
            StageError::Horizon(e) => write!(f, "{e}"),
            StageError::HorizonExhausted { stage, detail } => {
                write!(f, "stage {stage}: horizon exhausted ({detail})")
            }
            StageError::Starved { stage } => write!(f, "stage {stage}: no fresh index left in the scenario"),
            StageError::FormMismatch { node, declared, found } => match found {
                Some(c) => write!(f, "node {node}: declared case {declared}, labels show case {c}"),
                None => write!(f, "node {node}: declared case {declared}, labels show no canonical form"),
            },
            StageError::Invariant { stage, name } => write!(f, "stage {stage}: invariant {name} failed"),
            StageError::Hypothesis(h) => write!(f, "scenario violates the hypothesis: {h}"),
            StageError::NoNodes => write!(f, "scenario declares no critical nodes"),
        }
    }
}

impl core::error::Error for StageError {}

impl From<ModelError> for StageError {
    fn from(e: ModelError) -> Self {
        StageError::Model(e)
    }
}

impl From<HorizonExceeded> for StageError {
    fn from(e: HorizonExceeded) -> Self {
        StageError::Horizon(e)
    }
}

/// A finite witness that a declared critical node cannot exist.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Contradiction {
    pub node: usize,
    pub reason: String,
    /// Numbers backing the reason: tallies, witnesses or bounds, as named pairs.
    pub evidence: Vec<(String, Rational)>,
}

/// What a run produced: verified stages, or a finite refutation of a declared node.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "outcome", rename_all = "kebab-case"))]
pub enum Outcome<S> {
    Stages { stages: Vec<S> },
    Contradiction { report: Contradiction },
}

impl<S> Outcome<S> {
    pub fn stages(&self) -> Option<&[S]> {
        match self {
            Outcome::Stages { stages } => Some(stages),
            Outcome::Contradiction { .. } => None,
        }
    }

    pub fn contradiction(&self) -> Option<&Contradiction> {
        match self {
            Outcome::Stages { .. } => None,
            Outcome::Contradiction { report } => Some(report),
        }
    }
}

/// One named invariant and whether it held at a stage.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Check {
    pub name: String,
    pub holds: bool,
}

impl Check {
    pub fn new(name: &str, holds: bool) -> Check {
        Check { name: name.into(), holds }
    }
}

pub fn all_hold(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.holds)
}

const LABEL_LIMIT: u64 = 1 << 16;

/// The labels a model puts on a finite union of runs; `None` if some successor is labelled `⊥`.
pub fn labels_of_runs(
    model: &LabelModel,
    runs: &[Run],
    p: Option<&crate::construction::PartitionData>,
) -> Result<Option<alloc::collections::BTreeSet<u64>>, StageError> {
    let mut out = alloc::collections::BTreeSet::new();
    let mut enumerated = 0u64;
    for r in runs {
        let Some(last) = r.last() else { continue };
        for (a, b, seg) in model.segments(r.start, last + 1, p)? {
            // Elements of r inside [a, b).
            let step = r.step.max(1);
            let first = if a <= r.start { r.start } else { r.start + (a - r.start).div_ceil(step) * step };
            if first >= b || first > last {
                continue;
            }
            let count = (b.min(last + 1) - 1 - first) / step + 1;
            match seg {
                Segment::Bottom => return Ok(None),
                Segment::Constant(c) => {
                    out.insert(c);
                }
                Segment::Affine(o) => {
                    enumerated += count;
                    if enumerated > LABEL_LIMIT {
                        return Err(StageError::HorizonExhausted {
                            stage: 0,
                            detail: alloc::format!("more than {LABEL_LIMIT} distinct labels in one chosen set"),
                        });
                    }
                    for j in 0..count {
                        match (first + j * step).checked_add(o) {
                            Some(l) => out.insert(l),
                            None => return Ok(None),
                        };
                    }
                }
            }
        }
    }
    Ok(Some(out))
}

/// `Σ 1/(c+1)` over a finite set of labels.
pub fn harmonic_sum<I: IntoIterator<Item = u64>>(labels: I) -> Rational {
    labels.into_iter().map(Rational::harmonic).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_intersection() {
        let brute = |a: &Run, b: &Run| a.iter().any(|x| b.contains(x));
        let runs = [
            Run { start: 0, step: 4, count: 6 },
            Run { start: 2, step: 6, count: 5 },
            Run { start: 3, step: 5, count: 4 },
            Run::interval(10, 12),
            Run::point(18),
            Run { start: 7, step: 0, count: 1 },
            Run::interval(5, 5),
        ];
        for a in &runs {
            for b in &runs {
                assert_eq!(a.meets(b), brute(a, b), "{a:?} {b:?}");
            }
        }
    }

    #[test]
    fn stage_enumeration() {
        let s: Vec<(u64, u64)> = (0..6).map(stage_indices).collect();
        assert_eq!(s, [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]);
    }
}
