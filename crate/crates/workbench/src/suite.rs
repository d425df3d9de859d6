//! The acceptance criteria: each runs certified requests under a time limit and reports one line.

use std::path::Path;
use std::time::{Duration, Instant};

use katetov_core::DescribedSet;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use crate::certificate::{Certificate, Certifier};
use crate::request::{Execution, Request};
use crate::scenario::Scenario;

pub const DEFAULT_SEED: u64 = 20240601;

/// Depths used for the certificates of criteria 1 and 2, which the stated depth 30 cannot supply.
pub const CERTIFIED_PARTITION_DEPTH: usize = 10;
pub const CERTIFIED_BOUND_DEPTH: usize = 16;

/// Mutated leaves per certificate beyond which a seeded sample is taken.
const MUTATION_CAP: usize = 400;

pub struct Report {
    pub number: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Duration,
    pub certificates: Vec<(String, Certificate)>,
}

impl Report {
    pub fn line(&self) -> String {
        format!(
            "{} criterion {:>2}: {} ({:.2?} of {:?}) {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.number,
            self.title,
            self.elapsed,
            self.limit,
            self.detail
        )
    }
}

type Expect = Box<dyn Fn(&Execution) -> Result<(), String>>;

struct Job {
    label: String,
    request: Request,
    expect: Expect,
}

fn job(label: impl Into<String>, request: Request) -> Job {
    Job { label: label.into(), request, expect: Box::new(|_| Ok(())) }
}

fn scenario(name: &str) -> Scenario {
    Scenario::bundled(name).unwrap_or_else(|| panic!("bundled scenario {name}"))
}

fn outcome_kind(e: &Execution) -> &str {
    e.result["outcome"]["outcome"].as_str().unwrap_or("none")
}

fn stages_ran(e: &Execution) -> usize {
    e.result["outcome"]["stages"].as_array().map_or(0, Vec::len)
}

const TITLES: [&str; 11] = [
    "construction conditions at depth 30",
    "weight bound below max I_29 for S = ω",
    "positive direction on 20 random pairs",
    "pigeonhole extraction on 200 colourings of I_2",
    "stage bounds in all four engines",
    "structural identities at the horizon",
    "canonical Ramsey search against the oracle",
    "sparseness of shared-difference families",
    "separation properties on scenario trees",
    "pairing properties",
    "certificate integrity",
];

const LIMITS_MS: [u64; 11] = [1_000, 1_000, 5_000, 5_000, 30_000, 5_000, 120_000, 10_000, 5_000, 1_000, 10_000];

fn jobs(n: u8) -> Vec<Job> {
    match n {
        1 => vec![job("construct", Request::Construct { depth: CERTIFIED_PARTITION_DEPTH })],
        2 => vec![job("weight-bound", Request::WeightBound { set: DescribedSet::all(), depth: CERTIFIED_BOUND_DEPTH })],
        3 => vec![job("subset-sample", Request::SubsetSample { depth: 12, pairs: 20, horizon: 4096 })],
        4 => vec![job(
            "pigeonhole",
            Request::Pigeonhole { depth: 4, n: 2, q: DescribedSet::progression(0, 5), samples: 200 },
        )],
        5 => {
            let mut out = Vec::new();
            let runs = [
                ("pw-2b", 4),
                ("pwfin-2c", 4),
                ("posdiff-powers", 6),
                ("posdiff-blocks", 4),
                ("hindman-case2", 6),
                ("hindman-case3", 6),
                ("hindman-case4", 6),
                ("hindman-case5", 6),
                ("ramsey-case2", 6),
                ("ramsey-case3", 6),
                ("ramsey-case4", 6),
            ];
            for (name, stages) in runs {
                let mut j = job(name, Request::Diagonalize { scenario: scenario(name), stages });
                j.expect = Box::new(move |e| {
                    let ran = stages_ran(e) as u64;
                    if outcome_kind(e) != "stages" || ran < stages {
                        return Err(format!("{name}: expected {stages} stages, got {ran} ({})", outcome_kind(e)));
                    }
                    Ok(())
                });
                out.push(j);
            }
            for name in ["hindman-case1", "ramsey-case1"] {
                let mut j = job(name, Request::Diagonalize { scenario: scenario(name), stages: 4 });
                j.expect = Box::new(move |e| match outcome_kind(e) {
                    "contradiction" => Ok(()),
                    other => Err(format!("{name}: expected a contradiction report, got {other}")),
                });
                out.push(j);
            }
            out
        }
        6 => vec![job(
            "identities",
            Request::Identities { hindman: scenario("hindman-case5"), ramsey: scenario("ramsey-case4"), stages: 10 },
        )],
        7 => vec![job(
            "canonical-oracle",
            Request::CanonicalOracle { exhaustive_n: 4, sample_n: 5, samples: 10_000, max_n: 5 },
        )],
        8 => vec![job("sparseness", Request::Sparseness { below: 25, sizes: vec![4, 5] })],
        9 => crate::scenario::BUNDLED
            .iter()
            .map(|(name, _)| scenario(name))
            .filter(|s| matches!(s.setup, crate::scenario::Setup::Tree(_)))
            .map(|s| {
                let name = s.name.clone();
                let mut j = job(name.clone(), Request::Labelling { scenario: s });
                j.expect = Box::new(move |e| {
                    let r = &e.result;
                    let applied = !r["value_path_found"].is_null() || !r["critical_found"].is_null();
                    if r["all_in"] == Value::Bool(true) && !applied {
                        return Err(format!("{name}: neither separation property applies"));
                    }
                    Ok(())
                });
                j
            })
            .collect(),
        10 => vec![job("pairing", Request::Pairing { bound: 100, code_bound: 50 })],
        _ => Vec::new(),
    }
}

/// The stated targets, which the certificates of criteria 1 and 2 stand in for.
fn headline(n: u8) -> Option<Request> {
    match n {
        1 => Some(Request::Construct { depth: 30 }),
        2 => Some(Request::WeightBound { set: DescribedSet::all(), depth: 30 }),
        _ => None,
    }
}

fn run_jobs(n: u8, seed: u64) -> (bool, Vec<String>, Vec<(String, Certificate)>) {
    let mut ok = true;
    let mut notes = Vec::new();
    let mut certs = Vec::new();
    if let Some(r) = headline(n) {
        match r.execute(seed) {
            Ok(e) if e.passed => {}
            Ok(_) => {
                ok = false;
                notes.push("stated target fails verification".to_string());
            }
            Err(e) => {
                ok = false;
                notes.push(format!("stated target: {e}"));
            }
        }
    }
    for j in jobs(n) {
        match j.request.execute(seed) {
            Ok(e) => {
                if !e.passed {
                    ok = false;
                    notes.push(format!("{}: verification failed", j.label));
                }
                if let Err(why) = (j.expect)(&e) {
                    ok = false;
                    notes.push(why);
                }
                certs.push((format!("c{n:02}-{}", j.label), Certificate::issue(&j.request, seed, &e)));
            }
            Err(e) => {
                ok = false;
                notes.push(format!("{}: {e}", j.label));
            }
        }
    }
    (ok, notes, certs)
}

/// Every leaf of a JSON value, as a path of keys and indices.
fn leaves(v: &Value, path: &mut Vec<Value>, out: &mut Vec<Vec<Value>>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                path.push(Value::String(k.clone()));
                leaves(x, path, out);
                path.pop();
            }
        }
        Value::Array(a) if !a.is_empty() => {
            for (j, x) in a.iter().enumerate() {
                path.push(Value::from(j));
                leaves(x, path, out);
                path.pop();
            }
        }
        _ => out.push(path.clone()),
    }
}

fn at<'a>(v: &'a mut Value, path: &[Value]) -> &'a mut Value {
    path.iter().fold(v, |v, k| match k {
        Value::String(s) => &mut v[s.as_str()],
        Value::Number(j) => &mut v[j.as_u64().expect("index") as usize],
        _ => unreachable!(),
    })
}

/// A different value of the same kind where one exists.
pub fn mutate(v: &Value) -> Value {
    match v {
        Value::Null => Value::from(0),
        Value::Bool(b) => Value::Bool(!b),
        Value::Number(n) => match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) if u < u64::MAX => Value::from(u + 1),
            (Some(u), _, _) => Value::from(u - 1),
            (_, Some(i), _) => Value::from(i + 1),
            (_, _, Some(f)) => Value::from(f + 1.0),
            _ => Value::Null,
        },
        Value::String(s) => Value::String(match s.chars().last() {
            Some(c) if c.is_ascii_digit() => format!("{}{}", &s[..s.len() - 1], (c as u8 - b'0' + 1) % 10),
            _ => format!("{s}x"),
        }),
        Value::Array(_) => Value::Array(vec![Value::Null]),
        Value::Object(_) => Value::Null,
    }
}

fn integrity(certs: &[(String, Certificate)], seed: u64) -> (bool, Vec<String>, usize) {
    let mut c = Certifier::new();
    let mut notes = Vec::new();
    let mut mutations = 0usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (name, cert) in certs {
        if let Err(e) = c.certify(cert) {
            notes.push(format!("{name}: fresh certificate rejected: {e}"));
            continue;
        }
        let full = serde_json::to_value(cert).expect("serialise");
        let mut paths = Vec::new();
        leaves(&full, &mut Vec::new(), &mut paths);
        if paths.len() > MUTATION_CAP {
            paths.shuffle(&mut rng);
            paths.truncate(MUTATION_CAP);
        }
        for p in paths {
            let mut m = full.clone();
            let slot = at(&mut m, &p);
            *slot = mutate(slot);
            mutations += 1;
            let survived = c.certify_value(&m).is_ok();
            if survived {
                notes.push(format!("{name}: mutation at {p:?} still certifies"));
            }
        }
    }
    (notes.is_empty() && !certs.is_empty(), notes, mutations)
}

pub fn criteria() -> impl Iterator<Item = u8> {
    1..=11
}

/// Runs the selected criteria; criterion 11 reuses, or if needed produces, the certificates of 1 to 9.
pub fn run(seed: u64, only: Option<&[u8]>, mut on_report: impl FnMut(&Report)) -> Vec<Report> {
    let selected = |n: u8| only.is_none_or(|o| o.contains(&n));
    let mut reports: Vec<Report> = Vec::new();
    for n in 1..=10u8 {
        if !selected(n) && !(selected(11) && n <= 9) {
            continue;
        }
        let start = Instant::now();
        let (ok, notes, certificates) = run_jobs(n, seed);
        let elapsed = start.elapsed();
        let limit = Duration::from_millis(LIMITS_MS[n as usize - 1]);
        let mut detail = notes.join("; ");
        if elapsed > limit {
            detail = format!("over the time limit; {detail}");
        }
        let r = Report { number: n, title: TITLES[n as usize - 1], passed: ok && elapsed <= limit, detail, elapsed, limit, certificates };
        if selected(n) {
            on_report(&r);
        }
        reports.push(r);
    }
    if selected(11) {
        let certs: Vec<(String, Certificate)> =
            reports.iter().filter(|r| r.number <= 9).flat_map(|r| r.certificates.clone()).collect();
        let start = Instant::now();
        let (ok, notes, mutations) = integrity(&certs, seed);
        let elapsed = start.elapsed();
        let limit = Duration::from_millis(LIMITS_MS[10]);
        let mut detail = format!("{} certificates, {mutations} mutations", certs.len());
        if !notes.is_empty() {
            detail = format!("{detail}; {}", notes.join("; "));
        }
        let r = Report { number: 11, title: TITLES[10], passed: ok && elapsed <= limit, detail, elapsed, limit, certificates: Vec::new() };
        on_report(&r);
        reports.push(r);
    }
    reports.retain(|r| selected(r.number));
    reports
}

pub fn write_certificates(reports: &[Report], dir: &Path) -> std::io::Result<usize> {
    std::fs::create_dir_all(dir)?;
    let mut count = 0;
    for (name, c) in reports.iter().flat_map(|r| &r.certificates) {
        std::fs::write(dir.join(format!("{name}.json")), c.to_json())?;
        count += 1;
    }
    Ok(count)
}

