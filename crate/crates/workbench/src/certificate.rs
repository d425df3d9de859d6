//! Replayable certificates: a request, its seed, a digest of both, and the result they produce.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::request::{Execution, Request, RunError};
use crate::scenario::Assumption;

pub const FORMAT: &str = "katetov-certificate/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub format: String,
    pub seed: u64,
    pub request: Value,
    pub request_sha256: String,
    pub passed: bool,
    pub assumptions: Vec<Assumption>,
    pub result: Value,
}

/// SHA-256 of the compact JSON of `{"request", "seed"}`; `serde_json` maps keep keys sorted.
pub fn digest(request: &Value, seed: u64) -> String {
    let canonical = serde_json::json!({ "request": request, "seed": seed });
    let bytes = serde_json::to_vec(&canonical).expect("values serialise");
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl Certificate {
    pub fn issue(request: &Request, seed: u64, e: &Execution) -> Certificate {
        let request = serde_json::to_value(request).expect("requests serialise");
        Certificate {
            format: FORMAT.into(),
            seed,
            request_sha256: digest(&request, seed),
            request,
            passed: e.passed,
            assumptions: e.assumptions.clone(),
            result: e.result.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialise")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Rejection {
    /// Not a certificate: wrong shape, format, digest or an untagged assumption. Exit 2.
    Schema(String),
    /// Recomputation disagrees with the certificate, or the request no longer runs. Exit 1.
    Mismatch { path: String, detail: String },
}

impl Rejection {
    pub fn exit_code(&self) -> i32 {
        match self {
            Rejection::Schema(_) => 2,
            Rejection::Mismatch { .. } => 1,
        }
    }
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::Schema(m) => write!(f, "not a valid certificate: {m}"),
            Rejection::Mismatch { path, detail } => write!(f, "mismatch at {path}: {detail}"),
        }
    }
}

/// First path at which two JSON values differ.
pub fn first_difference(path: &str, a: &Value, b: &Value) -> Option<(String, String)> {
    match (a, b) {
        (Value::Object(x), Value::Object(y)) => {
            for k in x.keys().chain(y.keys()) {
                let p = format!("{path}.{k}");
                match (x.get(k), y.get(k)) {
                    (Some(u), Some(v)) => {
                        if let Some(d) = first_difference(&p, u, v) {
                            return Some(d);
                        }
                    }
                    (u, v) => return Some((p, format!("{} vs {}", show(u), show(v)))),
                }
            }
            None
        }
        (Value::Array(x), Value::Array(y)) => {
            for (j, (u, v)) in x.iter().zip(y).enumerate() {
                if let Some(d) = first_difference(&format!("{path}[{j}]"), u, v) {
                    return Some(d);
                }
            }
            (x.len() != y.len()).then(|| (path.to_string(), format!("{} entries vs {}", x.len(), y.len())))
        }
        _ => (a != b).then(|| (path.to_string(), format!("{a} vs {b}"))),
    }
}

fn show(v: Option<&Value>) -> String {
    v.map_or_else(|| "missing".into(), |v| v.to_string())
}

/// Re-runs requests, caching executions by digest so mutated copies of one certificate replay once.
#[derive(Default)]
pub struct Certifier {
    cache: HashMap<String, Result<Value, RunError>>,
}

impl Certifier {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn certify_text(&mut self, text: &str) -> Result<Certificate, Rejection> {
        let v: Value = serde_json::from_str(text).map_err(|e| Rejection::Schema(e.to_string()))?;
        self.certify_value(&v)
    }

    pub fn certify(&mut self, c: &Certificate) -> Result<(), Rejection> {
        self.certify_value(&serde_json::to_value(c).expect("serialise")).map(|_| ())
    }

    pub fn certify_value(&mut self, v: &Value) -> Result<Certificate, Rejection> {
        let c: Certificate = serde_json::from_value(v.clone()).map_err(|e| Rejection::Schema(e.to_string()))?;
        if c.format != FORMAT {
            return Err(Rejection::Schema(format!("format {:?}, expected {FORMAT:?}", c.format)));
        }
        if let Some(a) = c.assumptions.iter().find(|a| a.tag.trim().is_empty()) {
            return Err(Rejection::Schema(format!("assumption without a tag: {}", a.statement)));
        }
        if digest(&c.request, c.seed) != c.request_sha256 {
            return Err(Rejection::Schema("request_sha256 does not match the request and seed".into()));
        }
        // A cached entry holds the canonical request for this digest, so equality settles the schema.
        let known = matches!(self.cache.get(&c.request_sha256), Some(Ok(f)) if f["request"] == c.request);
        if !known {
            let request: Request =
                serde_json::from_value(c.request.clone()).map_err(|e| Rejection::Schema(format!("request: {e}")))?;
            let canonical = serde_json::to_value(&request).expect("requests serialise");
            if let Some((path, detail)) = first_difference("request", &c.request, &canonical) {
                return Err(Rejection::Schema(format!("request is not in canonical form at {path}: {detail}")));
            }
            self.cache.entry(c.request_sha256.clone()).or_insert_with(|| {
                request.execute(c.seed).map(|e| serde_json::to_value(Certificate::issue(&request, c.seed, &e)).expect("serialise"))
            });
        }
        let fresh = self.cache[&c.request_sha256]
            .as_ref()
            .map_err(|e| Rejection::Mismatch { path: "request".into(), detail: format!("recomputation fails: {e}") })?;
        match first_difference("", v, fresh) {
            None => Ok(c),
            Some((path, detail)) => {
                Err(Rejection::Mismatch { path: path.trim_start_matches('.').to_string(), detail: format!("certificate has {detail} recomputed") })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn digest_ignores_key_order() {
        let a: Value = serde_json::from_str(r#"{"command":"construct","depth":3}"#).unwrap();
        let b: Value = serde_json::from_str(r#"{"depth":3,"command":"construct"}"#).unwrap();
        assert_eq!(digest(&a, 7), digest(&b, 7));
        assert_ne!(digest(&a, 7), digest(&a, 8));
    }

    #[test]
    fn differences_name_a_path() {
        let a = json!({ "x": [1, { "y": 2 }] });
        let b = json!({ "x": [1, { "y": 3 }] });
        assert_eq!(first_difference("", &a, &b).unwrap().0, ".x[1].y");
        assert!(first_difference("", &a, &a).is_none());
    }

    #[test]
    fn fresh_passes_and_edits_fail() {
        let r = Request::Construct { depth: 3 };
        let c = Certificate::issue(&r, 0, &r.execute(0).unwrap());
        let mut cert = Certifier::new();
        assert_eq!(cert.certify(&c), Ok(()));
        let mut edited = c.clone();
        edited.result["partition"]["bounds"][1] = json!("2");
        assert!(matches!(cert.certify(&edited), Err(Rejection::Mismatch { .. })));
        let mut untagged = c.clone();
        untagged.assumptions.push(Assumption { tag: "".into(), statement: "x".into() });
        assert!(matches!(cert.certify(&untagged), Err(Rejection::Schema(_))));
        let mut rehashed = c.clone();
        rehashed.seed = 1;
        assert!(matches!(cert.certify(&rehashed), Err(Rejection::Schema(_))));
    }
}
