//! Check reports: the unit of output for every registered check.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Budget,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Budget => 2,
        }
    }

    /// Conjunction: any budget overrun dominates, then any failure.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Budget, _) | (_, Verdict::Budget) => Verdict::Budget,
            (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
            _ => Verdict::Pass,
        }
    }
}

/// The outcome of one named check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub schema_version: u32,
    pub check: String,
    pub params: BTreeMap<String, Value>,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validity: Option<usize>,
    pub counters: BTreeMap<String, u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub details: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub caveats: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<CheckReport>,
    /// Milliseconds of wall time; never part of the digest.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u64>,
}

impl CheckReport {
    pub fn new(check: &str) -> CheckReport {
        CheckReport {
            schema_version: SCHEMA_VERSION,
            check: check.to_string(),
            params: BTreeMap::new(),
            verdict: Verdict::Pass,
            validity: None,
            counters: BTreeMap::new(),
            details: Vec::new(),
            caveats: Vec::new(),
            witness: None,
            certificate: None,
            parts: Vec::new(),
            wall_ms: None,
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> CheckReport {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn set_param(&mut self, key: &str, value: impl Into<Value>) {
        self.params.insert(key.to_string(), value.into());
    }

    pub fn count(&mut self, key: &str, n: u64) {
        *self.counters.entry(key.to_string()).or_insert(0) += n;
    }

    pub fn detail(&mut self, text: impl Into<String>) {
        self.details.push(text.into());
    }

    pub fn caveat(&mut self, text: impl Into<String>) {
        self.caveats.push(text.into());
    }

    /// Records a failure with its witness; the first witness is kept.
    pub fn fail(&mut self, what: impl Into<String>, witness: Value) {
        self.verdict = self.verdict.and(Verdict::Fail);
        self.details.push(what.into());
        if self.witness.is_none() {
            self.witness = Some(witness);
        }
    }

    /// Marks a budget overrun.
    pub fn budget(&mut self, err: &Error) {
        self.verdict = Verdict::Budget;
        self.details.push(err.to_string());
    }

    /// Records a boolean requirement.
    pub fn require(&mut self, ok: bool, what: impl Into<String>, witness: impl FnOnce() -> Value) {
        if !ok {
            self.fail(what, witness());
        }
    }

    /// Adds a sub-report and folds its verdict in.
    pub fn push(&mut self, part: CheckReport) {
        self.verdict = self.verdict.and(part.verdict);
        self.parts.push(part);
    }

    /// Folds the outcome of a fallible step: budget errors become a
    /// `BUDGET` verdict, other errors a failure.
    pub fn absorb<T>(&mut self, step: &str, r: Result<T, Error>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e @ Error::Budget { .. }) => {
                self.budget(&e);
                None
            }
            Err(e) => {
                self.fail(format!("{step}: {e}"), Value::String(e.to_string()));
                None
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    fn strip_time(&mut self) {
        self.wall_ms = None;
        for p in &mut self.parts {
            p.strip_time();
        }
    }

    /// The report body without wall times, as canonical JSON.
    pub fn canonical_json(&self) -> String {
        let mut r = self.clone();
        r.strip_time();
        serde_json::to_string(&r).expect("reports serialize")
    }

    /// SHA-256 of the canonical JSON, in hex.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_ignores_wall_time() {
        let mut a = CheckReport::new("x").param("N", 2);
        a.count("nodes", 5);
        let mut b = a.clone();
        a.wall_ms = Some(1);
        b.wall_ms = Some(99);
        assert_eq!(a.digest(), b.digest());
        b.count("nodes", 1);
        assert_ne!(a.digest(), b.digest());
    }

    #[test]
    fn verdicts_combine() {
        assert_eq!(Verdict::Pass.and(Verdict::Fail), Verdict::Fail);
        assert_eq!(Verdict::Fail.and(Verdict::Budget), Verdict::Budget);
        let mut r = CheckReport::new("y");
        r.require(false, "nope", || Value::Null);
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.verdict.exit_code(), 1);
    }
}
