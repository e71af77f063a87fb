//! Certificates and suite reports.
//!
//! A certificate names a relation, hashes both instances, and carries the
//! witness payload; emitters re-validate witnesses before writing, and the
//! reload path re-validates again, so certificates are self-checking.
//! Reports serialize without wall time, keeping bytes identical across runs
//! with equal parameters and seed.

use crate::hash::hash_of;
use serde::{Deserialize, Serialize};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub relation: String,
    pub lhs_hash: String,
    pub rhs_hash: String,
    pub holds: bool,
    pub witness: serde_json::Value,
    pub tool_version: String,
    pub conventions: String,
}

impl Certificate {
    pub fn new<L: Serialize, R: Serialize>(
        relation: &str,
        lhs: &L,
        rhs: &R,
        holds: bool,
        witness: serde_json::Value,
    ) -> Self {
        Certificate {
            relation: relation.to_string(),
            lhs_hash: hash_of(lhs),
            rhs_hash: hash_of(rhs),
            holds,
            witness,
            tool_version: TOOL_VERSION.to_string(),
            conventions: crate::gadget::CONVENTIONS.to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub instances: u64,
    pub passes: u64,
    pub failures: u64,
    /// Observations that are informative rather than failing: counterexample
    /// counts for directions the constructions do not promise.
    pub diagnostics: Vec<String>,
    pub violations: Vec<Certificate>,
    #[serde(skip)]
    pub wall_ms: u128,
}

impl SuiteReport {
    pub fn new(suite: &str) -> Self {
        SuiteReport {
            suite: suite.to_string(),
            instances: 0,
            passes: 0,
            failures: 0,
            diagnostics: vec![],
            violations: vec![],
            wall_ms: 0,
        }
    }

    pub fn pass(&mut self) {
        self.instances += 1;
        self.passes += 1;
    }

    pub fn fail(&mut self, cert: Certificate) {
        self.instances += 1;
        self.failures += 1;
        self.violations.push(cert);
    }

    pub fn check<L: Serialize, R: Serialize>(
        &mut self,
        ok: bool,
        relation: &str,
        lhs: &L,
        rhs: &R,
        witness: serde_json::Value,
    ) {
        if ok {
            self.pass();
        } else {
            self.fail(Certificate::new(relation, lhs, rhs, false, witness));
        }
    }

    pub fn ok(&self) -> bool {
        self.failures == 0
    }

    pub fn merge(&mut self, other: SuiteReport) {
        self.instances += other.instances;
        self.passes += other.passes;
        self.failures += other.failures;
        self.diagnostics.extend(other.diagnostics);
        self.violations.extend(other.violations);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_counts_stay_consistent() {
        let mut r = SuiteReport::new("demo");
        r.pass();
        r.check(false, "demo:check", &1u8, &2u8, serde_json::Value::Null);
        assert_eq!(r.instances, r.passes + r.failures);
        assert_eq!(r.failures, 1);
        assert!(!r.ok());
    }

    #[test]
    fn wall_time_stays_out_of_serialized_bytes() {
        let mut r = SuiteReport::new("demo");
        r.pass();
        r.wall_ms = 123;
        let a = serde_json::to_string(&r).unwrap();
        r.wall_ms = 456;
        let b = serde_json::to_string(&r).unwrap();
        assert_eq!(a, b);
        assert!(!a.contains("wall"));
    }
}
