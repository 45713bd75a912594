//! Report data model and serialization.
//!
//! The JSON layout is part of the external interface:
//!
//! ```json
//! {
//!   "params": { "e3": "1", "e6": "1", "eps": "1", "epst": "1",
//!               "a": "1", "c": "0", "theta": "1", "omega": "1" },
//!   "seed": 42,
//!   "points": 20,
//!   "checks": [
//!     { "name": "eisenhart",
//!       "status": { "kind": "pass", "points": 20 },
//!       "witnesses": [],
//!       "notes": "..." }
//!   ]
//! }
//! ```
//!
//! Witness entries carry the offending point, the component label (1-based
//! indices) and the exact value, all as strings. Wall-clock runtime is kept
//! out of the document so that identical configurations serialize to
//! byte-identical reports.

use std::fmt::Write as _;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::hspace::HSpaceParams;

/// One offending (or demonstrating) component at one point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub point: String,
    pub component: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CheckStatus {
    Pass { points: usize },
    Fail,
    Skipped { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub status: CheckStatus,
    pub witnesses: Vec<Witness>,
    pub notes: String,
}

impl CheckResult {
    pub fn pass(name: &str, points: usize, notes: impl Into<String>) -> CheckResult {
        CheckResult {
            name: name.to_owned(),
            status: CheckStatus::Pass { points },
            witnesses: Vec::new(),
            notes: notes.into(),
        }
    }

    /// A failure must exhibit at least one witness.
    pub fn fail(name: &str, witnesses: Vec<Witness>, notes: impl Into<String>) -> CheckResult {
        assert!(!witnesses.is_empty(), "failing check without witnesses");
        CheckResult {
            name: name.to_owned(),
            status: CheckStatus::Fail,
            witnesses,
            notes: notes.into(),
        }
    }

    pub fn skipped(name: &str, reason: impl Into<String>) -> CheckResult {
        CheckResult {
            name: name.to_owned(),
            status: CheckStatus::Skipped {
                reason: reason.into(),
            },
            witnesses: Vec::new(),
            notes: String::new(),
        }
    }

    /// Pass and skipped both count as non-failing.
    pub fn ok(&self) -> bool {
        !matches!(self.status, CheckStatus::Fail)
    }
}

/// String echo of the parameters, in canonical key order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamsEcho {
    pub e3: String,
    pub e6: String,
    pub eps: String,
    pub epst: String,
    pub a: String,
    pub c: String,
    pub theta: String,
    pub omega: String,
}

impl ParamsEcho {
    pub fn from_params(params: &HSpaceParams) -> ParamsEcho {
        ParamsEcho {
            e3: params.e3.to_string(),
            e6: params.e6.to_string(),
            eps: u8::from(params.eps).to_string(),
            epst: u8::from(params.epst).to_string(),
            a: params.a.to_string(),
            c: params.c.to_string(),
            theta: params.theta.to_string(),
            omega: params.omega.to_string(),
        }
    }
}

/// Aggregated result of a suite run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    pub params: ParamsEcho,
    pub seed: u64,
    pub points: usize,
    pub checks: Vec<CheckResult>,
    /// Wall-clock time; excluded from serialization and equality.
    #[serde(skip)]
    pub runtime: Duration,
}

impl PartialEq for VerificationReport {
    fn eq(&self, other: &VerificationReport) -> bool {
        self.params == other.params
            && self.seed == other.seed
            && self.points == other.points
            && self.checks == other.checks
    }
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(CheckResult::ok)
    }

    /// The configuration-level failure entry, if the run never got to the
    /// checks (invalid parameters or exhausted sampling).
    pub fn configuration_failure(&self) -> Option<&CheckResult> {
        self.checks
            .iter()
            .find(|c| c.name == "configuration" && !c.ok())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<VerificationReport, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Stable line-oriented text form.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let p = &self.params;
        let _ = writeln!(
            out,
            "params: e3={} e6={} eps={} epst={} a={} c={} theta={} omega={}",
            p.e3, p.e6, p.eps, p.epst, p.a, p.c, p.theta, p.omega
        );
        let _ = writeln!(out, "seed: {}", self.seed);
        let _ = writeln!(out, "points: {}", self.points);
        for check in &self.checks {
            match &check.status {
                CheckStatus::Pass { points } => {
                    let _ = writeln!(out, "PASS {} ({points} points)", check.name);
                }
                CheckStatus::Fail => {
                    let _ = writeln!(out, "FAIL {}", check.name);
                }
                CheckStatus::Skipped { reason } => {
                    let _ = writeln!(out, "SKIP {}: {reason}", check.name);
                }
            }
            if !check.notes.is_empty() {
                let _ = writeln!(out, "  notes: {}", check.notes);
            }
            for w in &check.witnesses {
                let _ = writeln!(out, "  witness: {} = {} at [{}]", w.component, w.value, w.point);
            }
        }
        let _ = writeln!(
            out,
            "overall: {}",
            if self.all_passed() { "PASS" } else { "FAIL" }
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hspace::HSpaceParams;

    fn sample_report() -> VerificationReport {
        VerificationReport {
            params: ParamsEcho::from_params(&HSpaceParams::default()),
            seed: 42,
            points: 3,
            checks: vec![
                CheckResult::pass("eisenhart", 3, "residual identically zero"),
                CheckResult::fail(
                    "curvature",
                    vec![Witness {
                        point: "x1=1".into(),
                        component: "R[2,1,2,3]".into(),
                        value: "1/16".into(),
                    }],
                    "anchor mismatch",
                ),
                CheckResult::skipped("parallel", "flat configuration"),
            ],
            runtime: Duration::from_millis(1234),
        }
    }

    #[test]
    fn json_round_trip_drops_runtime() {
        let report = sample_report();
        let json = report.to_json();
        assert!(json.ends_with('\n'));
        assert!(!json.contains("runtime"));
        let back = VerificationReport::from_json(&json).unwrap();
        assert_eq!(back, report);
        assert_eq!(back.runtime, Duration::ZERO);
    }

    #[test]
    fn equality_ignores_runtime() {
        let a = sample_report();
        let mut b = sample_report();
        b.runtime = Duration::from_secs(99);
        assert_eq!(a, b);
        b.seed = 43;
        assert_ne!(a, b);
    }

    #[test]
    fn serialization_is_deterministic() {
        let a = sample_report().to_json();
        let b = sample_report().to_json();
        assert_eq!(a, b);
    }

    #[test]
    fn all_passed_treats_skips_as_ok() {
        let mut report = sample_report();
        assert!(!report.all_passed());
        report.checks.remove(1);
        assert!(report.all_passed());
    }

    #[test]
    fn configuration_failure_detection() {
        let mut report = sample_report();
        assert!(report.configuration_failure().is_none());
        report.checks.push(CheckResult::fail(
            "configuration",
            vec![Witness {
                point: "-".into(),
                component: "parameters".into(),
                value: "a must be nonzero".into(),
            }],
            "model construction rejected the parameters",
        ));
        assert!(report.configuration_failure().is_some());
    }

    #[test]
    fn text_form_is_line_oriented() {
        let text = sample_report().to_text();
        assert!(text.contains("PASS eisenhart (3 points)"));
        assert!(text.contains("FAIL curvature"));
        assert!(text.contains("SKIP parallel: flat configuration"));
        assert!(text.contains("witness: R[2,1,2,3] = 1/16 at [x1=1]"));
        assert!(text.ends_with("overall: FAIL\n"));
    }

    #[test]
    #[should_panic(expected = "failing check without witnesses")]
    fn failures_require_witnesses() {
        let _ = CheckResult::fail("x", Vec::new(), "");
    }

    #[test]
    fn status_serialization_shape() {
        let json = sample_report().to_json();
        assert!(json.contains("\"kind\": \"pass\""));
        assert!(json.contains("\"kind\": \"fail\""));
        assert!(json.contains("\"kind\": \"skipped\""));
    }
}
